// SPDX-License-Identifier: Apache-2.0
//
// physfadkit: coupled-dipole channel simulation toolkit
// Copyright (C) 2026 The physfadkit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "physfadkit/analysis.hpp"
#include "physfadkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace physfadkit
{
    CouplingConstant coupling_constant(const std::vector<cplx> &alphas, const std::vector<Point> &positions, double k,
                                       Group group, const PhysicalConstants &pc)
    {
        if (alphas.size() != positions.size())
            throw LengthMismatch("coupling_constant: " + std::to_string(alphas.size()) + " polarizabilities for " +
                                 std::to_string(positions.size()) + " positions");
        CouplingConstant c;
        c.group = group;
        if (alphas.empty())
            return c;
        const double a0 = std::abs(alphas.front());
        for (const auto &a : alphas)
            if (std::abs(std::abs(a) - a0) > 1e-9 * a0)
                throw HeterogeneousAlpha("element polarizability magnitudes differ (" + std::to_string(a0) + " vs " +
                                         std::to_string(std::abs(a)) + ")");
        c.alpha_magnitude = a0;
        const ComplexMatrix g = green_matrix(positions, k, pc);
        for (std::size_t i = 0; i < g.rows(); ++i)
        {
            double row = 0.0;
            for (std::size_t j = 0; j < g.cols(); ++j)
                row += std::abs(g(i, j));
            c.max_row_sum = std::max(c.max_row_sum, row);
        }
        c.value = c.alpha_magnitude * c.max_row_sum;
        return c;
    }

    CouplingConstant coupling_constant(const Scene &s, Group g, double f)
    {
        std::vector<cplx> alphas;
        for (const auto &d : s.group(g))
            alphas.push_back(1.0 / inverse_polarizability(d, f));
        return coupling_constant(alphas, positions(s.group(g)), s.constants().wavenumber(f), g, s.constants());
    }

    double truncation_error_bound(double c, std::size_t k)
    {
        if (!(c >= 0.0))
            throw DomainError("coupling constant must be non-negative");
        if (k < 1)
            throw DomainError("truncation order must be at least 1");
        if (c >= 1.0)
            throw NotConvergent("coupling constant " + std::to_string(c) + " is not below 1");
        return std::pow(c, static_cast<double>(k)) * (1.0 + c) / (1.0 - c);
    }

    double mimo_ratio_bound(const Scene &s, double f)
    {
        const auto &tx = s.group(Group::T);
        const auto &rx = s.group(Group::R);
        if (tx.empty() || rx.empty())
            throw DomainError("mimo_ratio_bound needs transmitters and receivers");
        const CouplingConstant ct = coupling_constant(s, Group::T, f);
        const CouplingConstant cr = coupling_constant(s, Group::R, f);
        if (!ct.convergent())
            throw NotConvergent("C_T = " + std::to_string(ct.value));
        if (!cr.convergent())
            throw NotConvergent("C_R = " + std::to_string(cr.value));

        double d_rt = std::numeric_limits<double>::infinity();
        for (const auto &t : tx)
            for (const auto &r : rx)
                d_rt = std::min(d_rt, distance(t.position, r.position));
        const PhysicalConstants &pc = s.constants();
        const double mu = pc.mu(f);
        const double h = std::abs(hankel0_2(pc.wavenumber(f) * d_rt));
        return ct.alpha_magnitude / (1.0 - ct.value) * cr.alpha_magnitude / (1.0 - cr.value) *
               static_cast<double>(tx.size() * rx.size()) * mu * mu * h * h;
    }

    ComplexMatrix mimo_ratio(const Scene &s, double f)
    {
        const Scene tr = s.with_group(Group::E, {}).with_group(Group::S, {});
        const InteractionMatrix im = assemble_interaction_matrix(tr, f);
        const LuFactorization tt(im.block(Group::T, Group::T));
        const LuFactorization rr(im.block(Group::R, Group::R));
        // W_TR W_RR^-1 W_RT W_TT^-1, formed through (W_TT^-T ...)^T to reuse the solves
        const ComplexMatrix inner = im.block(Group::T, Group::R) * rr.solve(im.block(Group::R, Group::T));
        return (tt.solve(inner.transpose())).transpose();
    }

    double hollow_symmetric_norm_bound(const ComplexMatrix &a)
    {
        if (!a.is_square())
            throw NotHollowSymmetric("matrix is not square");
        const std::size_t n = a.rows();
        const double scale = std::max(a.max_abs(), 1.0);
        for (std::size_t i = 0; i < n; ++i)
        {
            if (std::abs(a(i, i)) > 1e-12)
                throw NotHollowSymmetric("diagonal entry " + std::to_string(i) + " is not zero");
            for (std::size_t j = i + 1; j < n; ++j)
                if (std::abs(a(i, j) - a(j, i)) > 1e-12 * scale)
                    throw NotHollowSymmetric("entries (" + std::to_string(i) + ", " + std::to_string(j) +
                                             ") and its transpose differ");
        }
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i)
        {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (j != i)
                    row += std::abs(a(i, j));
            best = std::max(best, row);
        }
        return best;
    }

    BounceEstimate bounce_estimate(double tau, double volume, std::size_t n_s, double sigma_s, double area_e,
                                   const PhysicalConstants &pc)
    {
        if (!(tau >= 0.0) || !(volume > 0.0) || !(sigma_s > 0.0) || !(area_e > 0.0))
            throw DomainError("bounce_estimate needs tau >= 0 and positive volume, cross-section and area");
        BounceEstimate b;
        b.tau = tau;
        b.volume = volume;
        b.sigma_s = sigma_s;
        b.area_e = area_e;
        b.bounces = tau * pc.c / std::cbrt(volume);
        b.suggested_order = static_cast<double>(n_s) * sigma_s / area_e * b.bounces;
        return b;
    }

} // namespace physfadkit
