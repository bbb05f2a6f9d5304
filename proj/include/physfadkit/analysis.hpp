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

#ifndef PHYSFADKIT_ANALYSIS_HPP
#define PHYSFADKIT_ANALYSIS_HPP

#include "physfadkit/numerics.hpp"
#include "physfadkit/physics.hpp"

#include <vector>

namespace physfadkit
{
    /// C = |alpha| max_i sum_{j != i} |G_ij| for a group of identical elements.
    struct CouplingConstant
    {
        double value = 0.0;
        Group group = Group::T;
        double alpha_magnitude = 0.0;
        double max_row_sum = 0.0;

        bool convergent() const noexcept { return value < 1.0; }
    };

    CouplingConstant coupling_constant(const std::vector<cplx> &alphas, const std::vector<Point> &positions, double k,
                                       Group group = Group::T, const PhysicalConstants &pc = {});

    // Convenience overload using the dipoles of one scene group as they are
    CouplingConstant coupling_constant(const Scene &s, Group g, double f);

    /// C^K (1 + C) / (1 - C), throws NotConvergent for C >= 1
    double truncation_error_bound(double c, std::size_t k);

    /// Upper bound on the 2-norm of the TX-RX round-trip ratio W_TR W_RR^-1 W_RT W_TT^-1:
    /// |alpha_T|/(1 - C_T) * |alpha_R|/(1 - C_R) * N_T N_R * mu^2 * |H0(k D_RT)|^2
    double mimo_ratio_bound(const Scene &s, double f);

    // The ratio itself, for comparison against the bound
    ComplexMatrix mimo_ratio(const Scene &s, double f);

    /// max_i sum_{j != i} |a_ij| for a complex symmetric matrix with zero diagonal. Never smaller
    /// than the spectral norm.
    double hollow_symmetric_norm_bound(const ComplexMatrix &a);

    struct BounceEstimate
    {
        double tau = 0.0;
        double volume = 0.0;
        double bounces = 0.0;         // tau c / cbrt(V)
        double suggested_order = 0.0; // N_S sigma_S / A_E * bounces
        double sigma_s = 0.0;
        double area_e = 0.0;
    };

    BounceEstimate bounce_estimate(double tau, double volume, std::size_t n_s, double sigma_s, double area_e,
                                   const PhysicalConstants &pc = {});

} // namespace physfadkit

#endif
