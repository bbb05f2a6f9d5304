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

#include "physfadkit/channels.hpp"
#include "physfadkit/errors.hpp"

#include <cmath>
#include <string>

namespace physfadkit
{
    std::string to_string(SeriesLevel level)
    {
        switch (level)
        {
        case SeriesLevel::antenna_self:
            return "antenna_self";
        case SeriesLevel::mimo:
            return "mimo";
        case SeriesLevel::ris_free_space:
            return "ris_free_space";
        case SeriesLevel::ris_mutual:
            return "ris_mutual";
        case SeriesLevel::generic:
            return "generic";
        }
        return "unknown";
    }

    SeriesTruncation SeriesTruncation::fixed(std::size_t k)
    {
        SeriesTruncation t;
        t.mode = Mode::fixed;
        t.order = k;
        return t;
    }

    SeriesTruncation SeriesTruncation::automatic(double tolerance, std::size_t cap)
    {
        SeriesTruncation t;
        t.mode = Mode::automatic;
        t.order = cap;
        t.tolerance = tolerance;
        return t;
    }

    namespace
    {
        // Sums v, X v, X^2 v, ... where step(v) applies X. Each term is kept only long enough to
        // add it to the sum and record its norm.
        template <class Step>
        ComplexMatrix sum_series(ComplexMatrix v, Step &&step, const SeriesTruncation &t, SeriesDiagnostics &d)
        {
            if (t.order < 1)
                throw DomainError("series truncation order must be at least 1");
            const bool automatic = t.mode == SeriesTruncation::Mode::automatic;
            if (automatic && !(t.tolerance > 0.0))
                throw DomainError("automatic truncation needs a positive tolerance");

            d = SeriesDiagnostics{};
            ComplexMatrix sum = v;
            double prev = spectral_norm(v);
            d.term_norms.push_back(prev);
            d.terms = 1;
            if (automatic && prev == 0.0)
            {
                d.converged = true;
                return sum;
            }
            std::size_t growing = 0;
            for (std::size_t k = 1; k < t.order; ++k)
            {
                v = step(v);
                if (!v.all_finite())
                    throw DivergenceDetected("series term " + std::to_string(k) + " is not finite");
                sum += v;
                const double n = spectral_norm(v);
                d.term_norms.push_back(n);
                d.terms = k + 1;
                if (!automatic)
                    continue;
                if (n == 0.0 || n < t.tolerance * spectral_norm(sum))
                {
                    d.converged = true;
                    return sum;
                }
                growing = (n > prev) ? growing + 1 : 0;
                if (growing >= t.divergence_patience)
                    throw DivergenceDetected("term norm grew for " + std::to_string(growing) +
                                             " consecutive terms (last " + std::to_string(n) + ")");
                prev = n;
            }
            if (automatic)
                throw NonConvergence("series did not reach tolerance within " + std::to_string(t.order) + " terms");
            return sum;
        }

        ComplexMatrix identity_columns(std::size_t n, std::size_t offset, std::size_t count)
        {
            ComplexMatrix e(n, count);
            for (std::size_t j = 0; j < count; ++j)
                e(offset + j, j) = 1.0;
            return e;
        }

        ComplexMatrix hollow(ComplexMatrix m)
        {
            for (std::size_t i = 0; i < m.rows(); ++i)
                m(i, i) = 0.0;
            return m;
        }

        std::vector<cplx> reciprocal(const std::vector<cplx> &v)
        {
            std::vector<cplx> r(v.size());
            for (std::size_t i = 0; i < v.size(); ++i)
                r[i] = 1.0 / v[i];
            return r;
        }

        // Born series Sum_k (-Phi M)^k Phi for the inverse of Phi^-1 + M
        ComplexMatrix diagonal_born_series(const std::vector<cplx> &phi, const ComplexMatrix &m,
                                           const SeriesTruncation &trunc, SeriesDiagnostics &d)
        {
            if (m.rows() != phi.size() || m.cols() != phi.size())
                throw LengthMismatch("coupling matrix does not match the polarizability vector");
            std::vector<cplx> neg_phi(phi.size());
            for (std::size_t i = 0; i < phi.size(); ++i)
                neg_phi[i] = -phi[i];
            auto step = [&](const ComplexMatrix &v) { return scale_rows(neg_phi, m * v); };
            return sum_series(ComplexMatrix::diagonal(phi), step, trunc, d);
        }

        // Shared implementation of the RIS round-trip expansions. Group "3" is T+R(+E).
        ChannelMatrix ris_series(const Scene &s, const RisConfiguration &c, double f, const SeriesTruncation &trunc,
                                 const std::optional<SeriesTruncation> &wss_trunc, SeriesLevel level)
        {
            const Scene sc = apply_ris_config(s, c);
            const InteractionMatrix im = assemble_interaction_matrix(sc, f);
            const BlockIndexMap &map = im.map;
            const std::size_t n_t = map.length(Group::T), n_r = map.length(Group::R);
            const std::size_t n_s = map.length(Group::S);
            const std::size_t n3 = map.offset(Group::S);
            const std::size_t off_s = n3;

            const LuFactorization lu3(im.w.block(0, 0, n3, n3));
            const ComplexMatrix w3s = im.w.block(0, off_s, n3, n_s);
            const ComplexMatrix ws3 = im.w.block(off_s, 0, n_s, n3);
            const ComplexMatrix wss = im.w.block(off_s, off_s, n_s, n_s);

            ComplexMatrix wss_inv;
            if (n_s > 0)
            {
                if (wss_trunc)
                {
                    SeriesDiagnostics dd;
                    wss_inv = diagonal_born_series(reciprocal(wss.diag()), hollow(wss), *wss_trunc, dd);
                }
                else
                    wss_inv = invert(wss);
            }

            auto step = [&](const ComplexMatrix &v) -> ComplexMatrix {
                if (n_s == 0)
                    return ComplexMatrix(v.rows(), v.cols());
                return w3s * (wss_inv * (ws3 * lu3.solve(v)));
            };

            ChannelMatrix out;
            out.frequency = f;
            out.exact = false;
            out.level = level;
            const ComplexMatrix sum = sum_series(identity_columns(n3, 0, n_t), step, trunc, out.diagnostics);
            out.order = out.diagnostics.terms;
            out.h = lu3.solve(sum).block(map.offset(Group::R), 0, n_r, n_t);
            return out;
        }
    } // namespace

    ChannelMatrix channel_exact(const Scene &s, const RisConfiguration &c, double f)
    {
        const Scene sc = apply_ris_config(s, c);
        const InteractionMatrix im = assemble_interaction_matrix(sc, f);
        const BlockIndexMap &map = im.map;
        const LuFactorization lu(im.w);
        const ComplexMatrix x = lu.solve(identity_columns(map.size(), map.offset(Group::T), map.length(Group::T)));
        ChannelMatrix out;
        out.h = x.block(map.offset(Group::R), 0, map.length(Group::R), map.length(Group::T));
        if (!out.h.all_finite())
            throw SingularMatrix("channel contains non-finite entries");
        out.frequency = f;
        out.exact = true;
        return out;
    }

    ComplexMatrix antenna_self_inverse_series(const Scene &s, double f, const SeriesTruncation &trunc, Group g,
                                              SeriesDiagnostics *diag)
    {
        const auto &dip = s.group(g);
        std::vector<cplx> phi;
        for (const auto &d : dip)
        {
            check_energy_conservation(d, f, s.constants());
            phi.push_back(1.0 / inverse_polarizability(d, f));
        }
        const ComplexMatrix m = green_matrix(positions(dip), s.constants().wavenumber(f), s.constants());
        SeriesDiagnostics local;
        ComplexMatrix r = diagonal_born_series(phi, m, trunc, local);
        if (diag)
            *diag = std::move(local);
        return r;
    }

    ChannelMatrix mimo_series_rt(const Scene &s, double f, const SeriesTruncation &trunc)
    {
        if (s.count(Group::E) != 0 || s.count(Group::S) != 0)
            throw DomainError("mimo_series_rt expects a scene with transmitters and receivers only");
        const InteractionMatrix im = assemble_interaction_matrix(s, f);
        const LuFactorization tt(im.block(Group::T, Group::T));
        const LuFactorization rr(im.block(Group::R, Group::R));
        const ComplexMatrix w_rt = im.block(Group::R, Group::T);
        const ComplexMatrix w_tr = im.block(Group::T, Group::R);

        auto step = [&](const ComplexMatrix &v) { return w_tr * rr.solve(w_rt * tt.solve(v)); };
        ChannelMatrix out;
        out.frequency = f;
        out.exact = false;
        out.level = SeriesLevel::mimo;
        const ComplexMatrix sum =
            sum_series(ComplexMatrix::identity(s.count(Group::T)), step, trunc, out.diagnostics);
        out.order = out.diagnostics.terms;
        out.h = -rr.solve(w_rt * tt.solve(sum));
        return out;
    }

    ComplexMatrix wss_inverse_series(const std::vector<cplx> &phi, const ComplexMatrix &m_ss,
                                     const SeriesTruncation &trunc, SeriesDiagnostics *diag)
    {
        SeriesDiagnostics local;
        ComplexMatrix r = diagonal_born_series(phi, m_ss, trunc, local);
        if (diag)
            *diag = std::move(local);
        return r;
    }

    ChannelMatrix ris_free_space_series(const Scene &s, const RisConfiguration &c, double f,
                                        const SeriesTruncation &trunc,
                                        const std::optional<SeriesTruncation> &wss_trunc)
    {
        if (s.count(Group::E) != 0)
            throw DomainError("ris_free_space_series requires an empty environment group");
        return ris_series(s, c, f, trunc, wss_trunc, SeriesLevel::ris_free_space);
    }

    ChannelMatrix generic_series_rt(const Scene &s, const RisConfiguration &c, double f,
                                    const SeriesTruncation &trunc,
                                    const std::optional<SeriesTruncation> &wss_trunc)
    {
        return ris_series(s, c, f, trunc, wss_trunc, SeriesLevel::generic);
    }

    ComplexMatrix generic_series_ratio(const Scene &s, const RisConfiguration &c, double f)
    {
        const Scene sc = apply_ris_config(s, c);
        const InteractionMatrix im = assemble_interaction_matrix(sc, f);
        const std::size_t n3 = im.map.offset(Group::S), n_s = im.map.length(Group::S);
        if (n_s == 0)
            return ComplexMatrix(n3, n3);
        const ComplexMatrix w3_inv = invert(im.w.block(0, 0, n3, n3));
        const ComplexMatrix w3s = im.w.block(0, n3, n3, n_s);
        const ComplexMatrix ws3 = im.w.block(n3, 0, n_s, n3);
        const ComplexMatrix wss_inv = invert(im.w.block(n3, n3, n_s, n_s));
        return w3s * (wss_inv * (ws3 * w3_inv));
    }

    // ---------------------------------------------------------------------------------------------

    cplx CascadedModel::siso_h0() const
    {
        if (!is_siso())
            throw LengthMismatch("siso_h0 called on a MIMO model");
        return h0(0, 0);
    }

    std::vector<cplx> CascadedModel::siso_t() const
    {
        if (!is_siso())
            throw LengthMismatch("siso_t called on a MIMO model");
        std::vector<cplx> t(h1.cols());
        for (std::size_t i = 0; i < t.size(); ++i)
            t[i] = h1(0, i) * h2(i, 0);
        return t;
    }

    CascadedModel cascaded_from_blocks(const Scene &s, double f, const CascadedOptions &opt)
    {
        if (opt.environment == Environment::free_space && s.count(Group::E) != 0)
            throw DomainError("free-space cascaded model requested for a scene with environment dipoles");

        const InteractionMatrix im = assemble_interaction_matrix(s, f);
        const BlockIndexMap &map = im.map;
        const std::size_t n_t = map.length(Group::T), n_r = map.length(Group::R), n_e = map.length(Group::E);
        const std::size_t n_s = map.length(Group::S);
        const std::size_t n3 = map.offset(Group::S);
        const std::size_t off_r = map.offset(Group::R), off_e = map.offset(Group::E);

        const ComplexMatrix inv3 = invert(im.w.block(0, 0, n3, n3));
        const ComplexMatrix w3s = im.w.block(0, n3, n3, n_s);
        const ComplexMatrix ws3 = im.w.block(n3, 0, n_s, n3);

        CascadedModel m;
        const ComplexMatrix h0 = inv3.block(off_r, 0, n_r, n_t);
        ComplexMatrix h1, h2;
        if (!opt.prune_antenna_round_trips)
        {
            h1 = inv3.block(off_r, 0, n_r, n3) * w3s;
            h2 = ws3 * inv3.block(0, 0, n3, n_t);
        }
        else
        {
            h1 = inv3.block(off_r, off_r, n_r, n_r) * w3s.block(off_r, 0, n_r, n_s);
            h2 = ws3.block(0, 0, n_s, n_t) * inv3.block(0, 0, n_t, n_t);
            if (n_e > 0)
            {
                h1 += inv3.block(off_r, off_e, n_r, n_e) * w3s.block(off_e, 0, n_e, n_s);
                h2 += ws3.block(0, off_e, n_s, n_e) * inv3.block(off_e, 0, n_e, n_t);
            }
        }

        // alpha_i(c) = mean_i + half_i c_i with c_i = +-1
        const RisStates st = ris_inverse_polarizabilities(s, f);
        std::vector<cplx> mean(n_s), half(n_s);
        for (std::size_t i = 0; i < n_s; ++i)
        {
            const cplx a_on = 1.0 / st.on[i], a_off = 1.0 / st.off[i];
            mean[i] = 0.5 * (a_on + a_off);
            half[i] = 0.5 * (a_on - a_off);
        }
        m.h0 = h0 + scale_cols(h1, mean) * h2;
        m.h1 = scale_cols(std::move(h1), half);
        m.h2 = std::move(h2);
        return m;
    }

    ComplexMatrix cascaded_predict(const CascadedModel &m, const std::vector<double> &c)
    {
        if (c.size() != m.h1.cols() || c.size() != m.h2.rows())
            throw LengthMismatch("config length " + std::to_string(c.size()) + " does not match model with " +
                                 std::to_string(m.h1.cols()) + " RIS elements");
        std::vector<cplx> cc(c.begin(), c.end());
        return m.h0 + scale_cols(m.h1, cc) * m.h2;
    }

    ChannelMatrix cascaded_predict(const CascadedModel &m, const RisConfiguration &c, double f)
    {
        ChannelMatrix out;
        out.h = cascaded_predict(m, c.labels());
        out.frequency = f;
        out.exact = false;
        out.order = 2;
        out.level = SeriesLevel::generic;
        return out;
    }

    // ---------------------------------------------------------------------------------------------

    ConfigurableChannel::ConfigurableChannel(const Scene &s, double f)
    {
        const InteractionMatrix im = assemble_interaction_matrix(s, f);
        const BlockIndexMap &map = im.map;
        const std::size_t n_t = map.length(Group::T), n_r = map.length(Group::R);
        const std::size_t n_s = map.length(Group::S);
        const std::size_t n3 = map.offset(Group::S);
        const std::size_t off_r = map.offset(Group::R);

        const LuFactorization lu3(im.w.block(0, 0, n3, n3));
        h0_ = lu3.solve(identity_columns(n3, 0, n_t)).block(off_r, 0, n_r, n_t);

        const RisStates st = ris_inverse_polarizabilities(s, f);
        on_ = st.on;
        off_ = st.off;
        if (n_s == 0)
            return;

        const ComplexMatrix w3s = im.w.block(0, n3, n3, n_s);
        const ComplexMatrix x = lu3.solve(w3s); // W_3^-1 W_3S
        a_ = x.block(off_r, 0, n_r, n_s);
        b_ = x.block(0, 0, n_t, n_s).transpose(); // W_S3 W_3^-1 = (W_3^-1 W_3S)^T by symmetry
        s0_ = hollow(im.w.block(n3, n3, n_s, n_s)) - im.w.block(n3, 0, n_s, n3) * x;
    }

    ComplexMatrix ConfigurableChannel::evaluate(const RisConfiguration &c) const
    {
        if (c.size() != on_.size())
            throw LengthMismatch("config length " + std::to_string(c.size()) + " does not match " +
                                 std::to_string(on_.size()) + " RIS elements");
        if (on_.empty())
            return h0_;
        ComplexMatrix schur = s0_;
        for (std::size_t i = 0; i < on_.size(); ++i)
            schur(i, i) += c.on(i) ? on_[i] : off_[i];
        const ComplexMatrix y = LuFactorization(std::move(schur)).solve(b_);
        return h0_ + a_ * y;
    }

    cplx ConfigurableChannel::evaluate_siso(const RisConfiguration &c) const
    {
        const ComplexMatrix h = evaluate(c);
        if (h.rows() != 1 || h.cols() != 1)
            throw LengthMismatch("evaluate_siso called on a MIMO scene");
        return h(0, 0);
    }

} // namespace physfadkit
