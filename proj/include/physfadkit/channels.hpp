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

#ifndef PHYSFADKIT_CHANNELS_HPP
#define PHYSFADKIT_CHANNELS_HPP

#include "physfadkit/numerics.hpp"
#include "physfadkit/physics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace physfadkit
{
    enum class SeriesLevel
    {
        antenna_self,
        mimo,
        ris_free_space,
        ris_mutual,
        generic
    };

    std::string to_string(SeriesLevel level);

    /// How a power series is cut off. In fixed mode exactly `order` terms are summed. In automatic
    /// mode summation stops once the newest term's 2-norm drops below tolerance times the norm of
    /// the accumulated sum, with `order` acting as a hard cap.
    struct SeriesTruncation
    {
        enum class Mode
        {
            fixed,
            automatic
        };

        Mode mode = Mode::fixed;
        std::size_t order = 1;
        double tolerance = 1e-12;
        std::size_t divergence_patience = 3; // consecutive growing terms that count as divergence

        static SeriesTruncation fixed(std::size_t k);
        static SeriesTruncation automatic(double tolerance = 1e-12, std::size_t cap = 100000);
    };

    struct SeriesDiagnostics
    {
        std::size_t terms = 0;
        std::vector<double> term_norms;
        bool converged = false; // automatic mode reached its tolerance
    };

    /// End-to-end channel H (rows: receivers, columns: transmitters).
    struct ChannelMatrix
    {
        ComplexMatrix h;
        double frequency = 1.0;
        bool exact = true;
        std::size_t order = 0; // number of series terms when not exact
        SeriesLevel level = SeriesLevel::generic;
        SeriesDiagnostics diagnostics;
    };

    /// H = [W^-1]_RT for the configured scene
    ChannelMatrix channel_exact(const Scene &s, const RisConfiguration &c, double f);

    /// Sum_{k<K} (-Omega M)^k Omega, the Born series for the inverse of a single group's diagonal block
    ComplexMatrix antenna_self_inverse_series(const Scene &s, double f, const SeriesTruncation &trunc,
                                              Group g = Group::T, SeriesDiagnostics *diag = nullptr);

    /// -W_RR^-1 W_RT W_TT^-1 Sum_{k<K} (W_TR W_RR^-1 W_RT W_TT^-1)^k for scenes without E and S groups
    ChannelMatrix mimo_series_rt(const Scene &s, double f, const SeriesTruncation &trunc);

    /// Born series for W_SS^-1 = Sum_{k<K} (-Phi M_SS)^k Phi
    ComplexMatrix wss_inverse_series(const std::vector<cplx> &phi, const ComplexMatrix &m_ss,
                                     const SeriesTruncation &trunc, SeriesDiagnostics *diag = nullptr);

    /// [W^-1]_RT in powers of the RIS round-trip ratio W_1S W_SS^-1 W_S1 W_1^-1, where group 1 is T+R.
    /// With wss_trunc set, W_SS^-1 itself is replaced by its Born series.
    ChannelMatrix ris_free_space_series(const Scene &s, const RisConfiguration &c, double f,
                                        const SeriesTruncation &trunc,
                                        const std::optional<SeriesTruncation> &wss_trunc = std::nullopt);

    /// Same expansion with group 3 = T+R+E, valid for any environment
    ChannelMatrix generic_series_rt(const Scene &s, const RisConfiguration &c, double f,
                                    const SeriesTruncation &trunc,
                                    const std::optional<SeriesTruncation> &wss_trunc = std::nullopt);

    // Common ratio of the generic expansion (size N_T + N_R + N_E) for convergence diagnostics
    ComplexMatrix generic_series_ratio(const Scene &s, const RisConfiguration &c, double f);

    /// Affine model H0 + H1 diag(c) H2 in RIS label space (c_i = +1 ON, -1 OFF).
    struct CascadedModel
    {
        ComplexMatrix h0; // N_R x N_T
        ComplexMatrix h1; // N_R x N_S
        ComplexMatrix h2; // N_S x N_T

        bool is_siso() const noexcept { return h0.rows() == 1 && h0.cols() == 1; }
        cplx siso_h0() const;
        std::vector<cplx> siso_t() const; // t_i = h1_i h2_i
    };

    enum class Environment
    {
        free_space,
        generic
    };

    struct CascadedOptions
    {
        Environment environment = Environment::generic;
        // Drop the terms that start at the RIS and end at the TX (and vice versa for H2). This is
        // the usual simplification when antennas are far away and weakly scattering.
        bool prune_antenna_round_trips = false;
    };

    CascadedModel cascaded_from_blocks(const Scene &s, double f, const CascadedOptions &opt = {});

    ComplexMatrix cascaded_predict(const CascadedModel &m, const std::vector<double> &c);
    ChannelMatrix cascaded_predict(const CascadedModel &m, const RisConfiguration &c, double f = 1.0);

    /// Exact channel as a function of the RIS configuration at a fixed frequency. Everything that
    /// does not depend on the configuration is factored once, so each evaluation only costs an
    /// N_S x N_S solve: H(c) = [W_3^-1]_RT + A (W_SS(c) - D)^-1 B.
    class ConfigurableChannel
    {
    public:
        ConfigurableChannel(const Scene &s, double f);

        ComplexMatrix evaluate(const RisConfiguration &c) const;
        cplx evaluate_siso(const RisConfiguration &c) const;
        std::size_t ris_size() const noexcept { return on_.size(); }

    private:
        ComplexMatrix h0_; // [W_3^-1]_RT
        ComplexMatrix a_;  // [W_3^-1]_{R,:} W_3S
        ComplexMatrix b_;  // W_S3 [W_3^-1]_{:,T}
        ComplexMatrix s0_; // M_SS - W_S3 W_3^-1 W_3S (diagonal of W_SS added per configuration)
        std::vector<cplx> on_, off_;
    };

} // namespace physfadkit

#endif
