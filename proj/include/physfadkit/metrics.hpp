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

#ifndef PHYSFADKIT_METRICS_HPP
#define PHYSFADKIT_METRICS_HPP

#include "physfadkit/channels.hpp"
#include "physfadkit/numerics.hpp"
#include "physfadkit/physics.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

namespace physfadkit
{
    /// Pairs of RIS configurations and the SISO channel measured for each.
    struct CalibrationSet
    {
        std::vector<RisConfiguration> configs;
        std::vector<cplx> h;
        std::uint64_t seed = 0;

        std::size_t size() const noexcept { return h.size(); }
    };

    // n configurations of n_s elements, each bit a fair coin flip
    std::vector<RisConfiguration> random_configs(std::size_t n, std::size_t n_s, std::mt19937_64 &rng);

    // Writes "seed,config_bits,re_h,im_h" rows, preceded by a schema comment line
    void write_calibration_csv(std::ostream &os, const CalibrationSet &set);

    struct SisoFit
    {
        cplx h0;
        std::vector<cplx> t;
    };

    /// Least-squares fit of h = h0 + t^T c over the calibration set (labels c = +-1)
    SisoFit fit_cascaded_siso(const CalibrationSet &cal);

    cplx predict_siso(const SisoFit &fit, const RisConfiguration &c);

    // sqrt(mean |x - mean x|^2)
    double complex_sd(const std::vector<cplx> &x);

    struct LinearityReport
    {
        cplx h0;
        std::vector<cplx> t;
        double zeta = 0.0;
        double zeta_db = 0.0; // 20 log10(zeta)
        bool degenerate = false;
        std::size_t n_calibration = 0;
        std::size_t n_test = 0;
    };

    /// zeta = SD(h_test) / SD(h_test - prediction), with the model fitted on the calibration set
    LinearityReport linearity_metric(const CalibrationSet &cal, const CalibrationSet &test);

    // Same metric for a given model instead of a fitted one
    LinearityReport linearity_metric(const SisoFit &model, const CalibrationSet &test);

    enum class SpectralWindow
    {
        rectangular,
        hann
    };

    struct ImpulseResponse
    {
        std::vector<double> power; // |h(t)|^2 on the delay grid
        double dt = 1.0;           // delay resolution 1 / bandwidth
    };

    /// Inverse DFT of samples taken at f_k = f_lo + k B / n, returned as |.|^2
    ImpulseResponse impulse_response_from_spectrum(const std::vector<cplx> &spectrum, double bandwidth,
                                                   SpectralWindow window = SpectralWindow::rectangular);

    struct ImpulseOptions
    {
        double f_lo = 0.8;
        double f_hi = 1.2;
        std::size_t n_f = 512; // power of two, at least 64
        SpectralWindow window = SpectralWindow::rectangular;
        std::size_t rx = 0; // channel entry used for MIMO scenes
        std::size_t tx = 0;
    };

    std::vector<double> frequency_grid(const ImpulseOptions &opt);

    ImpulseResponse impulse_response(const Scene &s, const RisConfiguration &c, const ImpulseOptions &opt = {});

    struct ReverbOptions
    {
        double window_db = 20.0;
        std::size_t smoothing = 5;   // moving-average length in samples (odd)
        std::size_t min_samples = 12; // shorter fit windows are not a decay
        double f0 = 1.0;
    };

    struct ReverbReport
    {
        double tau = 0.0;
        double q = 0.0; // 2 pi f0 tau
        double window_db = 0.0;
        double r2 = 0.0;
        std::size_t first = 0; // fit range in samples
        std::size_t last = 0;
    };

    /// Exponential decay constant of a power envelope: line fit of ln(envelope) from the peak down
    /// to window_db below it, tau = -1 / slope.
    ReverbReport reverberation_time(const std::vector<double> &envelope, double dt, const ReverbOptions &opt = {});

} // namespace physfadkit

#endif
