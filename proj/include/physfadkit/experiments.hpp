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

#ifndef PHYSFADKIT_EXPERIMENTS_HPP
#define PHYSFADKIT_EXPERIMENTS_HPP

#include "physfadkit/metrics.hpp"
#include "physfadkit/physics.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace physfadkit
{
    /// Independent random streams for each (seed, realization, purpose) triple, so results do not
    /// depend on how work is spread over threads.
    enum class StreamPurpose : std::uint64_t
    {
        scene = 1,
        interior = 2,
        calibration = 3,
        test = 4,
        impulse_config = 5
    };

    std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index, StreamPurpose purpose,
                              std::uint64_t attempt = 0) noexcept;
    std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index, StreamPurpose purpose,
                                std::uint64_t attempt = 0);

    // Uniform double in [0, 1) from the top 53 bits of one draw
    double uniform01(std::mt19937_64 &rng) noexcept;

    /// 1D RIS on the x axis centered at the origin, TX and RX placed at random on the y > 0 side.
    struct FreeSpaceSpec
    {
        PhysicalConstants constants;
        double ris_off_detuning = 3.0;

        std::size_t n_s = 10;
        double delta_s = 0.5;
        double chi_s = 1.0;
        double gamma_r_s = default_gamma_r;

        double exclusion = 6.0; // minimum TX/RX distance to every RIS element
        double x_min = -15.0, x_max = 15.0;
        double y_min = 0.0, y_max = 15.0;

        std::size_t realizations = 100;
        std::uint64_t seed = 0;
    };

    Scene gen_free_space_scene(const FreeSpaceSpec &spec, std::size_t realization_index);

    /// Irregular enclosure made of dipole fences, a few interior scatterers, and a RIS embedded
    /// in one wall.
    struct EnclosureSpec
    {
        PhysicalConstants constants;
        double ris_off_detuning = 3.0;

        std::vector<Point> polygon{{0.0, 0.0}, {10.0, 0.0}, {10.0, 4.5}, {7.5, 7.0}, {0.0, 7.0}};
        double fence_spacing = 0.4;
        std::size_t fence_layers = 2; // extra layers are offset outwards
        double layer_gap = 0.25;
        std::size_t n_interior = 10;
        std::optional<std::uint64_t> interior_seed; // fixed layout for all realizations when set
        double clearance = 1.0;                     // interior scatterers and antennas keep this distance

        double f_res_e = 2.0;
        double chi_e = 0.7;
        double gamma_l_e = 0.0;
        std::optional<double> gamma_r_e; // defaults to the lossless value pi^2 chi_e^2

        std::size_t n_s = 21;
        double delta_s = 0.5;
        double chi_s = 1.0;
        double gamma_r_s = default_gamma_r;
        std::size_t ris_edge = 0; // RIS centered on this polygon edge

        std::size_t realizations = 100;
        std::uint64_t seed = 0;

        double environment_gamma_r() const noexcept;
    };

    Scene gen_enclosure_scene(const EnclosureSpec &spec, std::size_t realization_index);

    // Fence dipole positions of one layer along the polygon (vertices included once)
    std::vector<Point> fence_points(const std::vector<Point> &polygon, double spacing);
    std::vector<Point> offset_polygon(const std::vector<Point> &polygon, double outward);
    bool point_in_polygon(Point p, const std::vector<Point> &polygon) noexcept;

    // The same scene with the environment group removed
    Scene matched_free_space(const Scene &s);

    enum class Scenario
    {
        free_space,
        enclosure
    };

    enum class SweepAxis
    {
        chi_s,
        n_s,
        delta_s,
        f_res_e,
        gamma_l_e
    };

    std::string to_string(SweepAxis a);
    SweepAxis sweep_axis_from_string(const std::string &s);

    struct TauOptions
    {
        bool enabled = false;
        ImpulseOptions impulse{0.6, 1.4, 256, SpectralWindow::hann, 0, 0};
        ReverbOptions reverb;
        bool causal_half = false; // fit only the first half of the periodic delay axis
    };

    struct SweepSpec
    {
        Scenario scenario = Scenario::free_space;
        FreeSpaceSpec free_space;
        EnclosureSpec enclosure;

        SweepAxis axis = SweepAxis::n_s;
        std::vector<double> grid;

        std::size_t calibration_factor = 5; // calibration set size = factor * N_S
        std::size_t test_size = 100;
        bool compute_zeta = true;
        bool matched_free_space = false; // also evaluate each enclosure scene without its environment
        TauOptions tau;

        std::size_t realizations() const noexcept;
        std::uint64_t seed() const noexcept;
    };

    struct SweepPoint
    {
        double axis_value = 0.0;
        double mean_zeta_db = 0.0;
        double sd_zeta_db = 0.0;
        std::size_t n_ok = 0;
        std::size_t n_failed = 0;
        double mean_tau = 0.0; // NaN when no realization showed a decay
        std::size_t n_tau = 0;
        double mean_free_space_zeta_db = 0.0;
        std::vector<double> zeta_db; // per realization, NaN for failed ones
        std::vector<double> tau;     // per realization, NaN where no decay was found
        std::vector<double> free_space_zeta_db;
    };

    struct SweepResult
    {
        SweepAxis axis = SweepAxis::n_s;
        std::uint64_t seed = 0;
        std::size_t realizations = 0;
        bool has_zeta = true;
        bool has_tau = false;
        bool has_free_space = false;
        std::vector<SweepPoint> points;
    };

    // One realization of the calibration protocol on a SISO scene at f0
    LinearityReport realization_zeta(const Scene &s, std::uint64_t seed, std::size_t realization_index,
                                     std::size_t calibration_factor = 5, std::size_t test_size = 100);

    // Draws the calibration and test sets used by realization_zeta
    std::pair<CalibrationSet, CalibrationSet> realization_sets(const Scene &s, std::uint64_t seed,
                                                               std::size_t realization_index,
                                                               std::size_t calibration_factor = 5,
                                                               std::size_t test_size = 100);

    // Scene generator for one grid point
    Scene sweep_scene(const SweepSpec &spec, double axis_value, std::size_t realization_index);

    /// Runs every (grid value, realization) pair on `workers` threads and reduces in index order
    SweepResult sweep_zeta(const SweepSpec &spec, std::size_t workers = 1);
    SweepResult sweep_tau(const SweepSpec &spec, std::size_t workers = 1);
    SweepResult run_sweep(const SweepSpec &spec, std::size_t workers = 1);

    void write_sweep_csv(std::ostream &os, const SweepResult &r);

    // Spearman rank correlation (average ranks for ties)
    double spearman(const std::vector<double> &x, const std::vector<double> &y);

} // namespace physfadkit

#endif
