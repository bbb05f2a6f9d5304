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

#include "physfadkit/experiments.hpp"
#include "physfadkit/channels.hpp"
#include "physfadkit/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>

namespace physfadkit
{
    namespace
    {
        constexpr std::size_t max_rejections = 10000;
        constexpr double nan = std::numeric_limits<double>::quiet_NaN();

        std::uint64_t splitmix64(std::uint64_t x) noexcept
        {
            x += 0x9E3779B97F4A7C15ull;
            x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
            x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
            return x ^ (x >> 31);
        }

        Dipole antenna(Point p)
        {
            Dipole d;
            d.position = p;
            d.f_res = 1.0;
            d.chi = 1.0;
            d.gamma_l = 0.0;
            d.gamma_r = default_gamma_r;
            return d;
        }

        double min_distance(Point p, const std::vector<Point> &others)
        {
            double m = std::numeric_limits<double>::infinity();
            for (const auto &q : others)
                m = std::min(m, distance(p, q));
            return m;
        }

        double signed_area(const std::vector<Point> &poly)
        {
            double a = 0.0;
            for (std::size_t i = 0; i < poly.size(); ++i)
            {
                const Point &p = poly[i], &q = poly[(i + 1) % poly.size()];
                a += p.x * q.y - q.x * p.y;
            }
            return 0.5 * a;
        }

        double cross(Point o, Point a, Point b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

        bool segments_intersect(Point p1, Point p2, Point q1, Point q2)
        {
            const double d1 = cross(q1, q2, p1), d2 = cross(q1, q2, p2);
            const double d3 = cross(p1, p2, q1), d4 = cross(p1, p2, q2);
            return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
        }

        void validate_polygon(const std::vector<Point> &poly)
        {
            const std::size_t n = poly.size();
            if (n < 3)
                throw DomainError("enclosure polygon needs at least three vertices");
            if (std::abs(signed_area(poly)) <= 0.0)
                throw DomainError("enclosure polygon has zero area");
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                {
                    if (j == i + 1 || (i == 0 && j == n - 1))
                        continue;
                    if (segments_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
                        throw DomainError("enclosure polygon edges " + std::to_string(i) + " and " +
                                          std::to_string(j) + " intersect");
                }
        }

        Dipole env_dipole(const EnclosureSpec &spec, Point p)
        {
            Dipole d;
            d.position = p;
            d.f_res = spec.f_res_e;
            d.chi = spec.chi_e;
            d.gamma_l = spec.gamma_l_e;
            d.gamma_r = spec.environment_gamma_r();
            return d;
        }
    } // namespace

    std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index, StreamPurpose purpose,
                              std::uint64_t attempt) noexcept
    {
        std::uint64_t h = splitmix64(seed);
        h = splitmix64(h ^ splitmix64(index + 0x632BE59BD9B4E019ull));
        h = splitmix64(h ^ (static_cast<std::uint64_t>(purpose) * 0xD1B54A32D192ED03ull));
        h = splitmix64(h ^ (attempt * 0x8CB92BA72F3D8DD7ull));
        return h;
    }

    std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index, StreamPurpose purpose, std::uint64_t attempt)
    {
        return std::mt19937_64(stream_seed(seed, index, purpose, attempt));
    }

    double uniform01(std::mt19937_64 &rng) noexcept
    {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53;
    }

    // ---------------------------------------------------------------------------------------------

    Scene gen_free_space_scene(const FreeSpaceSpec &spec, std::size_t realization_index)
    {
        const double dmin = spec.constants.min_separation();
        if (spec.n_s > 1 && !(spec.delta_s > dmin))
            throw DomainError("RIS spacing must exceed the minimum dipole separation");
        if (!(spec.exclusion >= 6.0 * spec.constants.wavelength()))
            throw DomainError("TX/RX exclusion radius must be at least six wavelengths");
        if (!(spec.x_max > spec.x_min) || !(spec.y_max > spec.y_min))
            throw DomainError("placement region is empty");

        std::vector<Dipole> ris;
        std::vector<Point> ris_pos;
        for (std::size_t i = 0; i < spec.n_s; ++i)
        {
            Dipole d;
            d.position = {(static_cast<double>(i) - 0.5 * static_cast<double>(spec.n_s - 1)) * spec.delta_s, 0.0};
            d.f_res = spec.constants.f0;
            d.chi = spec.chi_s;
            d.gamma_l = 0.0;
            d.gamma_r = spec.gamma_r_s;
            ris.push_back(d);
            ris_pos.push_back(d.position);
        }

        auto rng = make_stream(spec.seed, realization_index, StreamPurpose::scene);
        std::vector<Point> placed;
        for (int a = 0; a < 2; ++a)
        {
            bool ok = false;
            for (std::size_t attempt = 0; attempt < max_rejections && !ok; ++attempt)
            {
                const Point p{spec.x_min + (spec.x_max - spec.x_min) * uniform01(rng),
                              spec.y_min + (spec.y_max - spec.y_min) * uniform01(rng)};
                if (min_distance(p, ris_pos) >= spec.exclusion && min_distance(p, placed) >= dmin)
                {
                    placed.push_back(p);
                    ok = true;
                }
            }
            if (!ok)
                throw PlacementExhausted("could not place antenna " + std::to_string(a) + " after " +
                                         std::to_string(max_rejections) + " attempts");
        }
        return Scene(spec.constants, {antenna(placed[0])}, {antenna(placed[1])}, {}, std::move(ris),
                     spec.ris_off_detuning);
    }

    double EnclosureSpec::environment_gamma_r() const noexcept
    {
        return gamma_r_e ? *gamma_r_e : std::numbers::pi * std::numbers::pi * chi_e * chi_e;
    }

    std::vector<Point> fence_points(const std::vector<Point> &polygon, double spacing)
    {
        if (!(spacing > 0.0))
            throw DomainError("fence spacing must be positive");
        std::vector<Point> pts;
        for (std::size_t e = 0; e < polygon.size(); ++e)
        {
            const Point a = polygon[e], b = polygon[(e + 1) % polygon.size()];
            const double len = distance(a, b);
            const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(len / spacing)));
            for (std::size_t i = 0; i < m; ++i)
            {
                const double s = static_cast<double>(i) / static_cast<double>(m);
                pts.push_back({a.x + (b.x - a.x) * s, a.y + (b.y - a.y) * s});
            }
        }
        return pts;
    }

    std::vector<Point> offset_polygon(const std::vector<Point> &polygon, double outward)
    {
        const std::size_t n = polygon.size();
        const double orient = signed_area(polygon) > 0.0 ? 1.0 : -1.0;
        // Each edge line shifted along its outward normal
        std::vector<Point> base(n), dir(n);
        for (std::size_t e = 0; e < n; ++e)
        {
            const Point a = polygon[e], b = polygon[(e + 1) % n];
            const double len = distance(a, b);
            const Point t{(b.x - a.x) / len, (b.y - a.y) / len};
            const Point nout{orient * t.y, -orient * t.x};
            base[e] = {a.x + outward * nout.x, a.y + outward * nout.y};
            dir[e] = t;
        }
        std::vector<Point> out(n);
        for (std::size_t e = 0; e < n; ++e)
        {
            const std::size_t prev = (e + n - 1) % n;
            const Point p1 = base[prev], t1 = dir[prev], p2 = base[e], t2 = dir[e];
            const double det = t1.x * (-t2.y) - t1.y * (-t2.x);
            if (std::abs(det) < 1e-12)
            {
                out[e] = p2; // collinear neighbours
                continue;
            }
            const double rx = p2.x - p1.x, ry = p2.y - p1.y;
            const double s = (rx * (-t2.y) - ry * (-t2.x)) / det;
            out[e] = {p1.x + s * t1.x, p1.y + s * t1.y};
        }
        return out;
    }

    bool point_in_polygon(Point p, const std::vector<Point> &polygon) noexcept
    {
        bool inside = false;
        const std::size_t n = polygon.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++)
        {
            const Point a = polygon[i], b = polygon[j];
            if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x)
                inside = !inside;
        }
        return inside;
    }

    Scene gen_enclosure_scene(const EnclosureSpec &spec, std::size_t realization_index)
    {
        validate_polygon(spec.polygon);
        const std::size_t nv = spec.polygon.size();
        if (spec.ris_edge >= nv)
            throw DomainError("ris_edge index out of range");
        if (spec.fence_layers < 1)
            throw DomainError("at least one fence layer is required");
        if (spec.fence_layers > 1 && !(spec.layer_gap > spec.constants.min_separation()))
            throw DomainError("layer gap must exceed the minimum dipole separation");

        // RIS centered on its wall
        const Point a = spec.polygon[spec.ris_edge], b = spec.polygon[(spec.ris_edge + 1) % nv];
        const double edge_len = distance(a, b);
        const Point t{(b.x - a.x) / edge_len, (b.y - a.y) / edge_len};
        const double span = static_cast<double>(spec.n_s > 0 ? spec.n_s - 1 : 0) * spec.delta_s;
        if (span > edge_len * (1.0 + 1e-12))
            throw DomainError("RIS of length " + std::to_string(span) + " does not fit on edge of length " +
                              std::to_string(edge_len));
        const double s_mid = 0.5 * edge_len;
        std::vector<Dipole> ris;
        std::vector<Point> occupied;
        for (std::size_t i = 0; i < spec.n_s; ++i)
        {
            const double s = s_mid + (static_cast<double>(i) - 0.5 * static_cast<double>(spec.n_s - 1)) * spec.delta_s;
            Dipole d;
            d.position = {a.x + s * t.x, a.y + s * t.y};
            d.f_res = spec.constants.f0;
            d.chi = spec.chi_s;
            d.gamma_l = 0.0;
            d.gamma_r = spec.gamma_r_s;
            ris.push_back(d);
            occupied.push_back(d.position);
        }

        // Fence layers. On the RIS wall the inner layer makes room for the RIS elements.
        std::vector<Dipole> env;
        const double tol = 1e-9;
        for (std::size_t layer = 0; layer < spec.fence_layers; ++layer)
        {
            const auto poly = layer == 0 ? spec.polygon
                                         : offset_polygon(spec.polygon, spec.layer_gap * static_cast<double>(layer));
            for (const Point &p : fence_points(poly, spec.fence_spacing))
            {
                if (layer == 0 && spec.n_s > 0)
                {
                    const double s = (p.x - a.x) * t.x + (p.y - a.y) * t.y;
                    const double off = std::abs((p.x - a.x) * t.y - (p.y - a.y) * t.x);
                    const double half = 0.5 * span + 0.5 * spec.delta_s;
                    if (off < tol && s >= s_mid - half - tol && s <= s_mid + half + tol)
                        continue;
                }
                env.push_back(env_dipole(spec, p));
                occupied.push_back(p);
            }
        }

        double x0 = spec.polygon[0].x, x1 = x0, y0 = spec.polygon[0].y, y1 = y0;
        for (const auto &p : spec.polygon)
        {
            x0 = std::min(x0, p.x), x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
        }
        auto place = [&](std::mt19937_64 &rng, const char *what) {
            for (std::size_t attempt = 0; attempt < max_rejections; ++attempt)
            {
                const Point p{x0 + (x1 - x0) * uniform01(rng), y0 + (y1 - y0) * uniform01(rng)};
                if (point_in_polygon(p, spec.polygon) && min_distance(p, occupied) >= spec.clearance)
                {
                    occupied.push_back(p);
                    return p;
                }
            }
            throw PlacementExhausted(std::string("could not place ") + what + " after " +
                                     std::to_string(max_rejections) + " attempts");
        };

        auto interior_rng = spec.interior_seed ? make_stream(*spec.interior_seed, 0, StreamPurpose::interior)
                                               : make_stream(spec.seed, realization_index, StreamPurpose::interior);
        for (std::size_t i = 0; i < spec.n_interior; ++i)
            env.push_back(env_dipole(spec, place(interior_rng, "interior scatterer")));

        auto rng = make_stream(spec.seed, realization_index, StreamPurpose::scene);
        const Point tx = place(rng, "transmitter");
        const Point rx = place(rng, "receiver");
        return Scene(spec.constants, {antenna(tx)}, {antenna(rx)}, std::move(env), std::move(ris),
                     spec.ris_off_detuning);
    }

    Scene matched_free_space(const Scene &s)
    {
        return s.with_group(Group::E, {});
    }

    // ---------------------------------------------------------------------------------------------

    std::string to_string(SweepAxis a)
    {
        switch (a)
        {
        case SweepAxis::chi_s:
            return "chi_s";
        case SweepAxis::n_s:
            return "n_s";
        case SweepAxis::delta_s:
            return "delta_s";
        case SweepAxis::f_res_e:
            return "f_res_e";
        case SweepAxis::gamma_l_e:
            return "gamma_l_e";
        }
        return "unknown";
    }

    SweepAxis sweep_axis_from_string(const std::string &s)
    {
        for (auto a : {SweepAxis::chi_s, SweepAxis::n_s, SweepAxis::delta_s, SweepAxis::f_res_e, SweepAxis::gamma_l_e})
            if (to_string(a) == s)
                return a;
        throw SchemaError("axis must be one of chi_s, n_s, delta_s, f_res_e, gamma_l_e; got '" + s + "'");
    }

    std::size_t SweepSpec::realizations() const noexcept
    {
        return scenario == Scenario::free_space ? free_space.realizations : enclosure.realizations;
    }

    std::uint64_t SweepSpec::seed() const noexcept
    {
        return scenario == Scenario::free_space ? free_space.seed : enclosure.seed;
    }

    Scene sweep_scene(const SweepSpec &spec, double v, std::size_t realization_index)
    {
        auto as_count = [&](double x) {
            if (!(x >= 0.0) || std::abs(x - std::round(x)) > 1e-9)
                throw DomainError("n_s grid values must be non-negative integers");
            return static_cast<std::size_t>(std::llround(x));
        };
        if (spec.scenario == Scenario::free_space)
        {
            FreeSpaceSpec fs = spec.free_space;
            switch (spec.axis)
            {
            case SweepAxis::chi_s:
                fs.chi_s = v;
                break;
            case SweepAxis::n_s:
                fs.n_s = as_count(v);
                break;
            case SweepAxis::delta_s:
                fs.delta_s = v;
                break;
            default:
                throw DomainError("axis " + to_string(spec.axis) + " needs the enclosure scenario");
            }
            return gen_free_space_scene(fs, realization_index);
        }
        EnclosureSpec es = spec.enclosure;
        switch (spec.axis)
        {
        case SweepAxis::chi_s:
            es.chi_s = v;
            break;
        case SweepAxis::n_s:
            es.n_s = as_count(v);
            break;
        case SweepAxis::delta_s:
            es.delta_s = v;
            break;
        case SweepAxis::f_res_e:
            es.f_res_e = v;
            break;
        case SweepAxis::gamma_l_e:
            es.gamma_l_e = v;
            break;
        }
        return gen_enclosure_scene(es, realization_index);
    }

    namespace
    {
        struct RealizationSets
        {
            CalibrationSet cal;
            CalibrationSet test;
            SisoFit fit;
        };

        RealizationSets draw_sets(const ConfigurableChannel &ch, std::uint64_t seed, std::size_t r,
                                  std::size_t factor, std::size_t test_size)
        {
            const std::size_t n_s = ch.ris_size();
            RealizationSets out;
            const std::size_t n_cal = std::max<std::size_t>(factor * n_s, n_s + 1);
            for (std::uint64_t attempt = 0;; ++attempt)
            {
                auto rng = make_stream(seed, r, StreamPurpose::calibration, attempt);
                out.cal.configs = random_configs(n_cal, n_s, rng);
                out.cal.h.clear();
                for (const auto &c : out.cal.configs)
                    out.cal.h.push_back(ch.evaluate_siso(c));
                out.cal.seed = stream_seed(seed, r, StreamPurpose::calibration, attempt);
                try
                {
                    out.fit = fit_cascaded_siso(out.cal);
                    break;
                }
                catch (const RankDeficient &)
                {
                    if (attempt >= 32)
                        throw;
                }
            }
            auto rng = make_stream(seed, r, StreamPurpose::test);
            out.test.configs = random_configs(test_size, n_s, rng);
            for (const auto &c : out.test.configs)
                out.test.h.push_back(ch.evaluate_siso(c));
            out.test.seed = stream_seed(seed, r, StreamPurpose::test);
            return out;
        }
    } // namespace

    std::pair<CalibrationSet, CalibrationSet> realization_sets(const Scene &s, std::uint64_t seed,
                                                               std::size_t realization_index,
                                                               std::size_t calibration_factor, std::size_t test_size)
    {
        const ConfigurableChannel ch(s, s.constants().f0);
        RealizationSets rs = draw_sets(ch, seed, realization_index, calibration_factor, test_size);
        return {std::move(rs.cal), std::move(rs.test)};
    }

    LinearityReport realization_zeta(const Scene &s, std::uint64_t seed, std::size_t realization_index,
                                     std::size_t calibration_factor, std::size_t test_size)
    {
        const ConfigurableChannel ch(s, s.constants().f0);
        const RealizationSets rs = draw_sets(ch, seed, realization_index, calibration_factor, test_size);
        LinearityReport rep = linearity_metric(rs.fit, rs.test);
        rep.n_calibration = rs.cal.size();
        return rep;
    }

    namespace
    {
        struct TaskResult
        {
            double zeta_db = nan;
            double fs_zeta_db = nan;
            double tau = nan;
            bool failed = false;
        };

        double zeta_or_nan(const Scene &s, const SweepSpec &spec, std::size_t r, bool &failed)
        {
            try
            {
                const LinearityReport rep = realization_zeta(s, spec.seed(), r, spec.calibration_factor, spec.test_size);
                if (rep.degenerate)
                    failed = true;
                return rep.zeta_db;
            }
            catch (const NumericError &)
            {
                failed = true;
                return nan;
            }
        }

        TaskResult run_task(const SweepSpec &spec, double v, std::size_t r)
        {
            TaskResult out;
            Scene scene;
            try
            {
                scene = sweep_scene(spec, v, r);
            }
            catch (const NumericError &)
            {
                out.failed = true;
                return out;
            }
            if (spec.compute_zeta)
            {
                out.zeta_db = zeta_or_nan(scene, spec, r, out.failed);
                if (spec.matched_free_space && scene.count(Group::E) > 0)
                {
                    bool dummy = false;
                    out.fs_zeta_db = zeta_or_nan(matched_free_space(scene), spec, r, dummy);
                }
            }
            if (spec.tau.enabled)
            {
                try
                {
                    auto rng = make_stream(spec.seed(), r, StreamPurpose::impulse_config);
                    const RisConfiguration c = random_configs(1, scene.count(Group::S), rng).front();
                    ImpulseResponse ir = impulse_response(scene, c, spec.tau.impulse);
                    if (spec.tau.causal_half)
                        ir.power.resize(ir.power.size() / 2);
                    out.tau = reverberation_time(ir.power, ir.dt, spec.tau.reverb).tau;
                }
                catch (const NumericError &)
                {
                    out.tau = nan; // no decay, or the solver broke down at some frequency
                }
            }
            return out;
        }

        void mean_sd(const std::vector<double> &v, double &mean, double &sd, std::size_t &n)
        {
            double s = 0.0;
            n = 0;
            for (double x : v)
                if (std::isfinite(x))
                    s += x, ++n;
            if (n == 0)
            {
                mean = nan;
                sd = nan;
                return;
            }
            mean = s / static_cast<double>(n);
            double q = 0.0;
            for (double x : v)
                if (std::isfinite(x))
                    q += (x - mean) * (x - mean);
            sd = std::sqrt(q / static_cast<double>(n));
        }
    } // namespace

    SweepResult run_sweep(const SweepSpec &spec, std::size_t workers)
    {
        if (spec.grid.empty())
            throw DomainError("sweep grid is empty");
        const std::size_t reals = spec.realizations();
        if (reals == 0)
            throw DomainError("sweep needs at least one realization");
        const std::size_t n_tasks = spec.grid.size() * reals;
        std::vector<TaskResult> results(n_tasks);

        std::atomic<std::size_t> next{0};
        std::mutex err_mutex;
        std::size_t err_index = n_tasks;
        std::exception_ptr err;

        auto worker = [&]() {
            for (;;)
            {
                const std::size_t i = next.fetch_add(1);
                if (i >= n_tasks)
                    return;
                try
                {
                    results[i] = run_task(spec, spec.grid[i / reals], i % reals);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (i < err_index)
                        err_index = i, err = std::current_exception();
                }
            }
        };
        workers = std::max<std::size_t>(1, std::min(workers, n_tasks));
        if (workers == 1)
            worker();
        else
        {
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < workers; ++w)
                pool.emplace_back(worker);
        }
        if (err)
            std::rethrow_exception(err);

        SweepResult out;
        out.axis = spec.axis;
        out.seed = spec.seed();
        out.realizations = reals;
        out.has_zeta = spec.compute_zeta;
        out.has_tau = spec.tau.enabled;
        out.has_free_space = spec.compute_zeta && spec.matched_free_space;
        for (std::size_t g = 0; g < spec.grid.size(); ++g)
        {
            SweepPoint p;
            p.axis_value = spec.grid[g];
            std::size_t degenerate = 0;
            for (std::size_t r = 0; r < reals; ++r)
            {
                const TaskResult &t = results[g * reals + r];
                p.zeta_db.push_back(t.failed ? nan : t.zeta_db);
                p.tau.push_back(t.tau);
                p.free_space_zeta_db.push_back(t.fs_zeta_db);
                if (t.failed)
                {
                    ++p.n_failed;
                    if (std::isinf(t.zeta_db) && t.zeta_db > 0)
                        ++degenerate;
                }
            }
            std::size_t n = 0;
            mean_sd(p.zeta_db, p.mean_zeta_db, p.sd_zeta_db, n);
            p.n_ok = spec.compute_zeta ? n : 0;
            if (spec.compute_zeta && n == 0 && degenerate > 0)
            {
                // Every realization was exactly affine
                p.mean_zeta_db = std::numeric_limits<double>::infinity();
                p.sd_zeta_db = 0.0;
            }
            double sd_unused = 0.0;
            mean_sd(p.tau, p.mean_tau, sd_unused, p.n_tau);
            std::size_t n_fs = 0;
            mean_sd(p.free_space_zeta_db, p.mean_free_space_zeta_db, sd_unused, n_fs);
            out.points.push_back(std::move(p));
        }
        return out;
    }

    SweepResult sweep_zeta(const SweepSpec &spec, std::size_t workers)
    {
        SweepSpec s = spec;
        s.compute_zeta = true;
        return run_sweep(s, workers);
    }

    SweepResult sweep_tau(const SweepSpec &spec, std::size_t workers)
    {
        SweepSpec s = spec;
        s.tau.enabled = true;
        return run_sweep(s, workers);
    }

    void write_sweep_csv(std::ostream &os, const SweepResult &r)
    {
        os << "# physfadkit.sweep/1 axis=" << to_string(r.axis) << " seed=" << r.seed
           << " realizations=" << r.realizations << '\n';
        os << "axis_value,mean_zeta_db,sd_zeta_db,n_ok,n_failed";
        if (r.has_tau)
            os << ",mean_tau,n_tau";
        if (r.has_free_space)
            os << ",mean_free_space_zeta_db";
        os << '\n';
        const auto old = os.precision(17);
        for (const auto &p : r.points)
        {
            os << p.axis_value << ',' << p.mean_zeta_db << ',' << p.sd_zeta_db << ',' << p.n_ok << ',' << p.n_failed;
            if (r.has_tau)
                os << ',' << p.mean_tau << ',' << p.n_tau;
            if (r.has_free_space)
                os << ',' << p.mean_free_space_zeta_db;
            os << '\n';
        }
        os.precision(old);
    }

    double spearman(const std::vector<double> &x, const std::vector<double> &y)
    {
        if (x.size() != y.size() || x.size() < 2)
            throw LengthMismatch("spearman needs two equally long samples of size >= 2");
        auto ranks = [](const std::vector<double> &v) {
            const std::size_t n = v.size();
            std::vector<std::size_t> idx(n);
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
            std::vector<double> r(n);
            for (std::size_t i = 0; i < n;)
            {
                std::size_t j = i;
                while (j + 1 < n && v[idx[j + 1]] == v[idx[i]])
                    ++j;
                const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
                for (std::size_t k = i; k <= j; ++k)
                    r[idx[k]] = avg;
                i = j + 1;
            }
            return r;
        };
        const auto rx = ranks(x), ry = ranks(y);
        const double n = static_cast<double>(x.size());
        const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
        const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
        double sxy = 0.0, sxx = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i)
        {
            sxy += (rx[i] - mx) * (ry[i] - my);
            sxx += (rx[i] - mx) * (rx[i] - mx);
            syy += (ry[i] - my) * (ry[i] - my);
        }
        if (sxx == 0.0 || syy == 0.0)
            return 0.0;
        return sxy / std::sqrt(sxx * syy);
    }

} // namespace physfadkit
