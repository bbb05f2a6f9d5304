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

#include "physfadkit/cli.hpp"
#include "physfadkit/analysis.hpp"
#include "physfadkit/channels.hpp"
#include "physfadkit/errors.hpp"
#include "physfadkit/experiments.hpp"
#include "physfadkit/io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace physfadkit
{
    namespace fs = std::filesystem;

    std::size_t resolve_workers(long requested)
    {
        if (requested > 0)
            return static_cast<std::size_t>(requested);
        if (const char *env = std::getenv("PHYSFADKIT_WORKERS"))
        {
            char *end = nullptr;
            const long v = std::strtol(env, &end, 10);
            if (end == env || *end != '\0' || v < 1)
                throw DomainError("PHYSFADKIT_WORKERS must be a positive integer, got '" + std::string(env) + "'");
            return static_cast<std::size_t>(v);
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }

    namespace
    {
        struct Common
        {
            std::string out_dir = ".";
            std::uint64_t seed = 0;
            bool seed_given = false;
        };

        class Outputs
        {
        public:
            Outputs(const std::string &dir, std::string command) : dir_(dir), command_(std::move(command))
            {
                std::error_code ec;
                fs::create_directories(dir_, ec);
                if (ec)
                    throw DomainError("cannot create output directory " + dir_.string() + ": " + ec.message());
            }

            std::ofstream open(const std::string &name, const std::string &schema_line)
            {
                const fs::path p = dir_ / name;
                std::ofstream os(p, std::ios::binary);
                if (!os)
                    throw DomainError("cannot write " + p.string());
                os << "# " << schema_line << '\n';
                os.precision(17);
                files_.push_back(p.string());
                return os;
            }

            void write_manifest(const std::string &spec_hash, std::uint64_t seed, bool default_geometry = false)
            {
                RunManifest m;
                m.command = command_;
                m.spec_hash = spec_hash;
                m.seed = seed;
                m.timestamp = utc_timestamp();
                m.outputs = files_;
                m.default_geometry = default_geometry;
                const fs::path p = dir_ / (command_ + ".manifest.json");
                std::ofstream os(p, std::ios::binary);
                if (!os)
                    throw DomainError("cannot write " + p.string());
                os << manifest_to_json(m);
            }

            void track(const fs::path &p) { files_.push_back(p.string()); }
            const std::vector<std::string> &files() const noexcept { return files_; }

        private:
            fs::path dir_;
            std::string command_;
            std::vector<std::string> files_;
        };

        std::string flag(bool b) { return b ? "yes" : "no"; }

        RisConfiguration parse_config(const std::string &bits, std::size_t n_s)
        {
            const RisConfiguration c = bits.empty() ? RisConfiguration::all_on(n_s) : RisConfiguration::from_string(bits);
            if (c.size() != n_s)
                throw LengthMismatch("config length " + std::to_string(c.size()) + " does not match the " +
                                     std::to_string(n_s) + " RIS elements of the scene");
            return c;
        }

        double resolve_frequency(const std::optional<double> &f, const Scene &s)
        {
            const double v = f ? *f : s.constants().f0;
            if (!(v > 0.0) || !std::isfinite(v))
                throw DomainError("frequency must be positive and finite");
            return v;
        }

        // ---- channel ------------------------------------------------------------------------

        struct ChannelArgs
        {
            std::string scene;
            std::string config;
            std::optional<double> f;
        };

        void cmd_channel(const ChannelArgs &a, const Common &c, std::ostream &out)
        {
            const std::string text = read_text_file(a.scene);
            const Scene s = scene_from_json(text);
            const double f = resolve_frequency(a.f, s);
            const RisConfiguration cfg = parse_config(a.config, s.count(Group::S));
            const ChannelMatrix h = channel_exact(s, cfg, f);

            Outputs o(c.out_dir, "channel");
            auto os = o.open("channel.csv", "physfadkit.channel/1 f=" + std::to_string(f) + " config=" + cfg.to_string());
            os << "rx,tx,re_h,im_h\n";
            for (std::size_t i = 0; i < h.h.rows(); ++i)
                for (std::size_t j = 0; j < h.h.cols(); ++j)
                    os << i << ',' << j << ',' << h.h(i, j).real() << ',' << h.h(i, j).imag() << '\n';
            os.close();
            o.write_manifest(hex64(fnv1a64(text)), c.seed);
            out << "wrote " << o.files().front() << '\n';
        }

        // ---- zeta ---------------------------------------------------------------------------

        struct ZetaArgs
        {
            std::string spec;
            std::string preset;
            long workers = 0;
            std::optional<std::size_t> realizations;
        };

        void cmd_zeta(const ZetaArgs &a, const Common &c, std::ostream &out)
        {
            if (a.spec.empty() == a.preset.empty())
                throw DomainError("give exactly one of --spec or --preset");
            SweepSpec spec;
            std::string hash_source;
            bool default_geometry = true;
            if (!a.spec.empty())
            {
                hash_source = read_text_file(a.spec);
                spec = sweep_spec_from_json(hash_source);
                default_geometry = hash_source.find("\"polygon\"") == std::string::npos;
            }
            else
            {
                spec = preset(a.preset);
            }
            if (c.seed_given)
                spec.free_space.seed = spec.enclosure.seed = c.seed;
            if (a.realizations)
                spec.free_space.realizations = spec.enclosure.realizations = *a.realizations;
            if (a.spec.empty())
                hash_source = sweep_spec_to_json(spec);
            default_geometry = default_geometry && spec.scenario == Scenario::enclosure;

            const SweepResult r = run_sweep(spec, resolve_workers(a.workers));

            Outputs o(c.out_dir, "zeta");
            auto os = o.open("zeta.csv", "physfadkit.sweep/1 axis=" + to_string(r.axis) + " seed=" +
                                             std::to_string(r.seed) + " realizations=" + std::to_string(r.realizations));
            // write_sweep_csv emits its own schema line, so skip the first line it produces
            std::ostringstream body;
            write_sweep_csv(body, r);
            const std::string b = body.str();
            os << b.substr(b.find('\n') + 1);
            os.close();
            o.write_manifest(hex64(fnv1a64(hash_source)), spec.seed(), default_geometry);
            out << b;
        }

        // ---- bounds -------------------------------------------------------------------------

        struct BoundsArgs
        {
            std::string scene;
            std::optional<double> f;
        };

        struct BoundRow
        {
            std::string quantity;
            double bound = std::nan("");
            double measured = std::nan("");
            std::string satisfied;
        };

        void group_bounds(const Scene &s, Group g, const std::string &name, double f, std::vector<BoundRow> &rows)
        {
            if (s.count(g) == 0)
                return;
            const InteractionMatrix im = assemble_interaction_matrix(s, f);
            const ComplexMatrix w = im.block(g, g);
            std::vector<cplx> alpha;
            for (std::size_t i = 0; i < w.rows(); ++i)
                alpha.push_back(1.0 / w(i, i));
            ComplexMatrix m = w;
            for (std::size_t i = 0; i < m.rows(); ++i)
                m(i, i) = 0.0;
            const double measured_c = spectral_norm(scale_rows(alpha, m));

            CouplingConstant cc;
            try
            {
                cc = coupling_constant(s, g, f);
            }
            catch (const HeterogeneousAlpha &)
            {
                rows.push_back({"C_" + name, std::nan(""), measured_c, "heterogeneous"});
                return;
            }
            const bool conv = cc.convergent();
            rows.push_back({"C_" + name, cc.value, measured_c, flag(measured_c <= cc.value * (1.0 + 1e-12))});

            const ComplexMatrix w_inv = invert(w);
            const double w_norm = spectral_norm(w);
            for (std::size_t k = 1; k <= 10; ++k)
            {
                BoundRow r;
                r.quantity = "series_" + name + "_K" + std::to_string(k);
                try
                {
                    const ComplexMatrix sk = antenna_self_inverse_series(s, f, SeriesTruncation::fixed(k), g);
                    r.measured = spectral_norm(sk - w_inv) * w_norm;
                }
                catch (const DivergenceDetected &)
                {
                    r.measured = std::numeric_limits<double>::infinity();
                }
                if (conv)
                {
                    r.bound = truncation_error_bound(cc.value, k);
                    r.satisfied = flag(r.measured <= r.bound * (1.0 + 1e-9) + 1e-14);
                }
                else
                {
                    r.satisfied = "not_convergent";
                }
                rows.push_back(r);
            }
        }

        void cmd_bounds(const BoundsArgs &a, const Common &c, std::ostream &out)
        {
            const std::string text = read_text_file(a.scene);
            const Scene s = scene_from_json(text);
            const double f = resolve_frequency(a.f, s);

            std::vector<BoundRow> rows;
            group_bounds(s, Group::T, "T", f, rows);
            group_bounds(s, Group::R, "R", f, rows);
            group_bounds(s, Group::S, "S", f, rows);
            if (s.count(Group::T) > 0 && s.count(Group::R) > 0)
            {
                BoundRow r;
                r.quantity = "mimo_ratio";
                r.measured = spectral_norm(mimo_ratio(s, f));
                try
                {
                    r.bound = mimo_ratio_bound(s, f);
                    r.satisfied = flag(r.measured <= r.bound * (1.0 + 1e-9));
                }
                catch (const NotConvergent &)
                {
                    r.satisfied = "not_convergent";
                }
                catch (const HeterogeneousAlpha &)
                {
                    r.satisfied = "heterogeneous";
                }
                rows.push_back(r);
            }

            Outputs o(c.out_dir, "bounds");
            auto os = o.open("bounds.csv", "physfadkit.bounds/1 f=" + std::to_string(f));
            os << "quantity,bound,measured,satisfied\n";
            for (const auto &r : rows)
                os << r.quantity << ',' << r.bound << ',' << r.measured << ',' << r.satisfied << '\n';
            os.close();
            o.write_manifest(hex64(fnv1a64(text)), c.seed);
            out << "wrote " << o.files().front() << '\n';
        }

        // ---- series-compare -----------------------------------------------------------------

        struct SeriesArgs
        {
            std::string scene;
            std::string config;
            std::optional<double> f;
            std::size_t k_max = 10;
        };

        void cmd_series_compare(const SeriesArgs &a, const Common &c, std::ostream &out)
        {
            if (a.k_max < 1)
                throw DomainError("--kmax must be at least 1");
            const std::string text = read_text_file(a.scene);
            const Scene s = scene_from_json(text);
            const double f = resolve_frequency(a.f, s);
            const RisConfiguration cfg = parse_config(a.config, s.count(Group::S));
            const ComplexMatrix exact = channel_exact(s, cfg, f).h;
            const double scale = exact.frobenius();

            const auto rho = spectral_radius_estimate(generic_series_ratio(s, cfg, f), 64);
            const bool divergent = !(rho.value < 1.0);

            Outputs o(c.out_dir, "series_compare");
            auto os = o.open("series_compare.csv", "physfadkit.series_compare/1 f=" + std::to_string(f) +
                                                       " config=" + cfg.to_string());
            os << "k,residual,spectral_radius,divergent\n";
            // Row k keeps k RIS interactions and k terms of the RIS self-coupling series, so k = 1 is
            // the cascaded model
            for (std::size_t k = 1; k <= a.k_max; ++k)
            {
                double res = std::numeric_limits<double>::infinity();
                try
                {
                    const ComplexMatrix h = generic_series_rt(s, cfg, f, SeriesTruncation::fixed(k + 1),
                                                              SeriesTruncation::fixed(k))
                                                .h;
                    res = (h - exact).frobenius() / scale;
                }
                catch (const DivergenceDetected &)
                {
                }
                os << k << ',' << res << ',' << rho.value << ',' << (divergent ? 1 : 0) << '\n';
            }
            os.close();
            o.write_manifest(hex64(fnv1a64(text)), c.seed);
            out << "wrote " << o.files().front() << '\n';
        }

        // ---- scene / calibration ------------------------------------------------------------

        struct SceneArgs
        {
            std::string spec;
            std::string preset;
            double axis_value = std::nan("");
            std::size_t realization = 0;
        };

        SweepSpec spec_for(const SceneArgs &a, const Common &c, std::string &hash_source)
        {
            if (a.spec.empty() == a.preset.empty())
                throw DomainError("give exactly one of --spec or --preset");
            SweepSpec spec;
            if (!a.spec.empty())
            {
                hash_source = read_text_file(a.spec);
                spec = sweep_spec_from_json(hash_source);
            }
            else
            {
                spec = preset(a.preset);
            }
            if (c.seed_given)
                spec.free_space.seed = spec.enclosure.seed = c.seed;
            if (a.spec.empty())
                hash_source = sweep_spec_to_json(spec);
            return spec;
        }

        void cmd_scene(const SceneArgs &a, const Common &c, std::ostream &out)
        {
            std::string hash_source;
            const SweepSpec spec = spec_for(a, c, hash_source);
            const double v = std::isnan(a.axis_value) ? spec.grid.front() : a.axis_value;
            const Scene s = sweep_scene(spec, v, a.realization);
            Outputs o(c.out_dir, "scene");
            const fs::path p = fs::path(c.out_dir) / "scene.json";
            write_scene_file(p, s);
            o.track(p);
            o.write_manifest(hex64(fnv1a64(hash_source)), spec.seed());
            out << "wrote " << p.string() << " (" << s.size() << " dipoles)\n";
        }

        void cmd_calibration(const SceneArgs &a, const Common &c, std::ostream &out)
        {
            std::string hash_source;
            const SweepSpec spec = spec_for(a, c, hash_source);
            const double v = std::isnan(a.axis_value) ? spec.grid.front() : a.axis_value;
            const Scene s = sweep_scene(spec, v, a.realization);
            const auto [cal, test] =
                realization_sets(s, spec.seed(), a.realization, spec.calibration_factor, spec.test_size);
            Outputs o(c.out_dir, "calibration");
            for (const auto &[name, set] : {std::pair{"calibration.csv", &cal}, std::pair{"test.csv", &test}})
            {
                const fs::path p = fs::path(c.out_dir) / name;
                std::ofstream os(p, std::ios::binary);
                if (!os)
                    throw DomainError("cannot write " + p.string());
                write_calibration_csv(os, *set);
                o.track(p);
            }
            o.write_manifest(hex64(fnv1a64(hash_source)), spec.seed());
            const LinearityReport rep = linearity_metric(cal, test);
            out << "zeta_db " << rep.zeta_db << '\n';
        }
    } // namespace

    int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"Coupled-dipole channel simulation toolkit", "physfadkit"};
        app.require_subcommand(1);
        app.set_version_flag("--version", library_version);

        Common common;
        auto add_common = [&](CLI::App *sub) {
            sub->add_option("--out-dir", common.out_dir, "Directory for CSV outputs and the run manifest");
            sub->add_option("--seed", common.seed, "Base seed (default 0)");
        };

        ChannelArgs ch;
        auto *channel = app.add_subcommand("channel", "Exact channel matrix of a scene for one RIS configuration");
        channel->add_option("--scene", ch.scene, "Scene JSON file")->required();
        channel->add_option("--config", ch.config, "RIS bitstring, one character per element (default all ON)");
        channel->add_option("-f,--frequency", ch.f, "Frequency (default f0)");
        add_common(channel);

        ZetaArgs za;
        auto *zeta = app.add_subcommand("zeta", "Monte-Carlo linearity sweep");
        zeta->add_option("--spec", za.spec, "Sweep spec JSON file");
        zeta->add_option("--preset", za.preset, "Built-in sweep")
            ->check(CLI::IsMember(preset_names()));
        zeta->add_option("--workers", za.workers, "Worker threads (default PHYSFADKIT_WORKERS or all cores)");
        zeta->add_option("--realizations", za.realizations, "Override the realization count");
        add_common(zeta);

        BoundsArgs ba;
        auto *bounds = app.add_subcommand("bounds", "Coupling constants and truncation bounds against measured values");
        bounds->add_option("--scene", ba.scene, "Scene JSON file")->required();
        bounds->add_option("-f,--frequency", ba.f, "Frequency (default f0)");
        add_common(bounds);

        SeriesArgs sa;
        auto *series = app.add_subcommand("series-compare", "Residual of truncated series against the exact channel");
        series->add_option("--scene", sa.scene, "Scene JSON file")->required();
        series->add_option("--config", sa.config, "RIS bitstring (default all ON)");
        series->add_option("-f,--frequency", sa.f, "Frequency (default f0)");
        series->add_option("--kmax", sa.k_max, "Largest number of RIS interactions");
        add_common(series);

        SceneArgs sc;
        auto *scene = app.add_subcommand("scene", "Write one generated scene of a sweep as JSON");
        SceneArgs cb;
        auto *calib = app.add_subcommand("calibration", "Export the calibration and test sets of one realization");
        for (auto [sub, target] : {std::pair{scene, &sc}, std::pair{calib, &cb}})
        {
            sub->add_option("--spec", target->spec, "Sweep spec JSON file");
            sub->add_option("--preset", target->preset, "Built-in sweep")->check(CLI::IsMember(preset_names()));
            sub->add_option("--axis-value", target->axis_value, "Grid value (default first grid point)");
            sub->add_option("--realization", target->realization, "Realization index");
            add_common(sub);
        }

        try
        {
            std::vector<std::string> reversed(args.rbegin(), args.rend());
            app.parse(reversed);
        }
        catch (const CLI::ParseError &e)
        {
            const int code = app.exit(e, out, err);
            return code == 0 ? 0 : 2;
        }

        for (auto *sub : app.get_subcommands())
            if (sub->count("--seed") > 0)
                common.seed_given = true;

        try
        {
            if (channel->parsed())
                cmd_channel(ch, common, out);
            else if (zeta->parsed())
                cmd_zeta(za, common, out);
            else if (bounds->parsed())
                cmd_bounds(ba, common, out);
            else if (series->parsed())
                cmd_series_compare(sa, common, out);
            else if (scene->parsed())
                cmd_scene(sc, common, out);
            else if (calib->parsed())
                cmd_calibration(cb, common, out);
        }
        catch (const InputError &e)
        {
            err << "error: " << e.what() << '\n';
            return 2;
        }
        catch (const NumericError &e)
        {
            err << "numerical failure: " << e.what() << '\n';
            return 3;
        }
        return 0;
    }

} // namespace physfadkit
