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

#include "physfadkit/io.hpp"
#include "physfadkit/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

namespace physfadkit
{
    using nlohmann::json;

    namespace
    {
        // Strict object reader: every key must be known, types are checked on access and all
        // messages carry the dotted path of the offending field.
        class Fields
        {
        public:
            Fields(const json &j, std::string path, std::set<std::string> known) : j_(j), path_(std::move(path))
            {
                if (!j_.is_object())
                    throw SchemaError(where() + " must be an object");
                for (const auto &[key, value] : j_.items())
                    if (!known.contains(key))
                        throw SchemaError("unknown field " + where(key));
            }

            bool has(const std::string &key) const { return j_.contains(key); }
            const json &raw(const std::string &key) const { return j_.at(key); }
            std::string where(const std::string &key = {}) const
            {
                if (key.empty())
                    return path_.empty() ? "document" : path_;
                return path_.empty() ? key : path_ + "." + key;
            }

            double number(const std::string &key, double fallback) const
            {
                if (!has(key))
                    return fallback;
                const json &v = j_.at(key);
                if (!v.is_number())
                    throw SchemaError(where(key) + " must be a number");
                return v.get<double>();
            }

            double required_number(const std::string &key) const
            {
                if (!has(key))
                    throw SchemaError("missing field " + where(key));
                return number(key, 0.0);
            }

            std::uint64_t count(const std::string &key, std::uint64_t fallback) const
            {
                if (!has(key))
                    return fallback;
                const json &v = j_.at(key);
                if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
                    throw SchemaError(where(key) + " must be a non-negative integer");
                return v.get<std::uint64_t>();
            }

            bool boolean(const std::string &key, bool fallback) const
            {
                if (!has(key))
                    return fallback;
                if (!j_.at(key).is_boolean())
                    throw SchemaError(where(key) + " must be true or false");
                return j_.at(key).get<bool>();
            }

            std::string text(const std::string &key, const std::string &fallback) const
            {
                if (!has(key))
                    return fallback;
                if (!j_.at(key).is_string())
                    throw SchemaError(where(key) + " must be a string");
                return j_.at(key).get<std::string>();
            }

        private:
            const json &j_;
            std::string path_;
        };

        json parse(const std::string &text)
        {
            try
            {
                return json::parse(text);
            }
            catch (const json::parse_error &e)
            {
                throw SchemaError(std::string("malformed JSON: ") + e.what());
            }
        }

        void check_schema(const Fields &f, const char *expected)
        {
            const std::string got = f.text("schema", expected);
            if (got != expected)
                throw SchemaError("schema must be '" + std::string(expected) + "', got '" + got + "'");
        }

        json constants_to_json(const PhysicalConstants &pc)
        {
            return {{"c", pc.c}, {"epsilon", pc.epsilon}, {"delta", pc.delta}, {"f0", pc.f0}};
        }

        PhysicalConstants constants_from_json(const json &j, const std::string &path)
        {
            const Fields f(j, path, {"c", "epsilon", "delta", "f0"});
            PhysicalConstants pc;
            pc.c = f.number("c", pc.c);
            pc.epsilon = f.number("epsilon", pc.epsilon);
            pc.delta = f.number("delta", pc.delta);
            pc.f0 = f.number("f0", pc.f0);
            return pc;
        }

        json dipoles_to_json(const std::vector<Dipole> &ds)
        {
            json arr = json::array();
            for (const auto &d : ds)
                arr.push_back({{"x", d.position.x},
                               {"y", d.position.y},
                               {"f_res", d.f_res},
                               {"chi", d.chi},
                               {"gamma_l", d.gamma_l},
                               {"gamma_r", d.gamma_r}});
            return arr;
        }

        std::vector<Dipole> dipoles_from_json(const Fields &parent, const std::string &key)
        {
            std::vector<Dipole> out;
            if (!parent.has(key))
                return out;
            const json &arr = parent.raw(key);
            if (!arr.is_array())
                throw SchemaError(parent.where(key) + " must be an array");
            for (std::size_t i = 0; i < arr.size(); ++i)
            {
                const Fields f(arr[i], parent.where(key) + "[" + std::to_string(i) + "]",
                               {"x", "y", "f_res", "chi", "gamma_l", "gamma_r"});
                Dipole d;
                d.position = {f.required_number("x"), f.required_number("y")};
                d.f_res = f.number("f_res", d.f_res);
                d.chi = f.number("chi", d.chi);
                d.gamma_l = f.number("gamma_l", d.gamma_l);
                d.gamma_r = f.number("gamma_r", d.gamma_r);
                out.push_back(d);
            }
            return out;
        }

        json polygon_to_json(const std::vector<Point> &poly)
        {
            json arr = json::array();
            for (const auto &p : poly)
                arr.push_back(json::array({p.x, p.y}));
            return arr;
        }

        std::vector<Point> polygon_from_json(const json &j, const std::string &path)
        {
            if (!j.is_array())
                throw SchemaError(path + " must be an array of [x, y] pairs");
            std::vector<Point> out;
            for (std::size_t i = 0; i < j.size(); ++i)
            {
                const json &v = j[i];
                if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
                    throw SchemaError(path + "[" + std::to_string(i) + "] must be an [x, y] pair");
                out.push_back({v[0].get<double>(), v[1].get<double>()});
            }
            return out;
        }

        std::vector<double> grid_from_json(const json &j, const std::string &path)
        {
            if (!j.is_array())
                throw SchemaError(path + " must be an array of numbers");
            std::vector<double> out;
            for (std::size_t i = 0; i < j.size(); ++i)
            {
                if (!j[i].is_number())
                    throw SchemaError(path + "[" + std::to_string(i) + "] must be a number");
                out.push_back(j[i].get<double>());
            }
            return out;
        }
    } // namespace

    std::string scene_to_json(const Scene &s)
    {
        const json j = {{"schema", scene_schema},
                        {"constants", constants_to_json(s.constants())},
                        {"ris_off_detuning", s.ris_off_detuning()},
                        {"transmitters", dipoles_to_json(s.group(Group::T))},
                        {"receivers", dipoles_to_json(s.group(Group::R))},
                        {"environment", dipoles_to_json(s.group(Group::E))},
                        {"ris", dipoles_to_json(s.group(Group::S))}};
        return j.dump(2) + "\n";
    }

    Scene scene_from_json(const std::string &text)
    {
        const json j = parse(text);
        const Fields f(j, "", {"schema", "constants", "ris_off_detuning", "transmitters", "receivers", "environment", "ris"});
        check_schema(f, scene_schema);
        const PhysicalConstants pc = f.has("constants") ? constants_from_json(f.raw("constants"), "constants")
                                                        : PhysicalConstants{};
        return Scene(pc, dipoles_from_json(f, "transmitters"), dipoles_from_json(f, "receivers"),
                     dipoles_from_json(f, "environment"), dipoles_from_json(f, "ris"),
                     f.number("ris_off_detuning", 3.0));
    }

    std::string read_text_file(const std::filesystem::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        if (!in)
            throw SchemaError("cannot read file " + p.string());
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    Scene read_scene_file(const std::filesystem::path &p)
    {
        return scene_from_json(read_text_file(p));
    }

    void write_scene_file(const std::filesystem::path &p, const Scene &s)
    {
        std::ofstream out(p, std::ios::binary);
        if (!out)
            throw SchemaError("cannot write file " + p.string());
        out << scene_to_json(s);
    }

    // ---------------------------------------------------------------------------------------------

    std::string sweep_spec_to_json(const SweepSpec &spec)
    {
        const FreeSpaceSpec &fs = spec.free_space;
        const EnclosureSpec &es = spec.enclosure;
        json free_space = {{"constants", constants_to_json(fs.constants)},
                           {"ris_off_detuning", fs.ris_off_detuning},
                           {"n_s", fs.n_s},
                           {"delta_s", fs.delta_s},
                           {"chi_s", fs.chi_s},
                           {"gamma_r_s", fs.gamma_r_s},
                           {"exclusion", fs.exclusion},
                           {"region", json::array({fs.x_min, fs.x_max, fs.y_min, fs.y_max})}};
        json enclosure = {{"constants", constants_to_json(es.constants)},
                          {"ris_off_detuning", es.ris_off_detuning},
                          {"polygon", polygon_to_json(es.polygon)},
                          {"fence_spacing", es.fence_spacing},
                          {"fence_layers", es.fence_layers},
                          {"layer_gap", es.layer_gap},
                          {"n_interior", es.n_interior},
                          {"clearance", es.clearance},
                          {"f_res_e", es.f_res_e},
                          {"chi_e", es.chi_e},
                          {"gamma_l_e", es.gamma_l_e},
                          {"n_s", es.n_s},
                          {"delta_s", es.delta_s},
                          {"chi_s", es.chi_s},
                          {"gamma_r_s", es.gamma_r_s},
                          {"ris_edge", es.ris_edge}};
        if (es.interior_seed)
            enclosure["interior_seed"] = *es.interior_seed;
        if (es.gamma_r_e)
            enclosure["gamma_r_e"] = *es.gamma_r_e;

        const TauOptions &t = spec.tau;
        json tau = {{"enabled", t.enabled},
                    {"f_lo", t.impulse.f_lo},
                    {"f_hi", t.impulse.f_hi},
                    {"n_f", t.impulse.n_f},
                    {"window", t.impulse.window == SpectralWindow::hann ? "hann" : "rectangular"},
                    {"window_db", t.reverb.window_db},
                    {"smoothing", t.reverb.smoothing},
                    {"min_samples", t.reverb.min_samples},
                    {"causal_half", t.causal_half}};

        const json j = {{"schema", sweep_spec_schema},
                        {"scenario", spec.scenario == Scenario::free_space ? "free_space" : "enclosure"},
                        {"axis", to_string(spec.axis)},
                        {"grid", spec.grid},
                        {"realizations", spec.realizations()},
                        {"seed", spec.seed()},
                        {"calibration_factor", spec.calibration_factor},
                        {"test_size", spec.test_size},
                        {"compute_zeta", spec.compute_zeta},
                        {"matched_free_space", spec.matched_free_space},
                        {"tau", tau},
                        {"free_space", free_space},
                        {"enclosure", enclosure}};
        return j.dump(2) + "\n";
    }

    SweepSpec sweep_spec_from_json(const std::string &text)
    {
        const json j = parse(text);
        const Fields f(j, "",
                       {"schema", "scenario", "axis", "grid", "realizations", "seed", "calibration_factor", "test_size",
                        "compute_zeta", "matched_free_space", "tau", "free_space", "enclosure"});
        check_schema(f, sweep_spec_schema);

        SweepSpec spec;
        const std::string scenario = f.text("scenario", "free_space");
        if (scenario == "free_space")
            spec.scenario = Scenario::free_space;
        else if (scenario == "enclosure")
            spec.scenario = Scenario::enclosure;
        else
            throw SchemaError("scenario must be 'free_space' or 'enclosure', got '" + scenario + "'");
        spec.axis = sweep_axis_from_string(f.text("axis", "n_s"));
        if (!f.has("grid"))
            throw SchemaError("missing field grid");
        spec.grid = grid_from_json(f.raw("grid"), "grid");
        spec.calibration_factor = f.count("calibration_factor", spec.calibration_factor);
        spec.test_size = f.count("test_size", spec.test_size);
        spec.compute_zeta = f.boolean("compute_zeta", spec.compute_zeta);
        spec.matched_free_space = f.boolean("matched_free_space", spec.matched_free_space);

        if (f.has("free_space"))
        {
            const Fields g(f.raw("free_space"), "free_space",
                           {"constants", "ris_off_detuning", "n_s", "delta_s", "chi_s", "gamma_r_s", "exclusion", "region"});
            FreeSpaceSpec &fs = spec.free_space;
            if (g.has("constants"))
                fs.constants = constants_from_json(g.raw("constants"), "free_space.constants");
            fs.ris_off_detuning = g.number("ris_off_detuning", fs.ris_off_detuning);
            fs.n_s = g.count("n_s", fs.n_s);
            fs.delta_s = g.number("delta_s", fs.delta_s);
            fs.chi_s = g.number("chi_s", fs.chi_s);
            fs.gamma_r_s = g.number("gamma_r_s", fs.gamma_r_s);
            fs.exclusion = g.number("exclusion", fs.exclusion);
            if (g.has("region"))
            {
                const auto r = grid_from_json(g.raw("region"), "free_space.region");
                if (r.size() != 4)
                    throw SchemaError("free_space.region must be [x_min, x_max, y_min, y_max]");
                fs.x_min = r[0], fs.x_max = r[1], fs.y_min = r[2], fs.y_max = r[3];
            }
        }
        if (f.has("enclosure"))
        {
            const Fields g(f.raw("enclosure"), "enclosure",
                           {"constants", "ris_off_detuning", "polygon", "fence_spacing", "fence_layers", "layer_gap",
                            "n_interior", "interior_seed", "clearance", "f_res_e", "chi_e", "gamma_l_e", "gamma_r_e",
                            "n_s", "delta_s", "chi_s", "gamma_r_s", "ris_edge"});
            EnclosureSpec &es = spec.enclosure;
            if (g.has("constants"))
                es.constants = constants_from_json(g.raw("constants"), "enclosure.constants");
            es.ris_off_detuning = g.number("ris_off_detuning", es.ris_off_detuning);
            if (g.has("polygon"))
                es.polygon = polygon_from_json(g.raw("polygon"), "enclosure.polygon");
            es.fence_spacing = g.number("fence_spacing", es.fence_spacing);
            es.fence_layers = g.count("fence_layers", es.fence_layers);
            es.layer_gap = g.number("layer_gap", es.layer_gap);
            es.n_interior = g.count("n_interior", es.n_interior);
            if (g.has("interior_seed"))
                es.interior_seed = g.count("interior_seed", 0);
            es.clearance = g.number("clearance", es.clearance);
            es.f_res_e = g.number("f_res_e", es.f_res_e);
            es.chi_e = g.number("chi_e", es.chi_e);
            es.gamma_l_e = g.number("gamma_l_e", es.gamma_l_e);
            if (g.has("gamma_r_e"))
                es.gamma_r_e = g.number("gamma_r_e", 0.0);
            es.n_s = g.count("n_s", es.n_s);
            es.delta_s = g.number("delta_s", es.delta_s);
            es.chi_s = g.number("chi_s", es.chi_s);
            es.gamma_r_s = g.number("gamma_r_s", es.gamma_r_s);
            es.ris_edge = g.count("ris_edge", es.ris_edge);
        }
        if (f.has("tau"))
        {
            const Fields g(f.raw("tau"), "tau",
                           {"enabled", "f_lo", "f_hi", "n_f", "window", "window_db", "smoothing", "min_samples",
                            "causal_half"});
            TauOptions &t = spec.tau;
            t.enabled = g.boolean("enabled", t.enabled);
            t.impulse.f_lo = g.number("f_lo", t.impulse.f_lo);
            t.impulse.f_hi = g.number("f_hi", t.impulse.f_hi);
            t.impulse.n_f = g.count("n_f", t.impulse.n_f);
            const std::string w = g.text("window", "hann");
            if (w == "hann")
                t.impulse.window = SpectralWindow::hann;
            else if (w == "rectangular")
                t.impulse.window = SpectralWindow::rectangular;
            else
                throw SchemaError("tau.window must be 'hann' or 'rectangular', got '" + w + "'");
            t.reverb.window_db = g.number("window_db", t.reverb.window_db);
            t.reverb.smoothing = g.count("smoothing", t.reverb.smoothing);
            t.reverb.min_samples = g.count("min_samples", t.reverb.min_samples);
            t.causal_half = g.boolean("causal_half", t.causal_half);
        }

        const std::uint64_t reals = f.count("realizations", 100);
        const std::uint64_t seed = f.count("seed", 0);
        spec.free_space.realizations = spec.enclosure.realizations = reals;
        spec.free_space.seed = spec.enclosure.seed = seed;
        spec.tau.reverb.f0 = spec.scenario == Scenario::free_space ? spec.free_space.constants.f0
                                                                    : spec.enclosure.constants.f0;
        return spec;
    }

    SweepSpec read_sweep_spec_file(const std::filesystem::path &p)
    {
        return sweep_spec_from_json(read_text_file(p));
    }

    std::vector<std::string> preset_names()
    {
        return {"fig2a", "fig2b", "fig2c", "fig4", "absorption"};
    }

    SweepSpec preset(const std::string &name)
    {
        SweepSpec s;
        if (name == "fig2a" || name == "fig2b" || name == "fig2c")
        {
            s.scenario = Scenario::free_space;
            s.free_space.chi_s = 0.25;
            if (name == "fig2a")
            {
                s.axis = SweepAxis::n_s;
                s.grid = {1, 2, 4, 8, 16, 32};
            }
            else if (name == "fig2b")
            {
                s.axis = SweepAxis::delta_s;
                s.grid = {0.3, 0.5, 0.8, 1.2};
            }
            else
            {
                s.axis = SweepAxis::chi_s;
                s.grid = {0.25, 0.5, 0.75, 1.0};
            }
            return s;
        }
        if (name == "fig4" || name == "absorption")
        {
            s.scenario = Scenario::enclosure;
            s.matched_free_space = true;
            s.tau.enabled = true;
            if (name == "fig4")
            {
                s.axis = SweepAxis::f_res_e;
                s.grid = {1.5, 2, 3, 5, 8};
            }
            else
            {
                s.axis = SweepAxis::gamma_l_e;
                s.grid = {0, 0.3, 0.8, 2};
            }
            return s;
        }
        std::string known;
        for (const auto &n : preset_names())
            known += (known.empty() ? "" : ", ") + n;
        throw SchemaError("unknown preset '" + name + "' (known: " + known + ")");
    }

    // ---------------------------------------------------------------------------------------------

    std::uint64_t fnv1a64(const std::string &bytes) noexcept
    {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char c : bytes)
        {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        return h;
    }

    std::string hex64(std::uint64_t v)
    {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
        return buf;
    }

    std::string utc_timestamp()
    {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        std::tm tm{};
        gmtime_r(&now, &tm);
        char buf[32];
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return buf;
    }

    std::string manifest_to_json(const RunManifest &m)
    {
        const json j = {{"schema", manifest_schema},
                        {"command", m.command},
                        {"spec_hash", m.spec_hash},
                        {"seed", m.seed},
                        {"timestamp", m.timestamp},
                        {"version", m.version},
                        {"outputs", m.outputs},
                        {"default_enclosure_geometry", m.default_geometry}};
        return j.dump(2) + "\n";
    }

} // namespace physfadkit
