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
#include "physfadkit/cli.hpp"
#include "physfadkit/io.hpp"
#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

using namespace physfadkit;
using testsupport::dipole_at;
namespace fs = std::filesystem;

namespace
{
    struct TempDir
    {
        fs::path path;
        TempDir()
        {
            static int counter = 0;
            path = fs::temp_directory_path() /
                   ("physfadkit_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
            fs::create_directories(path);
        }
        ~TempDir()
        {
            std::error_code ec;
            fs::remove_all(path, ec);
        }
        std::string operator/(const std::string &name) const { return (path / name).string(); }
    };

    struct Run
    {
        int code;
        std::string out, err;
    };

    Run run(std::vector<std::string> args)
    {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return {code, out.str(), err.str()};
    }

    std::vector<std::string> lines(const std::string &path)
    {
        std::ifstream is(path);
        std::vector<std::string> v;
        for (std::string l; std::getline(is, l);)
            v.push_back(l);
        return v;
    }

    std::vector<std::string> split(const std::string &line)
    {
        std::vector<std::string> v;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');)
            v.push_back(cell);
        return v;
    }

    Scene ris_scene()
    {
        std::vector<Dipole> ris;
        for (int i = 0; i < 4; ++i)
            ris.push_back(dipole_at(-0.75 + 0.5 * i, 0.0, 0.6));
        return Scene({}, {dipole_at(-3, 4)}, {dipole_at(2.5, 3.5)}, {dipole_at(0, 2, 0.7, 1.5)}, ris);
    }
} // namespace

TEST_CASE("argument errors", "[cli]")
{
    CHECK(run({}).code == 2);
    CHECK(run({"nonsense"}).code == 2);
    CHECK(run({"channel"}).code == 2); // --scene is required
    CHECK(run({"zeta", "--preset", "fig99"}).code == 2);
    CHECK(run({"--help"}).code == 0);
    const Run v = run({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find(library_version) != std::string::npos);

    TempDir d;
    const Run missing = run({"channel", "--scene", d / "nope.json", "--out-dir", d.path.string()});
    CHECK(missing.code == 2);
    CHECK_FALSE(missing.err.empty());
    CHECK(run({"zeta", "--out-dir", d.path.string()}).code == 2); // neither --spec nor --preset
}

TEST_CASE("channel command", "[cli]")
{
    TempDir d;
    const Scene s = ris_scene();
    write_scene_file(d / "scene.json", s);
    const Run r = run({"channel", "--scene", d / "scene.json", "--config", "0110", "--out-dir", d.path.string()});
    REQUIRE(r.code == 0);
    const auto l = lines(d / "channel.csv");
    REQUIRE(l.size() == 3);
    CHECK(l[0].rfind("# physfadkit.channel/1", 0) == 0);
    CHECK(l[1] == "rx,tx,re_h,im_h");
    const auto cells = split(l[2]);
    REQUIRE(cells.size() == 4);
    const cplx h = channel_exact(s, RisConfiguration::from_string("0110"), 1.0).h(0, 0);
    CHECK(std::stod(cells[2]) == h.real());
    CHECK(std::stod(cells[3]) == h.imag());
    CHECK(fs::exists(d / "channel.manifest.json"));

    // Wrong configuration length and schema violations are input errors
    const Run bad = run({"channel", "--scene", d / "scene.json", "--config", "011", "--out-dir", d.path.string()});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("config length 3") != std::string::npos);
    {
        std::ofstream os(d / "typo.json");
        os << R"({"schema":"physfadkit.scene/1","transmitters":[{"x":0,"y":0,"chii":1}]})";
    }
    CHECK(run({"channel", "--scene", d / "typo.json", "--out-dir", d.path.string()}).code == 2);
}

TEST_CASE("manifest contents", "[cli]")
{
    TempDir d;
    write_scene_file(d / "scene.json", ris_scene());
    REQUIRE(run({"channel", "--scene", d / "scene.json", "--seed", "42", "--out-dir", d.path.string()}).code == 0);
    std::ifstream is(d / "channel.manifest.json");
    const std::string m((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    CHECK(m.find(manifest_schema) != std::string::npos);
    CHECK(m.find("\"seed\": 42") != std::string::npos);
    CHECK(m.find(hex64(fnv1a64(read_text_file(d / "scene.json")))) != std::string::npos);
    CHECK(m.find("channel.csv") != std::string::npos);

    REQUIRE(run({"channel", "--scene", d / "scene.json", "--out-dir", d.path.string()}).code == 0);
    std::ifstream is2(d / "channel.manifest.json");
    const std::string m2((std::istreambuf_iterator<char>(is2)), std::istreambuf_iterator<char>());
    CHECK(m2.find("\"seed\": 0") != std::string::npos);
}

TEST_CASE("repeated runs give identical output", "[cli]")
{
    TempDir a, b;
    write_scene_file(a / "scene.json", ris_scene());
    REQUIRE(run({"channel", "--scene", a / "scene.json", "--out-dir", a.path.string()}).code == 0);
    REQUIRE(run({"channel", "--scene", a / "scene.json", "--out-dir", b.path.string()}).code == 0);
    CHECK(lines(a / "channel.csv") == lines(b / "channel.csv"));
    CHECK(lines(a / "channel.csv").size() == 3);
}

TEST_CASE("preset sweeps write the documented columns", "[cli][slow]")
{
    TempDir d;
    REQUIRE(run({"zeta", "--preset", "fig2a", "--realizations", "2", "--out-dir", d.path.string()}).code == 0);
    auto l = lines(d / "zeta.csv");
    REQUIRE(l.size() == 2 + 6);
    CHECK(l[0] == "# physfadkit.sweep/1 axis=n_s seed=0 realizations=2");
    CHECK(l[1] == "axis_value,mean_zeta_db,sd_zeta_db,n_ok,n_failed");
    CHECK(split(l[7])[0] == "32");

    REQUIRE(run({"zeta", "--preset", "fig4", "--realizations", "1", "--out-dir", d.path.string()}).code == 0);
    l = lines(d / "zeta.csv");
    REQUIRE(l.size() == 2 + 5);
    CHECK(l[0] == "# physfadkit.sweep/1 axis=f_res_e seed=0 realizations=1");
    CHECK(l[1] == "axis_value,mean_zeta_db,sd_zeta_db,n_ok,n_failed,mean_tau,n_tau,mean_free_space_zeta_db");
    for (std::size_t i = 2; i < l.size(); ++i)
        CHECK(split(l[i]).size() == 8);
    std::ifstream is(d / "zeta.manifest.json");
    const std::string m((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    CHECK(m.find("\"default_enclosure_geometry\": true") != std::string::npos);
}

TEST_CASE("bounds command", "[cli]")
{
    TempDir d;
    // Identical antennas in both arrays, RIS made of identical elements
    std::vector<Dipole> tx{dipole_at(-10, 0), dipole_at(-10, 0.6)}, rx{dipole_at(10, 0), dipole_at(10, 0.7)};
    std::vector<Dipole> ris;
    for (int i = 0; i < 5; ++i)
        ris.push_back(dipole_at(-1 + 0.5 * i, 6, 0.3));
    write_scene_file(d / "scene.json", Scene({}, tx, rx, {}, ris));
    REQUIRE(run({"bounds", "--scene", d / "scene.json", "--out-dir", d.path.string()}).code == 0);
    const auto l = lines(d / "bounds.csv");
    CHECK(l[0].rfind("# physfadkit.bounds/1", 0) == 0);
    CHECK(l[1] == "quantity,bound,measured,satisfied");
    std::map<std::string, std::vector<std::string>> rows;
    for (std::size_t i = 2; i < l.size(); ++i)
    {
        const auto c = split(l[i]);
        REQUIRE(c.size() == 4);
        rows[c[0]] = c;
    }
    for (const char *q : {"C_T", "C_R", "C_S", "series_T_K1", "series_S_K10", "mimo_ratio"})
    {
        INFO(q);
        REQUIRE(rows.count(q) == 1);
        CHECK(rows[q][3] == "yes");
    }
    CHECK(rows.size() == 3 * 11 + 1);

    // Without RIS, no S rows; mixed antennas are flagged as heterogeneous
    tx[1].chi = 0.5;
    tx[1].gamma_r = std::numbers::pi * std::numbers::pi;
    write_scene_file(d / "scene2.json", Scene({}, tx, rx, {}, {}));
    REQUIRE(run({"bounds", "--scene", d / "scene2.json", "--out-dir", d.path.string()}).code == 0);
    const auto l2 = lines(d / "bounds.csv");
    bool saw_s = false, het = false;
    for (const auto &line : l2)
    {
        saw_s = saw_s || line.rfind("C_S", 0) == 0;
        const auto c = split(line);
        het = het || (c.size() == 4 && c[0] == "C_T" && c[1] == "nan" && c[3] == "heterogeneous");
    }
    CHECK_FALSE(saw_s);
    CHECK(het);

    // Strongly coupled antennas are reported, not rejected
    std::vector<Dipole> dense{dipole_at(0, 0), dipole_at(0.12, 0), dipole_at(0.24, 0)};
    write_scene_file(d / "scene3.json", Scene({}, dense, {}, {}, {}));
    REQUIRE(run({"bounds", "--scene", d / "scene3.json", "--out-dir", d.path.string()}).code == 0);
    const auto l3 = lines(d / "bounds.csv");
    REQUIRE(l3.size() == 2 + 11);
    CHECK(std::stod(split(l3[2])[1]) >= 1.0);
    CHECK(split(l3[3])[3] == "not_convergent");
}

TEST_CASE("series-compare command", "[cli]")
{
    TempDir d;
    const Scene s = ris_scene();
    write_scene_file(d / "scene.json", s);
    REQUIRE(run({"series-compare", "--scene", d / "scene.json", "--config", "1011", "--kmax", "8", "--out-dir",
                 d.path.string()})
                .code == 0);
    const auto l = lines(d / "series_compare.csv");
    REQUIRE(l.size() == 10);
    CHECK(l[1] == "k,residual,spectral_radius,divergent");
    const RisConfiguration c = RisConfiguration::from_string("1011");
    const ComplexMatrix exact = channel_exact(s, c, 1.0).h;
    const CascadedModel m = cascaded_from_blocks(s, 1.0);
    const double cascaded_res = std::abs(cascaded_predict(m, c).h(0, 0) - exact(0, 0)) / std::abs(exact(0, 0));
    std::vector<double> res;
    for (std::size_t i = 2; i < l.size(); ++i)
    {
        const auto cells = split(l[i]);
        REQUIRE(cells.size() == 4);
        CHECK(cells[3] == "0");
        res.push_back(std::stod(cells[1]));
    }
    CHECK(res[0] == Catch::Approx(cascaded_res).epsilon(1e-9));
    for (std::size_t k = 1; k < res.size(); ++k)
        CHECK(res[k] <= res[k - 1]);
    CHECK(res.back() < 1e-3);

    // Tightly packed strong scatterers: the series diverges
    std::vector<Dipole> ris, env;
    for (int i = 0; i < 8; ++i)
    {
        ris.push_back(dipole_at(0.12 * i, 0.0));
        env.push_back(dipole_at(0.12 * i, 0.12));
    }
    write_scene_file(d / "div.json", Scene({}, {dipole_at(-2, 1)}, {dipole_at(3, 1)}, env, ris));
    REQUIRE(run({"series-compare", "--scene", d / "div.json", "--kmax", "3", "--out-dir", d.path.string()}).code == 0);
    const auto ld = lines(d / "series_compare.csv");
    CHECK(split(ld[2])[3] == "1");
    CHECK(std::stod(split(ld[2])[2]) > 1.0);
}

TEST_CASE("zeta, scene and calibration commands", "[cli]")
{
    TempDir a, b;
    {
        std::ofstream os(a / "spec.json");
        os << R"({"schema":"physfadkit.sweep_spec/1","axis":"chi_s","grid":[0.25,1.0],"realizations":3,"seed":5,
                 "free_space":{"n_s":4}})";
    }
    const Run r1 = run({"zeta", "--spec", a / "spec.json", "--workers", "1", "--out-dir", a.path.string()});
    REQUIRE(r1.code == 0);
    const Run r2 = run({"zeta", "--spec", a / "spec.json", "--workers", "3", "--out-dir", b.path.string()});
    REQUIRE(r2.code == 0);
    CHECK(r1.out == r2.out);
    const auto l = lines(a / "zeta.csv");
    REQUIRE(l.size() == 4);
    CHECK(l[0] == "# physfadkit.sweep/1 axis=chi_s seed=5 realizations=3");
    CHECK(l[1] == "axis_value,mean_zeta_db,sd_zeta_db,n_ok,n_failed");
    CHECK(lines(a / "zeta.csv") == lines(b / "zeta.csv"));
    CHECK(std::stod(split(l[2])[1]) > std::stod(split(l[3])[1]));

    // --seed overrides the spec seed
    REQUIRE(run({"zeta", "--spec", a / "spec.json", "--seed", "6", "--out-dir", b.path.string()}).code == 0);
    CHECK(lines(b / "zeta.csv")[0] == "# physfadkit.sweep/1 axis=chi_s seed=6 realizations=3");

    REQUIRE(run({"scene", "--spec", a / "spec.json", "--axis-value", "1.0", "--realization", "2", "--out-dir",
                 a.path.string()})
                .code == 0);
    SweepSpec spec = read_sweep_spec_file(a / "spec.json");
    CHECK(read_scene_file(a / "scene.json").dipoles() == sweep_scene(spec, 1.0, 2).dipoles());

    const Run cal = run({"calibration", "--spec", a / "spec.json", "--realization", "1", "--out-dir", a.path.string()});
    REQUIRE(cal.code == 0);
    const auto cl = lines(a / "calibration.csv");
    CHECK(cl[0].rfind("# physfadkit.calibration/1", 0) == 0);
    CHECK(cl.size() == 2 + 20); // 5 N_S configurations
    CHECK(lines(a / "test.csv").size() == 2 + 100);
    CHECK(cal.out.rfind("zeta_db ", 0) == 0);

    // Axis values that do not fit the scenario
    {
        std::ofstream os(a / "bad.json");
        os << R"({"schema":"physfadkit.sweep_spec/1","axis":"f_res_e","grid":[2],"realizations":1})";
    }
    CHECK(run({"zeta", "--spec", a / "bad.json", "--out-dir", a.path.string()}).code == 2);
}

TEST_CASE("worker count resolution", "[cli]")
{
    CHECK(resolve_workers(3) == 3);
    ::setenv("PHYSFADKIT_WORKERS", "2", 1);
    CHECK(resolve_workers(0) == 2);
    ::setenv("PHYSFADKIT_WORKERS", "two", 1);
    CHECK_THROWS(resolve_workers(0));
    ::unsetenv("PHYSFADKIT_WORKERS");
    CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("preset files match the built-in presets", "[cli][io]")
{
    const fs::path dir = fs::path(PHYSFADKIT_SOURCE_DIR) / "presets";
    for (const auto &name : preset_names())
    {
        INFO(name);
        const SweepSpec from_file = read_sweep_spec_file(dir / (name + ".json"));
        CHECK(sweep_spec_to_json(from_file) == sweep_spec_to_json(preset(name)));
    }
}
