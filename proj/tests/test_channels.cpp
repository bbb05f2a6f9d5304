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
#include "physfadkit/channels.hpp"
#include "physfadkit/errors.hpp"
#include "physfadkit/experiments.hpp"
#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace physfadkit;
using Catch::Approx;
using testsupport::dipole_at;
using testsupport::rel_diff;

namespace
{
    constexpr double pi = std::numbers::pi;

    // Linear RIS on the x axis with antennas scattered above it
    Scene ris_scene(std::mt19937_64 &rng, std::size_t n_t, std::size_t n_r, std::size_t n_s, double spacing,
                    double chi_s, double keep_out = 3.0)
    {
        std::vector<Dipole> ris;
        std::vector<Point> ris_pos;
        for (std::size_t i = 0; i < n_s; ++i)
        {
            ris.push_back(dipole_at((double(i) - 0.5 * double(n_s - 1)) * spacing, 0.0, chi_s));
            ris_pos.push_back(ris.back().position);
        }
        const auto pts = testsupport::scatter_points(rng, n_t + n_r, -8, 8, 0.5, 10, 0.4, ris_pos, keep_out);
        std::vector<Dipole> tx, rx;
        for (std::size_t i = 0; i < n_t; ++i)
            tx.push_back(dipole_at(pts[i].x, pts[i].y));
        for (std::size_t i = 0; i < n_r; ++i)
            rx.push_back(dipole_at(pts[n_t + i].x, pts[n_t + i].y));
        return Scene({}, tx, rx, {}, ris);
    }

    RisConfiguration random_config(std::mt19937_64 &rng, std::size_t n)
    {
        std::vector<std::uint8_t> bits(n);
        for (auto &b : bits)
            b = static_cast<std::uint8_t>(rng() >> 63);
        return RisConfiguration(bits);
    }

    ComplexMatrix oracle_channel(const Scene &s, const RisConfiguration &c, double f)
    {
        const Scene cs = apply_ris_config(s, c);
        const InteractionMatrix w = assemble_interaction_matrix(cs, f);
        const ComplexMatrix inv = testsupport::gauss_jordan_inverse(w.w);
        return group_block(inv, w.map, Group::R, Group::T);
    }

    Scene with_environment(const Scene &s, std::vector<Dipole> env)
    {
        return Scene(s.constants(), s.group(Group::T), s.group(Group::R), std::move(env), s.group(Group::S),
                     s.ris_off_detuning());
    }
} // namespace

TEST_CASE("channel_exact: 2x2 closed form", "[channels]")
{
    const Dipole t = dipole_at(0, 0, 0.8), r = dipole_at(1.7, 0.6, 0.6);
    const Scene s({}, {t}, {r}, {}, {});
    const cplx at = 1.0 / inverse_polarizability(t, 1.0), ar = 1.0 / inverse_polarizability(r, 1.0);
    const cplx g = green(t.position, r.position, 2 * pi);
    const cplx expected = -g * at * ar / (1.0 - at * ar * g * g);
    const ChannelMatrix h = channel_exact(s, {}, 1.0);
    REQUIRE(h.h.rows() == 1);
    REQUIRE(h.h.cols() == 1);
    CHECK(std::abs(h.h(0, 0) - expected) <= 1e-14 * std::abs(expected));
    CHECK(h.exact);
    CHECK(h.frequency == 1.0);
}

TEST_CASE("channel_exact agrees with a Gauss-Jordan inverse", "[channels]")
{
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 5; ++trial)
    {
        Scene s = ris_scene(rng, 2, 3, 5, 0.4, 0.7);
        const auto env = testsupport::scatter_points(rng, 4, -6, 6, -6, -1, 0.3);
        std::vector<Dipole> e;
        for (const auto &p : env)
            e.push_back(dipole_at(p.x, p.y, 0.6, 1.4));
        s = with_environment(s, e);
        const RisConfiguration c = random_config(rng, 5);
        const ChannelMatrix h = channel_exact(s, c, 1.05);
        CHECK(h.h.rows() == 3);
        CHECK(h.h.cols() == 2);
        CHECK(rel_diff(h.h, oracle_channel(s, c, 1.05)) < 1e-11);
    }
}

TEST_CASE("channel_exact is reciprocal", "[channels][property]")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial)
    {
        const Scene s = ris_scene(rng, 2, 3, 4, 0.5, 1.0);
        const Scene swapped({}, s.group(Group::R), s.group(Group::T), {}, s.group(Group::S));
        const RisConfiguration c = random_config(rng, 4);
        const ComplexMatrix rt = channel_exact(s, c, 1.0).h;
        const ComplexMatrix tr = channel_exact(swapped, c, 1.0).h;
        CHECK((rt - tr.transpose()).max_abs() <= 1e-10 * rt.max_abs());
    }
}

TEST_CASE("channel_exact depends on the RIS state", "[channels]")
{
    std::mt19937_64 rng(12);
    const Scene s = ris_scene(rng, 1, 1, 3, 0.5, 1.0);
    const auto on = channel_exact(s, RisConfiguration::all_on(3), 1.0).h;
    const auto off = channel_exact(s, RisConfiguration::all_off(3), 1.0).h;
    CHECK(std::abs(on(0, 0) - off(0, 0)) > 1e-6 * std::abs(on(0, 0)));
    CHECK_THROWS_AS(channel_exact(s, RisConfiguration::all_on(2), 1.0), LengthMismatch);
}

TEST_CASE("channel_exact is invariant under relabeling the environment", "[channels][property]")
{
    std::mt19937_64 rng(13);
    Scene s = ris_scene(rng, 1, 2, 3, 0.5, 1.0);
    std::vector<Dipole> e{dipole_at(-3, -2, 0.7, 1.5), dipole_at(2, -3, 0.5, 1.2), dipole_at(0, -4, 0.9, 0.8)};
    const Scene a = with_environment(s, e);
    std::reverse(e.begin(), e.end());
    const Scene b = with_environment(s, e);
    const RisConfiguration c = random_config(rng, 3);
    CHECK(rel_diff(channel_exact(a, c, 1.0).h, channel_exact(b, c, 1.0).h) < 1e-12);
}

TEST_CASE("antenna_self_inverse_series", "[channels]")
{
    const Scene single({}, {dipole_at(0, 0, 0.6)}, {}, {}, {});
    const cplx alpha = 1.0 / inverse_polarizability(dipole_at(0, 0, 0.6), 1.0);
    for (std::size_t k : {1u, 4u})
        CHECK(antenna_self_inverse_series(single, 1.0, SeriesTruncation::fixed(k))(0, 0) == alpha);

    std::mt19937_64 rng(14);
    const Scene arr({}, {dipole_at(0, 0, 0.5), dipole_at(0.7, 0.2, 0.5), dipole_at(1.3, -0.4, 0.5)}, {}, {}, {});
    const ComplexMatrix k1 = antenna_self_inverse_series(arr, 1.0, SeriesTruncation::fixed(1));
    const double a = std::abs(1.0 / inverse_polarizability(arr.group(Group::T)[0], 1.0));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(std::abs(k1(i, j)) == Approx(i == j ? a : 0.0));

    // Four-element array scaled until C_T = 0.3
    std::vector<Dipole> four;
    for (const auto &p : std::vector<Point>{{0, 0}, {1.1, 0.3}, {2.0, -0.5}, {0.4, 1.6}})
        four.push_back(dipole_at(p.x, p.y, 1.0));
    Scene s4({}, four, {}, {}, {});
    double chi = 1.0;
    for (int it = 0; it < 60; ++it)
    {
        const double c = coupling_constant(s4, Group::T, 1.0).value;
        chi *= std::sqrt(0.3 / c);
        for (auto &d : four)
            d.chi = chi;
        s4 = Scene({}, four, {}, {}, {});
    }
    const double ct = coupling_constant(s4, Group::T, 1.0).value;
    REQUIRE(ct == Approx(0.3).epsilon(1e-9));
    const ComplexMatrix wtt = assemble_interaction_matrix(s4, 1.0).block(Group::T, Group::T);
    const ComplexMatrix inv = testsupport::gauss_jordan_inverse(wtt);
    const ComplexMatrix s25 = antenna_self_inverse_series(s4, 1.0, SeriesTruncation::fixed(25));
    const double err = testsupport::oracle_spectral_norm(s25 - inv) / testsupport::oracle_spectral_norm(inv);
    CHECK(err <= std::pow(ct, 25) * (1 + ct) / (1 - ct));
}

TEST_CASE("series truncation validation and auto mode", "[channels]")
{
    const Scene single({}, {dipole_at(0, 0)}, {}, {}, {});
    CHECK_THROWS_AS(antenna_self_inverse_series(single, 1.0, SeriesTruncation::fixed(0)), DomainError);
    SeriesTruncation bad = SeriesTruncation::automatic(0.0);
    CHECK_THROWS_AS(antenna_self_inverse_series(single, 1.0, bad), DomainError);

    const Scene arr({}, {dipole_at(0, 0, 0.4), dipole_at(0.8, 0, 0.4)}, {}, {}, {});
    SeriesDiagnostics diag;
    const ComplexMatrix s = antenna_self_inverse_series(arr, 1.0, SeriesTruncation::automatic(), Group::T, &diag);
    CHECK(diag.converged);
    CHECK(diag.terms == diag.term_norms.size());
    CHECK(diag.term_norms.back() < 1e-12 * testsupport::oracle_spectral_norm(s));
    const ComplexMatrix inv = invert(assemble_interaction_matrix(arr, 1.0).w);
    CHECK(rel_diff(s, inv) < 1e-11);

    SeriesTruncation capped = SeriesTruncation::automatic(1e-12, 3);
    CHECK_THROWS_AS(antenna_self_inverse_series(arr, 1.0, capped), NonConvergence);
}

TEST_CASE("mimo_series_rt", "[channels]")
{
    std::vector<Dipole> tx{dipole_at(0, 0, 0.5), dipole_at(0.6, 0.3, 0.5)};
    std::vector<Dipole> rx{dipole_at(20, 0, 0.5), dipole_at(20.4, 0.5, 0.5), dipole_at(19.8, 1.0, 0.5)};
    const Scene s({}, tx, rx, {}, {});
    const ChannelMatrix exact = channel_exact(s, {}, 1.0);
    const ChannelMatrix series = mimo_series_rt(s, 1.0, SeriesTruncation::fixed(6));
    CHECK_FALSE(series.exact);
    CHECK(rel_diff(series.h, exact.h) < 1e-10);

    // One antenna per side: K = 1 is -alpha_R W_RT alpha_T exactly
    const Scene siso({}, {tx[0]}, {rx[0]}, {}, {});
    const cplx a = 1.0 / inverse_polarizability(tx[0], 1.0);
    const ChannelMatrix k1 = mimo_series_rt(siso, 1.0, SeriesTruncation::fixed(1));
    const cplx w_rt = green(rx[0].position, tx[0].position, 2 * pi);
    CHECK(std::abs(k1.h(0, 0) + a * a * w_rt) < 1e-14 * std::abs(a * a * w_rt));

    CHECK_THROWS_AS(mimo_series_rt(Scene({}, tx, rx, {dipole_at(5, 5)}, {}), 1.0, SeriesTruncation::fixed(2)),
                    DomainError);
}

TEST_CASE("wss_inverse_series", "[channels]")
{
    const std::vector<cplx> phi{cplx(0.1, -0.05), cplx(0.2, 0.01)};
    const ComplexMatrix s0 = wss_inverse_series(phi, ComplexMatrix(2, 2), SeriesTruncation::fixed(5));
    CHECK(s0 == ComplexMatrix::diagonal(phi));
    const ComplexMatrix one = wss_inverse_series({cplx(0.3, -0.2)}, ComplexMatrix(1, 1), SeriesTruncation::fixed(1));
    CHECK(one(0, 0) == cplx(0.3, -0.2));

    // Equal-magnitude elements with C_S = 0.4
    std::mt19937_64 rng(15);
    const auto pts = testsupport::scatter_points(rng, 6, 0, 3, 0, 3, 0.3);
    const ComplexMatrix g = green_matrix(pts, 2 * pi);
    double row = 0.0;
    for (std::size_t i = 0; i < 6; ++i)
    {
        double r = 0.0;
        for (std::size_t j = 0; j < 6; ++j)
            r += std::abs(g(i, j));
        row = std::max(row, r);
    }
    const double cs = 0.4;
    const std::vector<cplx> alphas(6, std::polar(cs / row, 0.7));
    const ComplexMatrix w = ComplexMatrix::diagonal(std::vector<cplx>(6, 1.0 / alphas[0])) + g;
    const ComplexMatrix inv = testsupport::gauss_jordan_inverse(w);
    const ComplexMatrix series = wss_inverse_series(alphas, g, SeriesTruncation::fixed(30));
    const double err = testsupport::oracle_spectral_norm(series - inv) * testsupport::oracle_spectral_norm(w);
    CHECK(err <= std::pow(cs, 30) * (1 + cs) / (1 - cs));
}

TEST_CASE("ris_free_space_series", "[channels]")
{
    std::mt19937_64 rng(16);
    const Scene s = ris_scene(rng, 1, 2, 6, 0.5, 0.6);
    const RisConfiguration c = random_config(rng, 6);

    const Scene bare({}, s.group(Group::T), s.group(Group::R), {}, {});
    const ChannelMatrix k1 = ris_free_space_series(s, c, 1.0, SeriesTruncation::fixed(1));
    CHECK(rel_diff(k1.h, channel_exact(bare, {}, 1.0).h) < 1e-12);

    const double rho = spectral_radius_estimate(generic_series_ratio(s, c, 1.0), 64).value;
    REQUIRE(rho < 0.8);
    const ChannelMatrix full = ris_free_space_series(s, c, 1.0, SeriesTruncation::automatic());
    CHECK(rel_diff(full.h, channel_exact(s, c, 1.0).h) < 1e-9);
    CHECK(full.diagnostics.converged);

    const Scene with_env = with_environment(s, {dipole_at(5, -5)});
    CHECK_THROWS_AS(ris_free_space_series(with_env, c, 1.0, SeriesTruncation::fixed(2)), DomainError);
}

TEST_CASE("generic_series_rt", "[channels]")
{
    std::mt19937_64 rng(17);
    const Scene s = ris_scene(rng, 1, 1, 5, 0.5, 1.0);
    const RisConfiguration c = random_config(rng, 5);
    for (std::size_t k : {1u, 2u, 5u})
        CHECK(generic_series_rt(s, c, 1.0, SeriesTruncation::fixed(k)).h ==
              ris_free_space_series(s, c, 1.0, SeriesTruncation::fixed(k)).h);

    // Nearly transparent environment
    std::vector<Dipole> weak;
    for (const auto &p : testsupport::scatter_points(rng, 20, -8, 8, -8, -1, 0.5))
        weak.push_back(dipole_at(p.x, p.y, 0.7, 10.0));
    const Scene ws = with_environment(s, weak);
    CHECK(rel_diff(generic_series_rt(ws, c, 1.0, SeriesTruncation::automatic()).h, channel_exact(ws, c, 1.0).h) < 1e-8);
}

TEST_CASE("generic_series_rt at linear order misses reverberation", "[channels]")
{
    EnclosureSpec es;
    const Scene s = gen_enclosure_scene(es, 0);
    std::mt19937_64 rng(18);
    const RisConfiguration c = random_config(rng, s.count(Group::S));
    const ComplexMatrix lin = generic_series_rt(s, c, 1.0, SeriesTruncation::fixed(2)).h;
    CHECK(rel_diff(lin, channel_exact(s, c, 1.0).h) > 1e-2);
}

TEST_CASE("cascaded model matches the two-term series", "[channels]")
{
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 5; ++trial)
    {
        const Scene s = ris_scene(rng, 2, 2, 7, 0.5, 0.8);
        CascadedOptions opt;
        opt.environment = Environment::free_space;
        const CascadedModel m = cascaded_from_blocks(s, 1.0, opt);
        for (int j = 0; j < 5; ++j)
        {
            const RisConfiguration c = random_config(rng, 7);
            const ComplexMatrix a = cascaded_predict(m, c, 1.0).h;
            const ComplexMatrix b =
                ris_free_space_series(s, c, 1.0, SeriesTruncation::fixed(2), SeriesTruncation::fixed(1)).h;
            CHECK(rel_diff(a, b) < 1e-12);
        }
    }
}

TEST_CASE("cascaded model is affine", "[channels]")
{
    std::mt19937_64 rng(20);
    const Scene s = ris_scene(rng, 1, 1, 4, 0.5, 1.0);
    const CascadedModel m = cascaded_from_blocks(s, 1.0);
    REQUIRE(m.is_siso());
    const std::vector<double> zero(4, 0.0), c1{1, -1, 0.5, 2}, c2{-0.3, 1, 1, -1};
    std::vector<double> c12(4);
    for (std::size_t i = 0; i < 4; ++i)
        c12[i] = c1[i] + c2[i];
    const ComplexMatrix h0 = cascaded_predict(m, zero);
    CHECK(h0 == m.h0);
    const ComplexMatrix lhs = cascaded_predict(m, c1) + cascaded_predict(m, c2) - cascaded_predict(m, c12);
    CHECK((lhs - h0).max_abs() < 1e-14 * h0.max_abs() + 1e-18);

    // SISO reduction h0 + t . c
    const auto t = m.siso_t();
    cplx direct = m.siso_h0();
    for (std::size_t i = 0; i < 4; ++i)
        direct += t[i] * c1[i];
    CHECK(std::abs(direct - cascaded_predict(m, c1)(0, 0)) < 1e-14 * std::abs(direct));
}

TEST_CASE("pruned cascaded model drops antenna round trips", "[channels]")
{
    std::mt19937_64 rng(21);
    const Scene base = ris_scene(rng, 1, 1, 6, 0.5, 0.5, 6.0);
    auto weaken = [](std::vector<Dipole> d) {
        for (auto &x : d)
            x.chi = 0.2;
        return d;
    };
    const Scene s({}, weaken(base.group(Group::T)), weaken(base.group(Group::R)), {}, base.group(Group::S));
    CascadedOptions full, pruned;
    pruned.prune_antenna_round_trips = true;
    const CascadedModel a = cascaded_from_blocks(s, 1.0, full);
    const CascadedModel b = cascaded_from_blocks(s, 1.0, pruned);
    // Distant weak antennas: the neglected terms are small but not zero
    CHECK(rel_diff(b.h1, a.h1) < 0.05);
    CHECK(rel_diff(b.h1, a.h1) > 0.0);
}

TEST_CASE("ConfigurableChannel reproduces channel_exact", "[channels]")
{
    std::mt19937_64 rng(22);
    Scene s = ris_scene(rng, 1, 2, 8, 0.4, 1.0);
    std::vector<Dipole> env;
    for (const auto &p : testsupport::scatter_points(rng, 15, -8, 8, -6, -1, 0.4))
        env.push_back(dipole_at(p.x, p.y, 0.7, 2.0));
    s = with_environment(s, env);
    const ConfigurableChannel ch(s, 1.0);
    CHECK(ch.ris_size() == 8);
    for (int trial = 0; trial < 10; ++trial)
    {
        const RisConfiguration c = random_config(rng, 8);
        CHECK(rel_diff(ch.evaluate(c), channel_exact(s, c, 1.0).h) < 1e-10);
    }
}

TEST_CASE("SISO channel is structurally non-linear in the configuration", "[channels][property]")
{
    // Dense strongly coupled RIS close to the antennas
    const Scene s({}, {dipole_at(-1, 1)}, {dipole_at(1, 1)}, {},
                  {dipole_at(-0.3, 0), dipole_at(-0.1, 0), dipole_at(0.1, 0), dipole_at(0.3, 0)});
    const ConfigurableChannel ch(s, 1.0);
    // For an affine channel h(a) + h(b) = h(a|b) + h(a&b) holds bitwise-elementwise
    const auto a = RisConfiguration::from_string("1100"), b = RisConfiguration::from_string("0110");
    const auto aorb = RisConfiguration::from_string("1110"), aandb = RisConfiguration::from_string("0100");
    const cplx defect = ch.evaluate_siso(a) + ch.evaluate_siso(b) - ch.evaluate_siso(aorb) - ch.evaluate_siso(aandb);
    CHECK(std::abs(defect) > 1e-6 * std::abs(ch.evaluate_siso(a)));
}

TEST_CASE("series diverge beyond unit spectral radius", "[channels]")
{
    // Closely spaced strong RIS elements next to a resonant environment cluster
    std::vector<Dipole> ris, env;
    for (int i = 0; i < 8; ++i)
        ris.push_back(dipole_at(0.12 * i, 0.0));
    for (int i = 0; i < 8; ++i)
        env.push_back(dipole_at(0.12 * i, 0.12));
    const Scene s({}, {dipole_at(-3, 3)}, {dipole_at(3, 3)}, env, ris);
    const RisConfiguration c = RisConfiguration::all_on(8);
    const auto rho = spectral_radius_estimate(generic_series_ratio(s, c, 1.0), 64);
    REQUIRE(rho.value > 1.0);
    CHECK_THROWS_AS(generic_series_rt(s, c, 1.0, SeriesTruncation::automatic()), DivergenceDetected);
}
