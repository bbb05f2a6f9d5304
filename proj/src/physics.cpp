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

#include "physfadkit/physics.hpp"
#include "physfadkit/errors.hpp"

#include <cmath>
#include <string>

namespace physfadkit
{
    cplx inverse_polarizability(const Dipole &d, double f)
    {
        if (!(f > 0.0))
            throw DomainError("inverse_polarizability: frequency must be positive");
        const double chi2 = d.chi * d.chi;
        return {(d.f_res * d.f_res - f * f) / chi2, (d.gamma_r * f * f + d.gamma_l * f) / chi2};
    }

    void check_energy_conservation(const Dipole &d, double f, const PhysicalConstants &pc)
    {
        const double im = inverse_polarizability(d, f).imag();
        const double floor = pc.mu(f);
        // A dipole tuned to be exactly lossless sits on the floor; allow for rounding only
        if (im < floor * (1.0 - 1e-12))
            throw EnergyConservationViolation("Im(1/alpha) = " + std::to_string(im) + " is below mu(f) = " +
                                              std::to_string(floor) + " at f = " + std::to_string(f) +
                                              " (chi = " + std::to_string(d.chi) +
                                              ", gamma_r = " + std::to_string(d.gamma_r) + ")");
    }

    cplx green(Point p, Point q, double k, const PhysicalConstants &pc)
    {
        const double d = distance(p, q);
        if (d < pc.min_separation())
            throw CoincidentPoints("dipoles at (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") and (" +
                                   std::to_string(q.x) + ", " + std::to_string(q.y) + ") are " +
                                   std::to_string(d) + " apart");
        const double mu = k * k / (4.0 * pc.epsilon * pc.delta);
        return cplx(0.0, mu) * hankel0_2(k * d);
    }

    ComplexMatrix green_matrix(const std::vector<Point> &pos, double k, const PhysicalConstants &pc)
    {
        const std::size_t n = pos.size();
        ComplexMatrix g(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
            {
                const cplx v = green(pos[i], pos[j], k, pc);
                g(i, j) = v;
                g(j, i) = v;
            }
        return g;
    }

    std::vector<Point> positions(const std::vector<Dipole> &d)
    {
        std::vector<Point> p;
        p.reserve(d.size());
        for (const auto &x : d)
            p.push_back(x.position);
        return p;
    }

    // ---------------------------------------------------------------------------------------------

    RisConfiguration::RisConfiguration(std::vector<std::uint8_t> bits) : bits_(std::move(bits))
    {
        for (auto b : bits_)
            if (b > 1)
                throw DomainError("RIS configuration bits must be 0 or 1");
    }

    RisConfiguration RisConfiguration::all_on(std::size_t n)
    {
        return RisConfiguration(std::vector<std::uint8_t>(n, 1));
    }

    RisConfiguration RisConfiguration::all_off(std::size_t n)
    {
        return RisConfiguration(std::vector<std::uint8_t>(n, 0));
    }

    RisConfiguration RisConfiguration::from_labels(const std::vector<int> &labels)
    {
        std::vector<std::uint8_t> bits;
        bits.reserve(labels.size());
        for (int l : labels)
        {
            if (l != 1 && l != -1)
                throw DomainError("RIS labels must be +1 or -1");
            bits.push_back(l == 1 ? 1 : 0);
        }
        return RisConfiguration(std::move(bits));
    }

    RisConfiguration RisConfiguration::from_string(const std::string &bitstring)
    {
        std::vector<std::uint8_t> bits;
        bits.reserve(bitstring.size());
        for (char ch : bitstring)
        {
            if (ch != '0' && ch != '1')
                throw DomainError("config bitstring may only contain 0 and 1, got '" + bitstring + "'");
            bits.push_back(ch == '1' ? 1 : 0);
        }
        return RisConfiguration(std::move(bits));
    }

    std::vector<double> RisConfiguration::labels() const
    {
        std::vector<double> l(bits_.size());
        for (std::size_t i = 0; i < bits_.size(); ++i)
            l[i] = 2.0 * bits_[i] - 1.0;
        return l;
    }

    std::string RisConfiguration::to_string() const
    {
        std::string s;
        s.reserve(bits_.size());
        for (auto b : bits_)
            s.push_back(b ? '1' : '0');
        return s;
    }

    // ---------------------------------------------------------------------------------------------

    Scene::Scene(PhysicalConstants pc, std::vector<Dipole> tx, std::vector<Dipole> rx, std::vector<Dipole> env,
                 std::vector<Dipole> ris, double ris_off_detuning)
        : pc_(pc), groups_{std::move(tx), std::move(rx), std::move(env), std::move(ris)},
          ris_off_detuning_(ris_off_detuning)
    {
        validate();
    }

    void Scene::validate() const
    {
        if (!(pc_.c > 0.0 && pc_.epsilon > 0.0 && pc_.delta > 0.0 && pc_.f0 > 0.0))
            throw DomainError("physical constants must be strictly positive");
        if (!(ris_off_detuning_ > 0.0))
            throw DomainError("ris_off_detuning must be positive");

        static constexpr const char *names[] = {"transmitters", "receivers", "environment", "ris"};
        std::vector<Point> pos;
        for (std::size_t g = 0; g < 4; ++g)
            for (std::size_t i = 0; i < groups_[g].size(); ++i)
            {
                const Dipole &d = groups_[g][i];
                const std::string where = std::string(names[g]) + "[" + std::to_string(i) + "]";
                if (!std::isfinite(d.position.x) || !std::isfinite(d.position.y))
                    throw DomainError(where + ": position must be finite");
                if (!(d.chi > 0.0) || !(d.f_res > 0.0) || !(d.gamma_l >= 0.0) || !(d.gamma_r > 0.0))
                    throw DomainError(where + ": requires chi > 0, f_res > 0, gamma_l >= 0, gamma_r > 0");
                try
                {
                    check_energy_conservation(d, pc_.f0, pc_);
                    // RIS elements must stay passive in both states
                    if (g == 3)
                    {
                        Dipole off = d;
                        off.f_res = f_off();
                        check_energy_conservation(off, pc_.f0, pc_);
                    }
                }
                catch (const EnergyConservationViolation &e)
                {
                    throw EnergyConservationViolation(where + ": " + e.what());
                }
                pos.push_back(d.position);
            }

        // All-pairs distance check. Scenes are at most a few thousand dipoles.
        const double dmin = pc_.min_separation();
        for (std::size_t i = 0; i < pos.size(); ++i)
            for (std::size_t j = i + 1; j < pos.size(); ++j)
                if (distance(pos[i], pos[j]) < dmin)
                    throw CoincidentPoints("dipoles " + std::to_string(i) + " and " + std::to_string(j) +
                                           " are closer than " + std::to_string(dmin));
    }

    BlockIndexMap Scene::block_map() const
    {
        return BlockIndexMap(count(Group::T), count(Group::R), count(Group::E), count(Group::S));
    }

    std::size_t Scene::size() const noexcept
    {
        return groups_[0].size() + groups_[1].size() + groups_[2].size() + groups_[3].size();
    }

    std::vector<Dipole> Scene::dipoles() const
    {
        std::vector<Dipole> all;
        all.reserve(size());
        for (const auto &g : groups_)
            all.insert(all.end(), g.begin(), g.end());
        return all;
    }

    Scene Scene::with_group(Group g, std::vector<Dipole> dipoles) const
    {
        Scene s = *this;
        s.groups_[static_cast<std::size_t>(g)] = std::move(dipoles);
        s.validate();
        return s;
    }

    Scene apply_ris_config(const Scene &s, const RisConfiguration &c)
    {
        if (c.size() != s.count(Group::S))
            throw LengthMismatch("config length " + std::to_string(c.size()) + " does not match " +
                                 std::to_string(s.count(Group::S)) + " RIS elements");
        std::vector<Dipole> ris = s.group(Group::S);
        for (std::size_t i = 0; i < ris.size(); ++i)
            ris[i].f_res = c.on(i) ? s.constants().f0 : s.f_off();
        return s.with_group(Group::S, std::move(ris));
    }

    RisStates ris_inverse_polarizabilities(const Scene &s, double f)
    {
        RisStates st;
        for (Dipole d : s.group(Group::S))
        {
            d.f_res = s.constants().f0;
            st.on.push_back(inverse_polarizability(d, f));
            d.f_res = s.f_off();
            st.off.push_back(inverse_polarizability(d, f));
        }
        return st;
    }

    InteractionMatrix assemble_interaction_matrix(const Scene &s, double f)
    {
        const auto all = s.dipoles();
        const PhysicalConstants &pc = s.constants();
        InteractionMatrix im{green_matrix(positions(all), pc.wavenumber(f), pc), s.block_map()};
        for (std::size_t i = 0; i < all.size(); ++i)
        {
            check_energy_conservation(all[i], f, pc);
            im.w(i, i) = inverse_polarizability(all[i], f);
        }
        return im;
    }

} // namespace physfadkit
