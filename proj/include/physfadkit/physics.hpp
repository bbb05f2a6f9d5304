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

#ifndef PHYSFADKIT_PHYSICS_HPP
#define PHYSFADKIT_PHYSICS_HPP

#include "physfadkit/numerics.hpp"

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace physfadkit
{
    /// Dimensionless unit system. With the defaults the operating wavelength is 1 and k0 = 2 pi.
    struct PhysicalConstants
    {
        double c = 1.0;       // wave speed
        double epsilon = 1.0; // permittivity
        double delta = 1.0;   // discretization constant
        double f0 = 1.0;      // operating frequency

        double wavenumber(double f) const noexcept { return 2.0 * std::numbers::pi * f / c; }
        double wavelength() const noexcept { return c / f0; }

        // Radiation-loss floor k^2 / (4 eps delta). Im(1/alpha) must not drop below it.
        double mu(double f) const noexcept
        {
            const double k = wavenumber(f);
            return k * k / (4.0 * epsilon * delta);
        }

        // Closest allowed distance between two dipoles
        double min_separation() const noexcept { return 0.1 * wavelength(); }

        bool operator==(const PhysicalConstants &) const = default;
    };

    struct Point
    {
        double x = 0.0;
        double y = 0.0;

        bool operator==(const Point &) const = default;
    };

    inline double distance(Point a, Point b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

    // Radiative loss parameter that makes a dipole with chi = 1 exactly lossless
    inline constexpr double default_gamma_r = std::numbers::pi * std::numbers::pi;

    /// Polarizable point scatterer with a Lorentzian response.
    struct Dipole
    {
        Point position;
        double f_res = 1.0;
        double chi = 1.0;
        double gamma_l = 0.0; // absorption
        double gamma_r = default_gamma_r;

        bool operator==(const Dipole &) const = default;
    };

    /// 1/alpha(f) = (f_res^2 - f^2)/chi^2 + j (gamma_r f^2 + gamma_l f)/chi^2
    ///
    /// The radiative part scales with f^2 like the loss floor mu(f), so a dipole that is lossless at
    /// one frequency stays lossless at all others. Pure formula, no energy check.
    cplx inverse_polarizability(const Dipole &d, double f);

    // Throws EnergyConservationViolation if Im(1/alpha(f)) < mu(f) (up to rounding)
    void check_energy_conservation(const Dipole &d, double f, const PhysicalConstants &pc = {});

    // Free-space 2D Green's function j mu(k) H0^(2)(k |p - q|)
    cplx green(Point p, Point q, double k, const PhysicalConstants &pc = {});

    /// Binary RIS configuration. Bit 1 means the element is resonant at f0 (label +1).
    class RisConfiguration
    {
    public:
        RisConfiguration() = default;
        explicit RisConfiguration(std::vector<std::uint8_t> bits);

        static RisConfiguration all_on(std::size_t n);
        static RisConfiguration all_off(std::size_t n);
        static RisConfiguration from_labels(const std::vector<int> &labels);
        static RisConfiguration from_string(const std::string &bitstring); // e.g. "0110"

        std::size_t size() const noexcept { return bits_.size(); }
        const std::vector<std::uint8_t> &bits() const noexcept { return bits_; }
        std::vector<double> labels() const; // 2 * bit - 1
        bool on(std::size_t i) const { return bits_.at(i) != 0; }
        std::string to_string() const;

        bool operator==(const RisConfiguration &) const = default;

    private:
        std::vector<std::uint8_t> bits_;
    };

    /// Ordered collection of dipoles partitioned into T, R, E, S groups.
    class Scene
    {
    public:
        Scene() = default;
        // Validates separations and energy conservation at f0
        Scene(PhysicalConstants pc, std::vector<Dipole> tx, std::vector<Dipole> rx, std::vector<Dipole> env,
              std::vector<Dipole> ris, double ris_off_detuning = 3.0);

        const PhysicalConstants &constants() const noexcept { return pc_; }
        const std::vector<Dipole> &group(Group g) const noexcept { return groups_[static_cast<std::size_t>(g)]; }
        std::size_t count(Group g) const noexcept { return group(g).size(); }
        BlockIndexMap block_map() const;
        std::size_t size() const noexcept;
        double ris_off_detuning() const noexcept { return ris_off_detuning_; }
        double f_off() const noexcept { return ris_off_detuning_ * pc_.f0; }

        // All dipoles in T, R, E, S order
        std::vector<Dipole> dipoles() const;

        // Copy with one group replaced (validated again)
        Scene with_group(Group g, std::vector<Dipole> dipoles) const;

        bool operator==(const Scene &) const = default;

    private:
        void validate() const;

        PhysicalConstants pc_;
        std::array<std::vector<Dipole>, 4> groups_;
        double ris_off_detuning_ = 3.0;
    };

    // RIS dipole i resonant at f0 if bit i is set, detuned to f_off otherwise
    Scene apply_ris_config(const Scene &s, const RisConfiguration &c);

    // 1/alpha of RIS element i in its ON and OFF states
    struct RisStates
    {
        std::vector<cplx> on;
        std::vector<cplx> off;
    };
    RisStates ris_inverse_polarizabilities(const Scene &s, double f);

    /// Interaction matrix W with its block layout.
    struct InteractionMatrix
    {
        ComplexMatrix w;
        BlockIndexMap map;

        ComplexMatrix block(Group rg, Group cg) const { return group_block(w, map, rg, cg); }
    };

    InteractionMatrix assemble_interaction_matrix(const Scene &s, double f);

    // Off-diagonal Green's part for a set of positions (zero diagonal)
    ComplexMatrix green_matrix(const std::vector<Point> &pos, double k, const PhysicalConstants &pc = {});

    std::vector<Point> positions(const std::vector<Dipole> &d);

} // namespace physfadkit

#endif
