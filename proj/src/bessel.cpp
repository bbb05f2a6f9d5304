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

#include "physfadkit/numerics.hpp"
#include "physfadkit/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace physfadkit
{
    namespace
    {
        // Below this argument the power series is used, above it the Hankel asymptotic expansion
        constexpr double crossover = 12.0;

        struct J0Y0
        {
            double j0;
            double y0;
        };

        // Ascending series, accumulated in long double. At x = 12 the largest term is about 4e3,
        // so the cancellation costs roughly four of the ~19 available digits.
        J0Y0 series(double xd)
        {
            const long double x = xd;
            const long double y = x * x / 4.0L;
            long double term = 1.0L; // (-y)^k / (k!)^2
            long double j0 = 1.0L;
            long double harmonic = 0.0L;
            long double ysum = 0.0L; // sum_k H_k (-y)^k / (k!)^2
            for (int k = 1; k < 200; ++k)
            {
                term *= -y / (static_cast<long double>(k) * static_cast<long double>(k));
                harmonic += 1.0L / static_cast<long double>(k);
                j0 += term;
                ysum += harmonic * term;
                if (static_cast<long double>(k) > y && std::fabs(term) * harmonic < 1e-22L)
                    break;
            }
            constexpr long double euler_gamma = 0.577215664901532860606512090082402431L;
            constexpr long double two_over_pi = 0.636619772367581343075535053490057448L;
            const long double y0 = two_over_pi * ((std::log(x / 2.0L) + euler_gamma) * j0 - ysum);
            return {static_cast<double>(j0), static_cast<double>(y0)};
        }

        // Hankel expansion J0 = sqrt(2/(pi x)) (P cos chi - Q sin chi), Y0 = sqrt(2/(pi x)) (P sin chi + Q cos chi)
        // with chi = x - pi/4. Summed up to the smallest term of the divergent series.
        J0Y0 asymptotic(double x)
        {
            const double inv8x = 1.0 / (8.0 * x);
            double p = 1.0, q = 0.0;
            double b = 1.0; // |a_k|
            double prev = 1.0;
            for (int k = 1; k < 200; ++k)
            {
                const double odd = 2.0 * k - 1.0;
                b *= odd * odd * inv8x / static_cast<double>(k);
                if (b > prev)
                    break;
                prev = b;
                // signs: a_1 -> Q with -, a_2 -> P with -, a_3 -> Q with +, a_4 -> P with +, ...
                const int quarter = (k + 1) / 2;
                const double sign = (quarter % 2 == 1) ? -1.0 : 1.0;
                if (k % 2 == 0)
                    p += sign * b;
                else
                    q += sign * b;
                if (b < 1e-17)
                    break;
            }
            const double c = std::cos(x), s = std::sin(x);
            const double cchi = (c + s) * std::numbers::sqrt2 * 0.5;
            const double schi = (s - c) * std::numbers::sqrt2 * 0.5;
            const double amp = std::sqrt(2.0 / (std::numbers::pi * x));
            return {amp * (p * cchi - q * schi), amp * (p * schi + q * cchi)};
        }

        J0Y0 j0y0(double x)
        {
            return (x < crossover) ? series(x) : asymptotic(x);
        }
    } // namespace

    double bessel_j0(double x)
    {
        if (!(x >= 0.0) || !std::isfinite(x))
            throw DomainError("bessel_j0 requires a finite x >= 0, got " + std::to_string(x));
        if (x == 0.0)
            return 1.0;
        return j0y0(x).j0;
    }

    double bessel_y0(double x)
    {
        if (!(x > 0.0) || !std::isfinite(x))
            throw DomainError("bessel_y0 requires a finite x > 0, got " + std::to_string(x));
        return j0y0(x).y0;
    }

    cplx hankel0_2(double x)
    {
        if (!(x > 0.0) || !std::isfinite(x))
            throw DomainError("hankel0_2 requires a finite x > 0, got " + std::to_string(x));
        const J0Y0 v = j0y0(x);
        return {v.j0, -v.y0};
    }

} // namespace physfadkit
