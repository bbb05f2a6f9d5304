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

#include "physfadkit/metrics.hpp"
#include "physfadkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

namespace physfadkit
{
    std::vector<RisConfiguration> random_configs(std::size_t n, std::size_t n_s, std::mt19937_64 &rng)
    {
        std::vector<RisConfiguration> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            std::vector<std::uint8_t> bits(n_s);
            for (auto &b : bits)
                b = static_cast<std::uint8_t>(rng() >> 63);
            out.emplace_back(std::move(bits));
        }
        return out;
    }

    void write_calibration_csv(std::ostream &os, const CalibrationSet &set)
    {
        os << "# physfadkit.calibration/1 seed,config_bits,re_h,im_h\n";
        os << "seed,config_bits,re_h,im_h\n";
        const auto old = os.precision(17);
        for (std::size_t i = 0; i < set.size(); ++i)
            os << set.seed << ',' << set.configs[i].to_string() << ',' << set.h[i].real() << ',' << set.h[i].imag()
               << '\n';
        os.precision(old);
    }

    namespace
    {
        // Cholesky of a real symmetric matrix in place (lower triangle). Returns the smallest pivot
        // relative to the largest diagonal entry, or a negative number on breakdown.
        double cholesky(std::vector<double> &g, std::size_t n)
        {
            double max_diag = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                max_diag = std::max(max_diag, g[i * n + i]);
            double min_rel = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j)
            {
                double d = g[j * n + j];
                for (std::size_t k = 0; k < j; ++k)
                    d -= g[j * n + k] * g[j * n + k];
                if (!(d > 0.0))
                    return -1.0;
                min_rel = std::min(min_rel, d / max_diag);
                const double l = std::sqrt(d);
                g[j * n + j] = l;
                for (std::size_t i = j + 1; i < n; ++i)
                {
                    double s = g[i * n + j];
                    for (std::size_t k = 0; k < j; ++k)
                        s -= g[i * n + k] * g[j * n + k];
                    g[i * n + j] = s / l;
                }
            }
            return min_rel;
        }

        std::vector<cplx> cholesky_solve(const std::vector<double> &l, std::size_t n, std::vector<cplx> b)
        {
            for (std::size_t i = 0; i < n; ++i)
            {
                cplx s = b[i];
                for (std::size_t k = 0; k < i; ++k)
                    s -= l[i * n + k] * b[k];
                b[i] = s / l[i * n + i];
            }
            for (std::size_t i = n; i-- > 0;)
            {
                cplx s = b[i];
                for (std::size_t k = i + 1; k < n; ++k)
                    s -= l[k * n + i] * b[k];
                b[i] = s / l[i * n + i];
            }
            return b;
        }

        cplx mean_of(const std::vector<cplx> &x)
        {
            cplx m = 0.0;
            for (const auto &v : x)
                m += v;
            return x.empty() ? m : m / static_cast<double>(x.size());
        }
    } // namespace

    SisoFit fit_cascaded_siso(const CalibrationSet &cal)
    {
        const std::size_t n = cal.size();
        if (cal.configs.size() != n || n == 0)
            throw LengthMismatch("calibration set has " + std::to_string(cal.configs.size()) + " configs and " +
                                 std::to_string(n) + " channels");
        const std::size_t n_s = cal.configs.front().size();
        const std::size_t p = n_s + 1;
        if (n < p)
            throw RankDeficient("need at least " + std::to_string(p) + " calibration samples, got " +
                                std::to_string(n));

        // Normal equations with design rows [1, c_1, ..., c_NS]
        std::vector<double> g(p * p, 0.0);
        std::vector<cplx> rhs(p, 0.0);
        std::vector<double> row(p);
        for (std::size_t i = 0; i < n; ++i)
        {
            const auto &cfg = cal.configs[i];
            if (cfg.size() != n_s)
                throw LengthMismatch("calibration configs have differing lengths");
            row[0] = 1.0;
            for (std::size_t j = 0; j < n_s; ++j)
                row[j + 1] = cfg.on(j) ? 1.0 : -1.0;
            for (std::size_t a = 0; a < p; ++a)
            {
                rhs[a] += row[a] * cal.h[i];
                for (std::size_t b = 0; b <= a; ++b)
                    g[a * p + b] += row[a] * row[b];
            }
        }
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = a + 1; b < p; ++b)
                g[a * p + b] = g[b * p + a];

        std::vector<double> l = g;
        double min_rel = cholesky(l, p);
        if (min_rel <= 0.0)
        {
            // Rounding pushed a pivot to zero; retry with a tiny ridge
            l = g;
            double max_diag = 0.0;
            for (std::size_t a = 0; a < p; ++a)
                max_diag = std::max(max_diag, g[a * p + a]);
            for (std::size_t a = 0; a < p; ++a)
                l[a * p + a] += 1e-12 * max_diag;
            min_rel = cholesky(l, p);
        }
        if (!(min_rel > 1e-10))
            throw RankDeficient("calibration configurations do not span the affine model (retry with another seed)");

        const std::vector<cplx> x = cholesky_solve(l, p, rhs);
        SisoFit fit;
        fit.h0 = x[0];
        fit.t.assign(x.begin() + 1, x.end());
        return fit;
    }

    cplx predict_siso(const SisoFit &fit, const RisConfiguration &c)
    {
        if (c.size() != fit.t.size())
            throw LengthMismatch("config length " + std::to_string(c.size()) + " does not match model with " +
                                 std::to_string(fit.t.size()) + " elements");
        cplx h = fit.h0;
        for (std::size_t i = 0; i < c.size(); ++i)
            h += c.on(i) ? fit.t[i] : -fit.t[i];
        return h;
    }

    double complex_sd(const std::vector<cplx> &x)
    {
        if (x.empty())
            return 0.0;
        const cplx m = mean_of(x);
        double s = 0.0;
        for (const auto &v : x)
            s += std::norm(v - m);
        return std::sqrt(s / static_cast<double>(x.size()));
    }

    LinearityReport linearity_metric(const SisoFit &model, const CalibrationSet &test)
    {
        if (test.configs.size() != test.h.size() || test.h.empty())
            throw LengthMismatch("test set is empty or inconsistent");
        std::vector<cplx> resid(test.size());
        for (std::size_t i = 0; i < test.size(); ++i)
            resid[i] = test.h[i] - predict_siso(model, test.configs[i]);
        LinearityReport r;
        r.h0 = model.h0;
        r.t = model.t;
        r.n_test = test.size();
        const double num = complex_sd(test.h);
        const double den = complex_sd(resid);
        if (den == 0.0)
        {
            r.degenerate = true;
            r.zeta = std::numeric_limits<double>::infinity();
            r.zeta_db = std::numeric_limits<double>::infinity();
        }
        else
        {
            r.zeta = num / den;
            r.zeta_db = 20.0 * std::log10(r.zeta);
        }
        return r;
    }

    LinearityReport linearity_metric(const CalibrationSet &cal, const CalibrationSet &test)
    {
        LinearityReport r = linearity_metric(fit_cascaded_siso(cal), test);
        r.n_calibration = cal.size();
        return r;
    }

    // ---------------------------------------------------------------------------------------------

    ImpulseResponse impulse_response_from_spectrum(const std::vector<cplx> &spectrum, double bandwidth,
                                                   SpectralWindow window)
    {
        const std::size_t n = spectrum.size();
        if (n == 0 || !(bandwidth > 0.0))
            throw DomainError("impulse response needs a non-empty spectrum and positive bandwidth");
        std::vector<cplx> x = spectrum;
        if (window == SpectralWindow::hann)
            for (std::size_t k = 0; k < n; ++k)
                x[k] *= 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));

        // Direct inverse DFT with a twiddle table; n is at most a few thousand
        std::vector<cplx> tw(n);
        for (std::size_t k = 0; k < n; ++k)
        {
            const double ph = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
            tw[k] = cplx(std::cos(ph), std::sin(ph));
        }
        ImpulseResponse ir;
        ir.dt = 1.0 / bandwidth;
        ir.power.resize(n);
        for (std::size_t m = 0; m < n; ++m)
        {
            cplx s = 0.0;
            std::size_t idx = 0;
            for (std::size_t k = 0; k < n; ++k)
            {
                s += x[k] * tw[idx];
                idx += m;
                if (idx >= n)
                    idx -= n;
            }
            s /= static_cast<double>(n);
            ir.power[m] = std::norm(s);
        }
        return ir;
    }

    std::vector<double> frequency_grid(const ImpulseOptions &opt)
    {
        if (!(opt.f_lo > 0.0) || !(opt.f_hi > opt.f_lo))
            throw DomainError("impulse response band must satisfy 0 < f_lo < f_hi");
        if (opt.n_f < 64 || (opt.n_f & (opt.n_f - 1)) != 0)
            throw DomainError("n_f must be a power of two and at least 64, got " + std::to_string(opt.n_f));
        const double b = opt.f_hi - opt.f_lo;
        std::vector<double> f(opt.n_f);
        for (std::size_t k = 0; k < opt.n_f; ++k)
            f[k] = opt.f_lo + b * static_cast<double>(k) / static_cast<double>(opt.n_f);
        return f;
    }

    ImpulseResponse impulse_response(const Scene &s, const RisConfiguration &c, const ImpulseOptions &opt)
    {
        const std::vector<double> freqs = frequency_grid(opt);
        if (opt.rx >= s.count(Group::R) || opt.tx >= s.count(Group::T))
            throw DomainError("impulse response antenna index out of range");
        const Scene sc = apply_ris_config(s, c);
        const BlockIndexMap map = sc.block_map();
        std::vector<cplx> spectrum(freqs.size());
        for (std::size_t k = 0; k < freqs.size(); ++k)
        {
            // One solve per frequency: only one column of W^-1 is needed
            const InteractionMatrix im = assemble_interaction_matrix(sc, freqs[k]);
            std::vector<cplx> e(map.size(), 0.0);
            e[map.offset(Group::T) + opt.tx] = 1.0;
            const std::vector<cplx> col = LuFactorization(im.w).solve(std::move(e));
            spectrum[k] = col[map.offset(Group::R) + opt.rx];
        }
        return impulse_response_from_spectrum(spectrum, opt.f_hi - opt.f_lo, opt.window);
    }

    ReverbReport reverberation_time(const std::vector<double> &envelope, double dt, const ReverbOptions &opt)
    {
        if (!(opt.window_db > 0.0))
            throw DomainError("window_db must be positive");
        if (!(dt > 0.0))
            throw DomainError("sample spacing must be positive");
        const std::size_t n = envelope.size();
        for (double v : envelope)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw DomainError("envelope must be finite and non-negative");
        if (n < opt.min_samples || n == 0)
            throw NoDecayDetected("envelope has only " + std::to_string(n) + " samples");

        // Centered moving average that shrinks symmetrically near the ends
        const std::size_t half = opt.smoothing / 2;
        std::vector<double> sm(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            const std::size_t h = std::min({half, i, n - 1 - i});
            double s = 0.0;
            for (std::size_t j = i - h; j <= i + h; ++j)
                s += envelope[j];
            sm[i] = s / static_cast<double>(2 * h + 1);
        }

        const std::size_t peak = static_cast<std::size_t>(std::max_element(sm.begin(), sm.end()) - sm.begin());
        if (!(sm[peak] > 0.0))
            throw NoDecayDetected("envelope is identically zero");
        const double thr = sm[peak] * std::pow(10.0, -opt.window_db / 10.0);
        // The window ends where the envelope first falls below the threshold, so that isolated late
        // arrivals after a gap are not mistaken for a tail
        std::size_t last = peak;
        while (last + 1 < n && sm[last + 1] >= thr)
            ++last;
        const std::size_t count = last - peak + 1;
        if (count < opt.min_samples)
            throw NoDecayDetected("decay window spans only " + std::to_string(count) + " samples");

        // Least-squares line through (t, ln sm)
        double st = 0.0, sy = 0.0;
        std::vector<double> y(count);
        for (std::size_t i = 0; i < count; ++i)
        {
            y[i] = std::log(std::max(sm[peak + i], std::numeric_limits<double>::min()));
            st += static_cast<double>(i) * dt;
            sy += y[i];
        }
        const double mt = st / static_cast<double>(count), my = sy / static_cast<double>(count);
        double stt = 0.0, sty = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < count; ++i)
        {
            const double a = static_cast<double>(i) * dt - mt, b = y[i] - my;
            stt += a * a;
            sty += a * b;
            syy += b * b;
        }
        const double slope = sty / stt;
        const double r2 = (syy > 0.0) ? (sty * sty) / (stt * syy) : 0.0;
        if (!(slope < 0.0))
            throw NoDecayDetected("fitted log-envelope slope is not negative");
        if (r2 < 0.5)
            throw NoDecayDetected("fit quality r^2 = " + std::to_string(r2) + " below 0.5");

        ReverbReport rep;
        rep.tau = -1.0 / slope;
        rep.q = 2.0 * std::numbers::pi * opt.f0 * rep.tau;
        rep.window_db = opt.window_db;
        rep.r2 = r2;
        rep.first = peak;
        rep.last = last;
        return rep;
    }

} // namespace physfadkit
