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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace physfadkit
{
    namespace
    {
        // y[0..n) -= s * x[0..n) on interleaved complex storage. Written out by hand so the
        // compiler does not emit the NaN-recovery branch of the C99 complex multiply.
        inline void axpy_neg(std::size_t n, cplx s, const cplx *x, cplx *y) noexcept
        {
            const double sr = s.real(), si = s.imag();
            const double *xp = reinterpret_cast<const double *>(x);
            double *yp = reinterpret_cast<double *>(y);
            for (std::size_t j = 0; j < n; ++j)
            {
                const double xr = xp[2 * j], xi = xp[2 * j + 1];
                yp[2 * j] -= sr * xr - si * xi;
                yp[2 * j + 1] -= sr * xi + si * xr;
            }
        }

        inline void axpy(std::size_t n, cplx s, const cplx *x, cplx *y) noexcept
        {
            axpy_neg(n, -s, x, y);
        }

        void require_same_shape(const ComplexMatrix &a, const ComplexMatrix &b, const char *op)
        {
            if (a.rows() != b.rows() || a.cols() != b.cols())
                throw LengthMismatch(std::string(op) + ": shape " + std::to_string(a.rows()) + "x" +
                                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                                     std::to_string(b.cols()));
        }
    } // namespace

    ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, cplx(0.0, 0.0))
    {
    }

    ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries))
    {
        if (data_.size() != rows * cols)
            throw LengthMismatch("ComplexMatrix: " + std::to_string(data_.size()) + " entries for a " +
                                 std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
    }

    ComplexMatrix ComplexMatrix::identity(std::size_t n)
    {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }

    ComplexMatrix ComplexMatrix::diagonal(const std::vector<cplx> &d)
    {
        ComplexMatrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i)
            m(i, i) = d[i];
        return m;
    }

    ComplexMatrix ComplexMatrix::column(const std::vector<cplx> &v)
    {
        return ComplexMatrix(v.size(), 1, v);
    }

    ComplexMatrix ComplexMatrix::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const
    {
        if (r0 + nr > rows_ || c0 + nc > cols_)
            throw LengthMismatch("block: requested block exceeds matrix bounds");
        ComplexMatrix b(nr, nc);
        for (std::size_t i = 0; i < nr; ++i)
            std::copy_n(row_ptr(r0 + i) + c0, nc, b.row_ptr(i));
        return b;
    }

    void ComplexMatrix::set_block(std::size_t r0, std::size_t c0, const ComplexMatrix &b)
    {
        if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_)
            throw LengthMismatch("set_block: block exceeds matrix bounds");
        for (std::size_t i = 0; i < b.rows(); ++i)
            std::copy_n(b.row_ptr(i), b.cols(), row_ptr(r0 + i) + c0);
    }

    std::vector<cplx> ComplexMatrix::diag() const
    {
        std::vector<cplx> d(std::min(rows_, cols_));
        for (std::size_t i = 0; i < d.size(); ++i)
            d[i] = (*this)(i, i);
        return d;
    }

    ComplexMatrix ComplexMatrix::transpose() const
    {
        ComplexMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    ComplexMatrix ComplexMatrix::adjoint() const
    {
        ComplexMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = std::conj((*this)(i, j));
        return t;
    }

    double ComplexMatrix::max_abs() const noexcept
    {
        double m = 0.0;
        for (const auto &v : data_)
            m = std::max(m, std::abs(v));
        return m;
    }

    double ComplexMatrix::frobenius() const noexcept
    {
        double s = 0.0;
        for (const auto &v : data_)
            s += std::norm(v);
        return std::sqrt(s);
    }

    double ComplexMatrix::norm1() const noexcept
    {
        std::vector<double> col(cols_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                col[j] += std::abs((*this)(i, j));
        return col.empty() ? 0.0 : *std::max_element(col.begin(), col.end());
    }

    bool ComplexMatrix::all_finite() const noexcept
    {
        return std::all_of(data_.begin(), data_.end(),
                           [](const cplx &v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
    }

    ComplexMatrix &ComplexMatrix::operator+=(const ComplexMatrix &b)
    {
        require_same_shape(*this, b, "operator+");
        for (std::size_t i = 0; i < data_.size(); ++i)
            data_[i] += b.data_[i];
        return *this;
    }

    ComplexMatrix &ComplexMatrix::operator-=(const ComplexMatrix &b)
    {
        require_same_shape(*this, b, "operator-");
        for (std::size_t i = 0; i < data_.size(); ++i)
            data_[i] -= b.data_[i];
        return *this;
    }

    ComplexMatrix &ComplexMatrix::operator*=(cplx s) noexcept
    {
        for (auto &v : data_)
            v *= s;
        return *this;
    }

    ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }
    ComplexMatrix operator-(ComplexMatrix a) { return a *= -1.0; }

    ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b)
    {
        if (a.cols() != b.rows())
            throw LengthMismatch("operator*: inner dimensions " + std::to_string(a.cols()) + " and " +
                                 std::to_string(b.rows()));
        ComplexMatrix c(a.rows(), b.cols());
        const std::size_t n = b.cols();
        for (std::size_t i = 0; i < a.rows(); ++i)
        {
            cplx *ci = c.row_ptr(i);
            const cplx *ai = a.row_ptr(i);
            for (std::size_t k = 0; k < a.cols(); ++k)
                if (ai[k] != 0.0)
                    axpy(n, ai[k], b.row_ptr(k), ci);
        }
        return c;
    }

    ComplexMatrix scale_rows(const std::vector<cplx> &d, ComplexMatrix a)
    {
        if (d.size() != a.rows())
            throw LengthMismatch("scale_rows: diagonal length does not match row count");
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j)
                a(i, j) *= d[i];
        return a;
    }

    ComplexMatrix scale_cols(ComplexMatrix a, const std::vector<cplx> &d)
    {
        if (d.size() != a.cols())
            throw LengthMismatch("scale_cols: diagonal length does not match column count");
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < a.cols(); ++j)
                a(i, j) *= d[j];
        return a;
    }

    BlockIndexMap::BlockIndexMap(std::size_t n_t, std::size_t n_r, std::size_t n_e, std::size_t n_s)
        : lengths_{n_t, n_r, n_e, n_s}
    {
        offsets_[0] = 0;
        for (std::size_t g = 1; g < 4; ++g)
            offsets_[g] = offsets_[g - 1] + lengths_[g - 1];
    }

    ComplexMatrix group_block(const ComplexMatrix &m, const BlockIndexMap &map, Group rg, Group cg)
    {
        if (m.rows() != map.size() || m.cols() != map.size())
            throw LengthMismatch("group_block: matrix size does not match block map");
        return m.block(map.offset(rg), map.offset(cg), map.length(rg), map.length(cg));
    }

    // ---------------------------------------------------------------------------------------------
    // LU with partial pivoting

    LuFactorization::LuFactorization(ComplexMatrix a) : lu_(std::move(a))
    {
        if (!lu_.is_square())
            throw LengthMismatch("LU factorization requires a square matrix");
        const std::size_t n = lu_.rows();
        perm_.resize(n);
        std::iota(perm_.begin(), perm_.end(), std::size_t{0});

        constexpr double tiny = std::numeric_limits<double>::min();
        for (std::size_t k = 0; k < n; ++k)
        {
            std::size_t p = k;
            double best = std::abs(lu_(k, k));
            for (std::size_t i = k + 1; i < n; ++i)
            {
                const double v = std::abs(lu_(i, k));
                if (v > best)
                    best = v, p = i;
            }
            if (!(best > tiny) || !std::isfinite(best))
                throw SingularMatrix("pivot " + std::to_string(k) + " has magnitude " + std::to_string(best));
            if (p != k)
            {
                std::swap_ranges(lu_.row_ptr(k), lu_.row_ptr(k) + n, lu_.row_ptr(p));
                std::swap(perm_[k], perm_[p]);
            }
            const cplx inv_pivot = 1.0 / lu_(k, k);
            const cplx *rk = lu_.row_ptr(k);
            for (std::size_t i = k + 1; i < n; ++i)
            {
                cplx *ri = lu_.row_ptr(i);
                if (ri[k] == 0.0)
                    continue;
                const cplx l = ri[k] * inv_pivot;
                ri[k] = l;
                axpy_neg(n - k - 1, l, rk + k + 1, ri + k + 1);
            }
        }
    }

    std::vector<cplx> LuFactorization::solve(std::vector<cplx> b) const
    {
        const std::size_t n = size();
        if (b.size() != n)
            throw LengthMismatch("LU solve: right-hand side length");
        std::vector<cplx> x(n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = b[perm_[i]];
        for (std::size_t i = 0; i < n; ++i)
        {
            const cplx *ri = lu_.row_ptr(i);
            cplx s = x[i];
            for (std::size_t j = 0; j < i; ++j)
                s -= ri[j] * x[j];
            x[i] = s;
        }
        for (std::size_t i = n; i-- > 0;)
        {
            const cplx *ri = lu_.row_ptr(i);
            cplx s = x[i];
            for (std::size_t j = i + 1; j < n; ++j)
                s -= ri[j] * x[j];
            x[i] = s / ri[i];
        }
        return x;
    }

    std::vector<cplx> LuFactorization::solve_transposed(std::vector<cplx> b) const
    {
        // A^T = U^T L^T P, so solve U^T y = b, L^T z = y, x = P^T z
        const std::size_t n = size();
        if (b.size() != n)
            throw LengthMismatch("LU solve: right-hand side length");
        for (std::size_t i = 0; i < n; ++i)
        {
            b[i] /= lu_(i, i);
            const cplx *ri = lu_.row_ptr(i);
            for (std::size_t j = i + 1; j < n; ++j)
                b[j] -= ri[j] * b[i];
        }
        for (std::size_t i = n; i-- > 0;)
        {
            const cplx *ri = lu_.row_ptr(i);
            for (std::size_t j = 0; j < i; ++j)
                b[j] -= ri[j] * b[i];
        }
        std::vector<cplx> x(n);
        for (std::size_t i = 0; i < n; ++i)
            x[perm_[i]] = b[i];
        return x;
    }

    ComplexMatrix LuFactorization::solve(const ComplexMatrix &b) const
    {
        const std::size_t n = size();
        if (b.rows() != n)
            throw LengthMismatch("LU solve: right-hand side rows");
        const std::size_t m = b.cols();
        ComplexMatrix x(n, m);
        for (std::size_t i = 0; i < n; ++i)
            std::copy_n(b.row_ptr(perm_[i]), m, x.row_ptr(i));
        // Row-oriented substitution keeps the inner loops contiguous
        for (std::size_t i = 0; i < n; ++i)
        {
            const cplx *ri = lu_.row_ptr(i);
            cplx *xi = x.row_ptr(i);
            for (std::size_t j = 0; j < i; ++j)
                if (ri[j] != 0.0)
                    axpy_neg(m, ri[j], x.row_ptr(j), xi);
        }
        for (std::size_t i = n; i-- > 0;)
        {
            const cplx *ri = lu_.row_ptr(i);
            cplx *xi = x.row_ptr(i);
            for (std::size_t j = i + 1; j < n; ++j)
                if (ri[j] != 0.0)
                    axpy_neg(m, ri[j], x.row_ptr(j), xi);
            const cplx inv = 1.0 / ri[i];
            for (std::size_t c = 0; c < m; ++c)
                xi[c] *= inv;
        }
        return x;
    }

    ComplexMatrix LuFactorization::inverse() const
    {
        return solve(ComplexMatrix::identity(size()));
    }

    InverseResult invert_with_diagnostics(const ComplexMatrix &m)
    {
        if (!m.is_square())
            throw LengthMismatch("invert: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
        InverseResult out;
        if (m.rows() == 0)
        {
            out.rcond = 1.0;
            return out;
        }
        out.inverse = LuFactorization(m).inverse();
        if (!out.inverse.all_finite())
            throw SingularMatrix("inverse contains non-finite entries");
        out.rcond = 1.0 / (m.norm1() * out.inverse.norm1());
        if (!(out.rcond > 1e-14))
            throw SingularMatrix("reciprocal condition number " + std::to_string(out.rcond) + " below 1e-14");
        out.ill_conditioned = out.rcond < 1e-12;
        return out;
    }

    ComplexMatrix invert(const ComplexMatrix &m)
    {
        return invert_with_diagnostics(m).inverse;
    }

    // ---------------------------------------------------------------------------------------------
    // Norms and power series

    double spectral_norm(const ComplexMatrix &a)
    {
        if (a.empty())
            return 0.0;
        const double scale = a.max_abs();
        if (scale == 0.0)
            return 0.0;
        if (!std::isfinite(scale))
            return std::numeric_limits<double>::infinity();
        // Scaled copy keeps the Gram matrix away from overflow; eigenvalues of the smaller Gram
        // matrix are the squared singular values
        using RowMajor = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const Eigen::Map<const RowMajor> m(a.data(), static_cast<Eigen::Index>(a.rows()),
                                           static_cast<Eigen::Index>(a.cols()));
        const Eigen::MatrixXcd b = m / scale;
        const Eigen::MatrixXcd g = (a.rows() >= a.cols()) ? Eigen::MatrixXcd(b.adjoint() * b)
                                                         : Eigen::MatrixXcd(b * b.adjoint());
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw NonConvergence("spectral_norm: Hermitian eigenvalue iteration failed");
        return scale * std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
    }

    SpectralRadiusEstimate spectral_radius_estimate(const ComplexMatrix &a, std::size_t m_max)
    {
        if (!a.is_square())
            throw LengthMismatch("spectral_radius_estimate: matrix must be square");
        SpectralRadiusEstimate out;
        if (a.empty())
            return out;
        ComplexMatrix p = a;
        std::size_t m = 1;
        out.value = spectral_norm(a);
        out.m = 1;
        while (true)
        {
            if (out.value == 0.0)
                return out;
            if (2 * m > std::max<std::size_t>(m_max, 1))
                break;
            const double pn = p.max_abs();
            if (pn < 1e-150)
                break; // squaring would underflow; the current estimate stands
            p = p * p;
            m *= 2;
            out.m = m;
            if (!p.all_finite())
            {
                out.value = std::numeric_limits<double>::infinity();
                out.overflow = true;
                return out;
            }
            const double nrm = spectral_norm(p);
            if (!std::isfinite(nrm))
            {
                out.value = std::numeric_limits<double>::infinity();
                out.overflow = true;
                return out;
            }
            out.value = std::min(out.value, std::pow(nrm, 1.0 / double(m)));
        }
        return out;
    }

    ComplexMatrix neumann_partial_sum(const ComplexMatrix &x, std::size_t k_terms)
    {
        if (!x.is_square())
            throw LengthMismatch("neumann_partial_sum: matrix must be square");
        if (k_terms < 1)
            throw DomainError("neumann_partial_sum: K must be at least 1");
        ComplexMatrix power = ComplexMatrix::identity(x.rows());
        ComplexMatrix sum = power;
        for (std::size_t k = 1; k < k_terms; ++k)
        {
            power = power * x;
            sum += power;
        }
        return sum;
    }

} // namespace physfadkit
