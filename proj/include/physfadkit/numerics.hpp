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

#ifndef PHYSFADKIT_NUMERICS_HPP
#define PHYSFADKIT_NUMERICS_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace physfadkit
{
    using cplx = std::complex<double>;

    /// Dense complex matrix stored in row-major order.
    class ComplexMatrix
    {
    public:
        ComplexMatrix() = default;
        ComplexMatrix(std::size_t rows, std::size_t cols);
        ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

        static ComplexMatrix identity(std::size_t n);
        static ComplexMatrix diagonal(const std::vector<cplx> &d);
        static ComplexMatrix column(const std::vector<cplx> &v);

        std::size_t rows() const noexcept { return rows_; }
        std::size_t cols() const noexcept { return cols_; }
        std::size_t size() const noexcept { return data_.size(); }
        bool empty() const noexcept { return data_.empty(); }
        bool is_square() const noexcept { return rows_ == cols_; }

        cplx &operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
        const cplx &operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

        cplx *data() noexcept { return data_.data(); }
        const cplx *data() const noexcept { return data_.data(); }
        const std::vector<cplx> &entries() const noexcept { return data_; }
        cplx *row_ptr(std::size_t i) noexcept { return data_.data() + i * cols_; }
        const cplx *row_ptr(std::size_t i) const noexcept { return data_.data() + i * cols_; }

        ComplexMatrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
        void set_block(std::size_t r0, std::size_t c0, const ComplexMatrix &b);
        std::vector<cplx> diag() const;

        ComplexMatrix transpose() const;
        ComplexMatrix adjoint() const;

        double max_abs() const noexcept;     // max-norm, max |a_ij|
        double frobenius() const noexcept;
        double norm1() const noexcept;       // max column sum
        bool all_finite() const noexcept;

        ComplexMatrix &operator+=(const ComplexMatrix &b);
        ComplexMatrix &operator-=(const ComplexMatrix &b);
        ComplexMatrix &operator*=(cplx s) noexcept;

        bool operator==(const ComplexMatrix &) const = default;

    private:
        std::size_t rows_ = 0;
        std::size_t cols_ = 0;
        std::vector<cplx> data_;
    };

    ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b);
    ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b);
    ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b);
    ComplexMatrix operator*(cplx s, ComplexMatrix a);
    ComplexMatrix operator-(ComplexMatrix a);

    // Scales row i of a by d[i], i.e. diag(d) * a
    ComplexMatrix scale_rows(const std::vector<cplx> &d, ComplexMatrix a);
    // Scales column j of a by d[j], i.e. a * diag(d)
    ComplexMatrix scale_cols(ComplexMatrix a, const std::vector<cplx> &d);

    /// Dipole groups in indexing order
    enum class Group : std::size_t
    {
        T = 0,
        R = 1,
        E = 2,
        S = 3
    };

    /// Offsets and lengths of the four dipole groups in the global index space.
    class BlockIndexMap
    {
    public:
        BlockIndexMap() = default;
        BlockIndexMap(std::size_t n_t, std::size_t n_r, std::size_t n_e, std::size_t n_s);

        std::size_t offset(Group g) const noexcept { return offsets_[static_cast<std::size_t>(g)]; }
        std::size_t length(Group g) const noexcept { return lengths_[static_cast<std::size_t>(g)]; }
        std::size_t size() const noexcept { return offsets_[3] + lengths_[3]; }

        bool operator==(const BlockIndexMap &) const = default;

    private:
        std::array<std::size_t, 4> offsets_{};
        std::array<std::size_t, 4> lengths_{};
    };

    // Extracts the (row group, col group) block of an N x N matrix laid out per the map
    ComplexMatrix group_block(const ComplexMatrix &m, const BlockIndexMap &map, Group rg, Group cg);

    /// LU factorization with partial pivoting, P*A = L*U, stored in place.
    class LuFactorization
    {
    public:
        explicit LuFactorization(ComplexMatrix a);

        std::size_t size() const noexcept { return lu_.rows(); }
        ComplexMatrix solve(const ComplexMatrix &b) const;
        std::vector<cplx> solve(std::vector<cplx> b) const;
        ComplexMatrix inverse() const;

        // Solves A^T x = b. Useful because all interaction matrices are complex symmetric.
        std::vector<cplx> solve_transposed(std::vector<cplx> b) const;

    private:
        ComplexMatrix lu_;
        std::vector<std::size_t> perm_;
    };

    struct InverseResult
    {
        ComplexMatrix inverse;
        double rcond = 0.0;          // 1 / (||A||_1 ||A^-1||_1)
        bool ill_conditioned = false; // rcond < 1e-12
    };

    InverseResult invert_with_diagnostics(const ComplexMatrix &m);
    ComplexMatrix invert(const ComplexMatrix &m);

    double spectral_norm(const ComplexMatrix &a);

    struct SpectralRadiusEstimate
    {
        double value = 0.0;   // min over tested m of ||A^m||_2^(1/m), +inf on overflow
        std::size_t m = 1;    // largest power actually used
        bool overflow = false;
    };

    SpectralRadiusEstimate spectral_radius_estimate(const ComplexMatrix &a, std::size_t m_max);

    // Sum_{k<K} X^k
    ComplexMatrix neumann_partial_sum(const ComplexMatrix &x, std::size_t k_terms);

    double bessel_j0(double x);
    double bessel_y0(double x);
    cplx hankel0_2(double x);

} // namespace physfadkit

#endif
