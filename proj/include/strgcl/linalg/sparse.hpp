// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "strgcl/linalg/matrix.hpp"

namespace strgcl {

/// Compressed sparse row matrix; column indices strictly increase within a row.
class SparseCSR {
public:
    SparseCSR() : row_ptr_(1, 0) {}
    SparseCSR(std::size_t rows, std::size_t cols, std::vector<std::uint64_t> row_ptr,
              std::vector<std::uint32_t> col_idx, std::vector<double> values)
        : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
          values_(std::move(values)) {
        validate();
    }

    static SparseCSR identity(std::size_t n) {
        std::vector<std::uint64_t> rp(n + 1);
        std::vector<std::uint32_t> ci(n);
        for (std::size_t i = 0; i < n; ++i) {
            rp[i + 1] = i + 1;
            ci[i] = static_cast<std::uint32_t>(i);
        }
        return SparseCSR(n, n, std::move(rp), std::move(ci), std::vector<double>(n, 1.0));
    }

    static SparseCSR empty(std::size_t rows, std::size_t cols) {
        return SparseCSR(rows, cols, std::vector<std::uint64_t>(rows + 1, 0), {}, {});
    }

    /// Keeps every nonzero entry of `m`.
    template <class T>
    static SparseCSR from_dense(const Matrix<T>& m) {
        std::vector<std::uint64_t> rp(m.rows() + 1, 0);
        std::vector<std::uint32_t> ci;
        std::vector<double> vals;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                if (m(i, j) != T{0}) {
                    ci.push_back(static_cast<std::uint32_t>(j));
                    vals.push_back(static_cast<double>(m(i, j)));
                }
            }
            rp[i + 1] = ci.size();
        }
        return SparseCSR(m.rows(), m.cols(), std::move(rp), std::move(ci), std::move(vals));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return col_idx_.size(); }

    const std::vector<std::uint64_t>& row_ptr() const noexcept { return row_ptr_; }
    const std::vector<std::uint32_t>& col_idx() const noexcept { return col_idx_; }
    const std::vector<double>& values() const noexcept { return values_; }

    std::size_t row_begin(std::size_t i) const noexcept { return static_cast<std::size_t>(row_ptr_[i]); }
    std::size_t row_end(std::size_t i) const noexcept { return static_cast<std::size_t>(row_ptr_[i + 1]); }
    std::size_t row_nnz(std::size_t i) const noexcept { return row_end(i) - row_begin(i); }

    /// Value at (i, j), zero when absent. Binary search inside the row.
    double at(std::size_t i, std::size_t j) const noexcept {
        std::size_t lo = row_begin(i), hi = row_end(i);
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (col_idx_[mid] < j) lo = mid + 1;
            else hi = mid;
        }
        return lo < row_end(i) && col_idx_[lo] == j ? values_[lo] : 0.0;
    }

    DenseMatrix densify() const {
        DenseMatrix d(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t p = row_begin(i); p < row_end(i); ++p) d(i, col_idx_[p]) = values_[p];
        return d;
    }

    SparseCSR transposed() const {
        std::vector<std::uint64_t> rp(cols_ + 1, 0);
        for (auto c : col_idx_) ++rp[c + 1];
        for (std::size_t j = 0; j < cols_; ++j) rp[j + 1] += rp[j];
        std::vector<std::uint64_t> cursor(rp.begin(), rp.end() - 1);
        std::vector<std::uint32_t> ci(nnz());
        std::vector<double> vals(nnz());
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t p = row_begin(i); p < row_end(i); ++p) {
                const auto dst = cursor[col_idx_[p]]++;
                ci[dst] = static_cast<std::uint32_t>(i);
                vals[dst] = values_[p];
            }
        }
        return SparseCSR(cols_, rows_, std::move(rp), std::move(ci), std::move(vals));
    }

    friend bool operator==(const SparseCSR& a, const SparseCSR& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.row_ptr_ == b.row_ptr_ &&
               a.col_idx_ == b.col_idx_ && a.values_ == b.values_;
    }

private:
    void validate() const {
        require(row_ptr_.size() == rows_ + 1, ErrorKind::shape, "CSR row_ptr length must be rows+1");
        require(row_ptr_[0] == 0, ErrorKind::shape, "CSR row_ptr[0] must be 0");
        require(row_ptr_[rows_] == col_idx_.size() && col_idx_.size() == values_.size(), ErrorKind::shape,
                "CSR row_ptr[rows] must equal nnz = len(col_idx) = len(values)");
        for (std::size_t i = 0; i < rows_; ++i) {
            require(row_ptr_[i] <= row_ptr_[i + 1], ErrorKind::shape,
                    "CSR row_ptr decreases at row " + std::to_string(i));
            for (std::size_t p = row_begin(i); p < row_end(i); ++p) {
                require(col_idx_[p] < cols_, ErrorKind::shape,
                        "CSR column index out of range in row " + std::to_string(i));
                require(p == row_begin(i) || col_idx_[p - 1] < col_idx_[p], ErrorKind::shape,
                        "CSR column indices not strictly increasing in row " + std::to_string(i));
            }
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint64_t> row_ptr_;
    std::vector<std::uint32_t> col_idx_;
    std::vector<double> values_;
};

/// s * b
inline DenseMatrix spmm(const SparseCSR& s, const DenseMatrix& b) {
    require(s.cols() == b.rows(), ErrorKind::shape,
            "spmm: sparse " + std::to_string(s.rows()) + "x" + std::to_string(s.cols()) + " times " + shape_str(b));
    DenseMatrix out(s.rows(), b.cols());
    const std::size_t n = b.cols();
    const auto& ci = s.col_idx();
    const auto& vals = s.values();
    for (std::size_t i = 0; i < s.rows(); ++i) {
        double* orow = out.data() + i * n;
        for (std::size_t p = s.row_begin(i); p < s.row_end(i); ++p) {
            const double v = vals[p];
            const double* brow = b.data() + static_cast<std::size_t>(ci[p]) * n;
            for (std::size_t j = 0; j < n; ++j) orow[j] += v * brow[j];
        }
    }
    return out;
}

/// sᵀ * b, scattered row by row in a fixed order.
inline DenseMatrix spmm_transposed(const SparseCSR& s, const DenseMatrix& b) {
    require(s.rows() == b.rows(), ErrorKind::shape, "spmm_transposed: row mismatch");
    DenseMatrix out(s.cols(), b.cols());
    const std::size_t n = b.cols();
    const auto& ci = s.col_idx();
    const auto& vals = s.values();
    for (std::size_t i = 0; i < s.rows(); ++i) {
        const double* brow = b.data() + i * n;
        for (std::size_t p = s.row_begin(i); p < s.row_end(i); ++p) {
            const double v = vals[p];
            double* orow = out.data() + static_cast<std::size_t>(ci[p]) * n;
            for (std::size_t j = 0; j < n; ++j) orow[j] += v * brow[j];
        }
    }
    return out;
}

} // namespace strgcl
