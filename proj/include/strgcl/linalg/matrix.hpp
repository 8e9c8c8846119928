// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <new>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "strgcl/error.hpp"

namespace strgcl {

/// Fixed 64-byte alignment. Eigen's vectorized reductions peel a different
/// number of leading elements depending on the address, which changes the
/// rounding; a fixed base alignment keeps results independent of the heap.
template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), alignment)); }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

    template <class U>
    friend bool operator==(const AlignedAllocator&, const AlignedAllocator<U>&) noexcept { return true; }
};

/// Row-major dense matrix. `Matrix<double>` carries all training math;
/// `Matrix<float>` is the storage mode for on-disk feature matrices.
template <class T>
class Matrix {
public:
    using value_type = T;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(data.begin(), data.end()) {
        require(data_.size() == rows_ * cols_, ErrorKind::shape,
                "data length " + std::to_string(data_.size()) + " != " + std::to_string(rows_) +
                    "x" + std::to_string(cols_));
    }
    Matrix(std::initializer_list<std::initializer_list<T>> rows) {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            require(r.size() == cols_, ErrorKind::shape, "ragged initializer list");
            data_.insert(data_.end(), r.begin(), r.end());
        }
    }

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }
    static Matrix column(std::span<const T> values) {
        return Matrix(values.size(), 1, std::vector<T>(values.begin(), values.end()));
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T* data() noexcept { return data_.data(); }
    const T* data() const noexcept { return data_.data(); }
    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<T> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const T> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    template <class U>
    Matrix<U> cast() const {
        Matrix<U> out(rows_, cols_);
        std::transform(data_.begin(), data_.end(), out.data(), [](T v) { return static_cast<U>(v); });
        return out;
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    bool all_finite() const noexcept {
        // v - v is NaN exactly for Inf and NaN; the branch-free form vectorizes.
        bool ok = true;
        for (T v : data_) ok &= (v - v == T{0});
        return ok;
    }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T, AlignedAllocator<T>> data_;
};

using DenseMatrix = Matrix<double>;
using FeatureMatrix = Matrix<float>;

inline std::string shape_str(const DenseMatrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

inline void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* op) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorKind::shape,
            std::string(op) + ": " + shape_str(a) + " vs " + shape_str(b));
}

namespace detail {
using RowMajorMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstRowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

inline ConstRowMajorMap view(const DenseMatrix& m) {
    return {m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}
inline RowMajorMap view(DenseMatrix& m) {
    return {m.data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}
} // namespace detail

enum class Trans { no, yes };

/// out = alpha * op(a) * op(b). The blocked kernel is Eigen's; its reduction
/// order depends only on shapes and thread count, so results are reproducible.
inline DenseMatrix gemm(const DenseMatrix& a, Trans ta, const DenseMatrix& b, Trans tb, double alpha = 1.0) {
    const std::size_t m = ta == Trans::no ? a.rows() : a.cols();
    const std::size_t ka = ta == Trans::no ? a.cols() : a.rows();
    const std::size_t kb = tb == Trans::no ? b.rows() : b.cols();
    const std::size_t n = tb == Trans::no ? b.cols() : b.rows();
    require(ka == kb, ErrorKind::shape, "matmul: inner dimensions " + shape_str(a) + " and " + shape_str(b));
    DenseMatrix out(m, n);
    if (m == 0 || n == 0 || ka == 0) return out;
    auto o = detail::view(out);
    auto av = detail::view(a);
    auto bv = detail::view(b);
    if (ta == Trans::no && tb == Trans::no) o.noalias() = alpha * (av * bv);
    else if (ta == Trans::no) o.noalias() = alpha * (av * bv.transpose());
    else if (tb == Trans::no) o.noalias() = alpha * (av.transpose() * bv);
    else o.noalias() = alpha * (av.transpose() * bv.transpose());
    return out;
}

inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) { return gemm(a, Trans::no, b, Trans::no); }

/// a += alpha * b
inline void axpy(DenseMatrix& a, const DenseMatrix& b, double alpha = 1.0) {
    require_same_shape(a, b, "axpy");
    double* pa = a.data();
    const double* pb = b.data();
    for (std::size_t i = 0; i < a.size(); ++i) pa[i] += alpha * pb[i];
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

inline double frobenius_norm(const DenseMatrix& a) {
    double s = 0.0;
    for (double v : a.values()) s += v * v;
    return std::sqrt(s);
}

} // namespace strgcl
