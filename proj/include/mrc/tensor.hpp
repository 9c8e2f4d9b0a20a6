#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "mrc/errors.hpp"

namespace mrc {

/// Dense row-major matrix. Vectors are stored as 1 x n; scalars as 1 x 1.
template <typename Real>
class Tensor {
 public:
  using value_type = Real;

  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, Real fill = Real(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw ShapeError("tensor dimensions must be positive");
  }
  Tensor(std::size_t rows, std::size_t cols, std::vector<Real> values)
      : rows_(rows), cols_(cols), data_(std::move(values)) {
    if (rows == 0 || cols == 0) throw ShapeError("tensor dimensions must be positive");
    if (data_.size() != rows * cols)
      throw ShapeError("value count " + std::to_string(data_.size()) + " does not match shape " +
                       std::to_string(rows) + "x" + std::to_string(cols));
  }

  static Tensor from_rows(std::initializer_list<std::initializer_list<Real>> rows);
  static Tensor scalar(Real v) { return Tensor(1, 1, v); }
  static Tensor row(std::span<const Real> v) {
    return Tensor(1, v.size(), std::vector<Real>(v.begin(), v.end()));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  std::array<std::size_t, 2> shape() const { return {rows_, cols_}; }
  bool same_shape(const Tensor& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }
  bool empty() const { return data_.empty(); }

  Real& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  Real operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  Real& operator[](std::size_t i) { return data_[i]; }
  Real operator[](std::size_t i) const { return data_[i]; }

  std::span<Real> values() { return data_; }
  std::span<const Real> values() const { return data_; }
  std::span<Real> row_span(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Real> row_span(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  Real item() const;
  bool all_finite() const;
  std::string shape_string() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

  template <typename Other>
  Tensor<Other> cast() const {
    std::vector<Other> out(data_.begin(), data_.end());
    return Tensor<Other>(rows_, cols_, std::move(out));
  }

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

/// Row-major 0/1 mask with the same layout as a Tensor.
struct Mask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<unsigned char> bits;

  Mask() = default;
  Mask(std::size_t r, std::size_t c, bool fill = true) : rows(r), cols(c), bits(r * c, fill ? 1 : 0) {}

  // Every row shares the same column pattern.
  static Mask broadcast_columns(std::size_t rows, const std::vector<unsigned char>& col_mask);

  bool operator()(std::size_t r, std::size_t c) const { return bits[r * cols + c] != 0; }
  void set(std::size_t r, std::size_t c, bool v) { bits[r * cols + c] = v ? 1 : 0; }
};

// Naive kernels shared by the tape and the oracles' callers. Summation order
// is fixed (left to right over the inner index).
template <typename Real>
Tensor<Real> matmul_values(const Tensor<Real>& a, const Tensor<Real>& b);
template <typename Real>
Tensor<Real> matmul_nt_values(const Tensor<Real>& a, const Tensor<Real>& b);
template <typename Real>
Tensor<Real> matmul_tn_values(const Tensor<Real>& a, const Tensor<Real>& b);
template <typename Real>
Tensor<Real> transpose_values(const Tensor<Real>& a);

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace mrc
