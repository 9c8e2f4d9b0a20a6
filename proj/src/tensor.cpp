#include "mrc/tensor.hpp"

#include <cmath>

namespace mrc {

template <typename Real>
Tensor<Real> Tensor<Real>::from_rows(std::initializer_list<std::initializer_list<Real>> rows) {
  const std::size_t r = rows.size();
  if (r == 0) throw ShapeError("from_rows: no rows");
  const std::size_t c = rows.begin()->size();
  std::vector<Real> values;
  values.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw ShapeError("from_rows: ragged rows");
    values.insert(values.end(), row.begin(), row.end());
  }
  return Tensor(r, c, std::move(values));
}

template <typename Real>
Real Tensor<Real>::item() const {
  if (data_.size() != 1) throw ShapeError("item() on non-scalar tensor of shape " + shape_string());
  return data_[0];
}

template <typename Real>
bool Tensor<Real>::all_finite() const {
  for (Real v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

Mask Mask::broadcast_columns(std::size_t rows, const std::vector<unsigned char>& col_mask) {
  Mask m(rows, col_mask.size(), false);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < col_mask.size(); ++c) m.bits[r * m.cols + c] = col_mask[c] ? 1 : 0;
  return m;
}

template <typename Real>
Tensor<Real> matmul_values(const Tensor<Real>& a, const Tensor<Real>& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: inner dimensions differ (" + a.shape_string() + " vs " + b.shape_string() + ")");
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  Tensor<Real> out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    Real* o = &out(i, 0);
    for (std::size_t p = 0; p < k; ++p) {
      const Real s = a(i, p);
      const Real* br = b.row_span(p).data();
      for (std::size_t j = 0; j < m; ++j) o[j] += s * br[j];
    }
  }
  return out;
}

template <typename Real>
Tensor<Real> matmul_nt_values(const Tensor<Real>& a, const Tensor<Real>& b) {
  if (a.cols() != b.cols())
    throw ShapeError("matmul_nt: inner dimensions differ (" + a.shape_string() + " vs " + b.shape_string() + ")");
  const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
  Tensor<Real> out(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    const Real* ar = a.row_span(i).data();
    for (std::size_t j = 0; j < m; ++j) {
      const Real* br = b.row_span(j).data();
      Real acc = 0;
      for (std::size_t p = 0; p < k; ++p) acc += ar[p] * br[p];
      out(i, j) = acc;
    }
  }
  return out;
}

template <typename Real>
Tensor<Real> matmul_tn_values(const Tensor<Real>& a, const Tensor<Real>& b) {
  if (a.rows() != b.rows())
    throw ShapeError("matmul_tn: inner dimensions differ (" + a.shape_string() + " vs " + b.shape_string() + ")");
  const std::size_t k = a.rows(), n = a.cols(), m = b.cols();
  Tensor<Real> out(n, m);
  for (std::size_t p = 0; p < k; ++p) {
    const Real* ar = a.row_span(p).data();
    const Real* br = b.row_span(p).data();
    for (std::size_t i = 0; i < n; ++i) {
      const Real s = ar[i];
      Real* o = &out(i, 0);
      for (std::size_t j = 0; j < m; ++j) o[j] += s * br[j];
    }
  }
  return out;
}

template <typename Real>
Tensor<Real> transpose_values(const Tensor<Real>& a) {
  Tensor<Real> out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

template class Tensor<float>;
template class Tensor<double>;

#define MRC_INSTANTIATE(Real)                                                          \
  template Tensor<Real> matmul_values(const Tensor<Real>&, const Tensor<Real>&);      \
  template Tensor<Real> matmul_nt_values(const Tensor<Real>&, const Tensor<Real>&);   \
  template Tensor<Real> matmul_tn_values(const Tensor<Real>&, const Tensor<Real>&);   \
  template Tensor<Real> transpose_values(const Tensor<Real>&);

MRC_INSTANTIATE(float)
MRC_INSTANTIATE(double)
#undef MRC_INSTANTIATE

}  // namespace mrc
