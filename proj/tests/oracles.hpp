#pragma once

// Reference implementations used by the tests. Everything here is written
// from the definitions with plain loops and shares no code with the library.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "mrc/tensor.hpp"

namespace oracle {

using Mat = std::vector<std::vector<double>>;

inline Mat to_mat(const mrc::Tensor<double>& t) {
  Mat m(t.rows(), std::vector<double>(t.cols()));
  for (std::size_t r = 0; r < t.rows(); ++r)
    for (std::size_t c = 0; c < t.cols(); ++c) m[r][c] = t(r, c);
  return m;
}

inline Mat matmul(const Mat& a, const Mat& b) {
  Mat out(a.size(), std::vector<double>(b[0].size(), 0.0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b[0].size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k) out[i][j] += a[i][k] * b[k][j];
  return out;
}

inline Mat transpose(const Mat& a) {
  Mat out(a[0].size(), std::vector<double>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) out[j][i] = a[i][j];
  return out;
}

inline Mat add(const Mat& a, const Mat& b) {
  Mat out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[0].size(); ++j) out[i][j] += b[i][j];
  return out;
}

// exp(x - c) / sum exp(x - c) with c the row max; `valid` columns only.
inline std::vector<double> softmax(const std::vector<double>& x, const std::vector<unsigned char>& valid = {}) {
  double c = -INFINITY;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (valid.empty() || valid[j]) c = std::max(c, x[j]);
  std::vector<double> e(x.size(), 0.0);
  double z = 0;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (valid.empty() || valid[j]) z += (e[j] = std::exp(x[j] - c));
  for (double& v : e) v /= z;
  return e;
}

inline Mat softmax_rows(const Mat& x, const std::vector<unsigned char>& valid = {}) {
  Mat out;
  for (const auto& row : x) out.push_back(softmax(row, valid));
  return out;
}

inline Mat scale(const Mat& a, double f) {
  Mat out = a;
  for (auto& row : out)
    for (double& v : row) v *= f;
  return out;
}

inline double max_abs_diff(const Mat& a, const mrc::Tensor<double>& b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) worst = std::max(worst, std::abs(a[i][j] - b(i, j)));
  return worst;
}

// Eq. 3 written out entry by entry.
inline Mat naive_mem_att(const Mat& q, const Mat& k, const Mat& v, const std::vector<unsigned char>& key_valid,
                         const std::vector<unsigned char>& query_valid) {
  const std::size_t L = q.size(), d = q[0].size();
  auto score = [&](const Mat& a, const Mat& b, std::size_t i, std::size_t j) {
    double s = 0;
    for (std::size_t t = 0; t < d; ++t) s += a[i][t] * b[j][t];
    return s / std::sqrt(double(d));
  };
  Mat w(L, std::vector<double>(L, 0.0));
  for (std::size_t i = 0; i < L; ++i) {
    std::vector<double> a(L), b(L);
    for (std::size_t j = 0; j < L; ++j) {
      a[j] = score(q, k, i, j);
      b[j] = score(k, q, i, j);
    }
    const auto pa = softmax(a, key_valid);
    const auto pb = softmax(b, query_valid);
    for (std::size_t j = 0; j < L; ++j) w[i][j] = pa[j] + pb[j];
  }
  return matmul(w, v);
}

// Central differences of a scalar function of one tensor.
inline mrc::Tensor<double> numeric_grad(const std::function<double(const mrc::Tensor<double>&)>& f,
                                        const mrc::Tensor<double>& x, double eps = 1e-6) {
  mrc::Tensor<double> g(x.rows(), x.cols());
  mrc::Tensor<double> probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + eps;
    const double up = f(probe);
    probe[i] = x[i] - eps;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2 * eps);
  }
  return g;
}

inline double max_rel_diff(const mrc::Tensor<double>& a, const mrc::Tensor<double>& b, double floor = 1e-6) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max({std::abs(a[i]), std::abs(b[i]), floor}));
  return worst;
}

}  // namespace oracle
