#include "mrc/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mrc::ad {

// ---------------------------------------------------------------------------
// Tape

template <typename Real>
Var<Real> Tape<Real>::push(Node node) {
  if (!node.value.all_finite()) throw NumericError("non-finite value produced at tape node " + std::to_string(nodes_.size()));
  nodes_.push_back(std::move(node));
  return Var<Real>(this, nodes_.size() - 1);
}

template <typename Real>
Var<Real> Tape<Real>::constant(Tensor<Real> value) {
  Node n;
  n.value = std::move(value);
  return push(std::move(n));
}

template <typename Real>
Var<Real> Tape<Real>::variable(Tensor<Real> value) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = true;
  return push(std::move(n));
}

template <typename Real>
Var<Real> Tape<Real>::parameter(const std::string& name, const Tensor<Real>& value) {
  if (auto it = named_.find(name); it != named_.end()) return Var<Real>(this, it->second);
  Var<Real> v = variable(value);
  named_.emplace(name, v.id());
  return v;
}

template <typename Real>
bool Tape<Real>::any_requires_grad(const std::vector<std::size_t>& ids) const {
  return std::any_of(ids.begin(), ids.end(), [&](std::size_t i) { return nodes_.at(i).requires_grad; });
}

template <typename Real>
Var<Real> Tape<Real>::record(Tensor<Real> value, std::vector<std::size_t> inputs, BackwardFn fn) {
  for (std::size_t i : inputs)
    if (i >= nodes_.size()) throw UsageError("record: input node does not precede output");
  Node n;
  n.value = std::move(value);
  n.requires_grad = any_requires_grad(inputs);
  if (n.requires_grad) n.backward = std::move(fn);
  n.inputs = std::move(inputs);
  return push(std::move(n));
}

template <typename Real>
const Tensor<Real>& Tape<Real>::grad(std::size_t id) {
  return grad_accum(id);
}

template <typename Real>
Tensor<Real>& Tape<Real>::grad_accum(std::size_t id) {
  Node& n = nodes_.at(id);
  if (n.grad.empty()) n.grad = Tensor<Real>(n.value.rows(), n.value.cols());
  return n.grad;
}

template <typename Real>
GradTable<Real> Tape<Real>::backward(const Var<Real>& loss) {
  if (backward_done_) throw UsageError("backward already ran on this tape; reset() before reuse");
  if (loss.tape() != this) throw UsageError("backward: loss was not recorded on this tape");
  const Tensor<Real>& lv = value(loss.id());
  if (lv.size() != 1) throw ShapeError("backward: loss must be scalar, got " + lv.shape_string());
  if (!requires_grad(loss.id())) throw UsageError("backward: loss is detached from every differentiable input");

  backward_done_ = true;
  grad_accum(loss.id())[0] = Real(1);
  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.empty() || !n.backward) continue;
    n.backward(*this, i);
  }

  GradTable<Real> table;
  for (const auto& [name, id] : named_) {
    const Node& n = nodes_[id];
    table.emplace(name, n.grad.empty() ? Tensor<Real>(n.value.rows(), n.value.cols()) : n.grad);
  }
  return table;
}

template <typename Real>
Tensor<Real> Tape<Real>::gradient_of(const Var<Real>& v) const {
  const Node& n = nodes_.at(v.id());
  return n.grad.empty() ? Tensor<Real>(n.value.rows(), n.value.cols()) : n.grad;
}

template <typename Real>
void Tape<Real>::reset() {
  nodes_.clear();
  named_.clear();
  backward_done_ = false;
}

// ---------------------------------------------------------------------------
// Helpers

namespace {

template <typename Real>
Tape<Real>& same_tape(std::initializer_list<const Var<Real>*> vars) {
  Tape<Real>* t = nullptr;
  for (const Var<Real>* v : vars) {
    if (!v->valid()) throw UsageError("operation on an empty Var");
    if (t == nullptr) t = v->tape();
    else if (t != v->tape()) throw UsageError("operands recorded on different tapes");
  }
  return *t;
}

template <typename Real>
void add_into(Tensor<Real>& dst, const Tensor<Real>& src) {
  auto d = dst.values();
  auto s = src.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

}  // namespace

// ---------------------------------------------------------------------------
// Linear algebra

template <typename Real>
Var<Real> matmul(const Var<Real>& a, const Var<Real>& b) {
  Tape<Real>& t = same_tape({&a, &b});
  Tensor<Real> out = matmul_values(a.value(), b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(out), {ia, ib}, [ia, ib](Tape<Real>& tp, std::size_t self) {
    const Tensor<Real>& g = tp.grad(self);
    if (tp.requires_grad(ia)) add_into(tp.grad_accum(ia), matmul_nt_values(g, tp.value(ib)));
    if (tp.requires_grad(ib)) add_into(tp.grad_accum(ib), matmul_tn_values(tp.value(ia), g));
  });
}

template <typename Real>
Var<Real> matmul_nt(const Var<Real>& a, const Var<Real>& b) {
  Tape<Real>& t = same_tape({&a, &b});
  Tensor<Real> out = matmul_nt_values(a.value(), b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(out), {ia, ib}, [ia, ib](Tape<Real>& tp, std::size_t self) {
    const Tensor<Real>& g = tp.grad(self);
    // C = A B^T: dA = G B, dB = G^T A
    if (tp.requires_grad(ia)) add_into(tp.grad_accum(ia), matmul_values(g, tp.value(ib)));
    if (tp.requires_grad(ib)) add_into(tp.grad_accum(ib), matmul_tn_values(g, tp.value(ia)));
  });
}

template <typename Real>
Var<Real> transpose(const Var<Real>& a) {
  Tape<Real>& t = same_tape({&a});
  const std::size_t ia = a.id();
  return t.record(transpose_values(a.value()), {ia}, [ia](Tape<Real>& tp, std::size_t self) {
    add_into(tp.grad_accum(ia), transpose_values(tp.grad(self)));
  });
}

// ---------------------------------------------------------------------------
// Elementwise

template <typename Real>
Var<Real> add(const Var<Real>& a, const Var<Real>& b) {
  Tape<Real>& t = same_tape({&a, &b});
  if (!a.value().same_shape(b.value()))
    throw ShapeError("add: shape mismatch (" + a.value().shape_string() + " vs " + b.value().shape_string() + ")");
  Tensor<Real> out = a.value();
  add_into(out, b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return t.record(std::move(out), {ia, ib}, [ia, ib](Tape<Real>& tp, std::size_t self) {
    const Tensor<Real>& g = tp.grad(self);
    if (tp.requires_grad(ia)) add_into(tp.grad_accum(ia), g);
    if (tp.requires_grad(ib)) add_into(tp.grad_accum(ib), g);
  });
}

template <typename Real>
Var<Real> add_bias(const Var<Real>& a, const Var<Real>& bias) {
  Tape<Real>& t = same_tape({&a, &bias});
  const Tensor<Real>& av = a.value();
  const Tensor<Real>& bv = bias.value();
  const bool scalar = bv.rows() == 1 && bv.cols() == 1;
  if (bv.rows() != 1 || (!scalar && bv.cols() != av.cols()))
    throw ShapeError("add_bias: bias " + bv.shape_string() + " incompatible with " + av.shape_string());
  Tensor<Real> out = av;
  for (std::size_t r = 0; r < av.rows(); ++r)
    for (std::size_t c = 0; c < av.cols(); ++c) out(r, c) += scalar ? bv[0] : bv(0, c);
  const std::size_t ia = a.id(), ib = bias.id();
  return t.record(std::move(out), {ia, ib}, [ia, ib, scalar](Tape<Real>& tp, std::size_t self) {
    const Tensor<Real>& g = tp.grad(self);
    if (tp.requires_grad(ia)) add_into(tp.grad_accum(ia), g);
    if (tp.requires_grad(ib)) {
      Tensor<Real>& gb = tp.grad_accum(ib);
      for (std::size_t r = 0; r < g.rows(); ++r)
        for (std::size_t c = 0; c < g.cols(); ++c) {
          if (scalar) gb[0] += g(r, c);
          else gb(0, c) += g(r, c);
        }
    }
  });
}

template <typename Real>
Var<Real> scale_shift(const Var<Real>& a, Real factor, Real shift) {
  Tape<Real>& t = same_tape({&a});
  Tensor<Real> out = a.value();
  for (Real& v : out.values()) v = factor * v + shift;
  const std::size_t ia = a.id();
  return t.record(std::move(out), {ia}, [ia, factor](Tape<Real>& tp, std::size_t self) {
    const Tensor<Real>& g = tp.grad(self);
    Tensor<Real>& ga = tp.grad_accum(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += factor * g[i];
  });
}

template <typename Real>
Var<Real> scale(const Var<Real>& a, Real factor) {
  Tape<Real>& t = same_tape({&a});
  Tensor<Real> out = a.value();
  for (Real& v : out.values()) v *= factor;
  const std::size_t ia = a.id();
  return t.record(std::move(out), {ia}, [ia, factor](Tape<Real>& tp, std::size_t self) {
    const Tensor<Real>& g = tp.grad(self);
    Tensor<Real>& ga = tp.grad_accum(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += factor * g[i];
  });
}

template <typename Real>
Var<Real> relu(const Var<Real>& a) {
  Tape<Real>& t = same_tape({&a});
  Tensor<Real> out = a.value();
  for (Real& v : out.values()) v = v > Real(0) ? v : Real(0);
  const std::size_t ia = a.id();
  return t.record(std::move(out), {ia}, [ia](Tape<Real>& tp, std::size_t self) {
    const Tensor<Real>& g = tp.grad(self);
    const Tensor<Real>& x = tp.value(ia);
    Tensor<Real>& ga = tp.grad_accum(ia);
    // subgradient 0 at x == 0
    for (std::size_t i = 0; i < g.size(); ++i)
      if (x[i] > Real(0)) ga[i] += g[i];
  });
}

template <typename Real>
Var<Real> mask_rows(const Var<Real>& a, const std::vector<unsigned char>& keep) {
  Tape<Real>& t = same_tape({&a});
  const Tensor<Real>& av = a.value();
  if (keep.size() != av.rows())
    throw ShapeError("mask_rows: mask length " + std::to_string(keep.size()) + " vs " + av.shape_string());
  Tensor<Real> out = av;
  for (std::size_t r = 0; r < av.rows(); ++r)
    if (!keep[r])
      for (Real& v : out.row_span(r)) v = Real(0);
  const std::size_t ia = a.id();
  return t.record(std::move(out), {ia}, [ia, keep](Tape<Real>& tp, std::size_t self) {
    const Tensor<Real>& g = tp.grad(self);
    Tensor<Real>& ga = tp.grad_accum(ia);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      if (!keep[r]) continue;
      for (std::size_t c = 0; c < g.cols(); ++c) ga(r, c) += g(r, c);
    }
  });
}

template <typename Real>
Var<Real> softmax_rows(const Var<Real>& a, const Mask* mask) {
  Tape<Real>& t = same_tape({&a});
  const Tensor<Real>& x = a.value();
  if (mask && (mask->rows != x.rows() || mask->cols != x.cols()))
    throw ShapeError("softmax_rows: mask " + std::to_string(mask->rows) + "x" + std::to_string(mask->cols) +
                     " vs input " + x.shape_string());
  Tensor<Real> y(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    Real mx = -std::numeric_limits<Real>::infinity();
    bool any = false;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (mask && !(*mask)(r, c)) continue;
      any = true;
      mx = std::max(mx, x(r, c));
    }
    if (!any) throw DomainError("softmax_rows: row " + std::to_string(r) + " is fully masked");
    Real total = 0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (mask && !(*mask)(r, c)) continue;
      const Real e = std::exp(x(r, c) - mx);
      y(r, c) = e;
      total += e;
    }
    for (std::size_t c = 0; c < x.cols(); ++c) y(r, c) /= total;
  }
  const std::size_t ia = a.id();
  return t.record(std::move(y), {ia}, [ia](Tape<Real>& tp, std::size_t self) {
    const Tensor<Real>& g = tp.grad(self);
    const Tensor<Real>& yv = tp.value(self);
    Tensor<Real>& ga = tp.grad_accum(ia);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      Real dot = 0;
      for (std::size_t c = 0; c < g.cols(); ++c) dot += g(r, c) * yv(r, c);
      for (std::size_t c = 0; c < g.cols(); ++c) ga(r, c) += yv(r, c) * (g(r, c) - dot);
    }
  });
}

template <typename Real>
Var<Real> log(const Var<Real>& a, std::optional<Real> floor) {
  Tape<Real>& t = same_tape({&a});
  const Tensor<Real>& x = a.value();
  Tensor<Real> out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (floor) {
      out[i] = std::log(std::max(x[i], *floor));
    } else {
      if (!(x[i] > Real(0))) throw DomainError("log of nonpositive value " + std::to_string(x[i]));
      out[i] = std::log(x[i]);
    }
  }
  const std::size_t ia = a.id();
  return t.record(std::move(out), {ia}, [ia, floor](Tape<Real>& tp, std::size_t self) {
    const Tensor<Real>& g = tp.grad(self);
    const Tensor<Real>& xv = tp.value(ia);
    Tensor<Real>& ga = tp.grad_accum(ia);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (floor && xv[i] < *floor) continue;
      ga[i] += g[i] / xv[i];
    }
  });
}

// ---------------------------------------------------------------------------
// Layout

template <typename Real>
Var<Real> concat_cols(const std::vector<Var<Real>>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no operands");
  Tape<Real>& t = *parts.front().tape();
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  std::vector<std::size_t> ids;
  for (const auto& p : parts) {
    if (p.tape() != &t) throw UsageError("operands recorded on different tapes");
    if (p.rows() != rows)
      throw ShapeError("concat_cols: row count mismatch (" + std::to_string(p.rows()) + " vs " + std::to_string(rows) + ")");
    cols += p.cols();
    ids.push_back(p.id());
  }
  Tensor<Real> out(rows, cols);
  std::size_t off = 0;
  for (const auto& p : parts) {
    const Tensor<Real>& v = p.value();
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < v.cols(); ++c) out(r, off + c) = v(r, c);
    off += v.cols();
  }
  return t.record(std::move(out), ids, [ids](Tape<Real>& tp, std::size_t self) {
    const Tensor<Real>& g = tp.grad(self);
    std::size_t o = 0;
    for (std::size_t id : ids) {
      const std::size_t w = tp.value(id).cols();
      if (tp.requires_grad(id)) {
        Tensor<Real>& gi = tp.grad_accum(id);
        for (std::size_t r = 0; r < g.rows(); ++r)
          for (std::size_t c = 0; c < w; ++c) gi(r, c) += g(r, o + c);
      }
      o += w;
    }
  });
}

template <typename Real>
Var<Real> slice_cols(const Var<Real>& a, std::size_t begin, std::size_t width) {
  Tape<Real>& t = same_tape({&a});
  const Tensor<Real>& x = a.value();
  if (width == 0 || begin + width > x.cols())
    throw ShapeError("slice_cols: [" + std::to_string(begin) + ", +" + std::to_string(width) + ") out of " + x.shape_string());
  Tensor<Real> out(x.rows(), width);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < width; ++c) out(r, c) = x(r, begin + c);
  const std::size_t ia = a.id();
  return t.record(std::move(out), {ia}, [ia, begin, width](Tape<Real>& tp, std::size_t self) {
    const Tensor<Real>& g = tp.grad(self);
    Tensor<Real>& ga = tp.grad_accum(ia);
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < width; ++c) ga(r, begin + c) += g(r, c);
  });
}

template <typename Real>
Var<Real> slice_rows(const Var<Real>& a, std::size_t begin, std::size_t count) {
  Tape<Real>& t = same_tape({&a});
  const Tensor<Real>& x = a.value();
  if (count == 0 || begin + count > x.rows())
    throw ShapeError("slice_rows: [" + std::to_string(begin) + ", +" + std::to_string(count) + ") out of " + x.shape_string());
  auto first = x.values().begin() + static_cast<std::ptrdiff_t>(begin * x.cols());
  Tensor<Real> out(count, x.cols(), std::vector<Real>(first, first + static_cast<std::ptrdiff_t>(count * x.cols())));
  const std::size_t ia = a.id();
  return t.record(std::move(out), {ia}, [ia, begin](Tape<Real>& tp, std::size_t self) {
    const Tensor<Real>& g = tp.grad(self);
    Tensor<Real>& ga = tp.grad_accum(ia);
    for (std::size_t r = 0; r < g.rows(); ++r)
      for (std::size_t c = 0; c < g.cols(); ++c) ga(begin + r, c) += g(r, c);
  });
}

template <typename Real>
Var<Real> gather_rows(const Var<Real>& table, const std::vector<std::size_t>& ids) {
  Tape<Real>& t = same_tape({&table});
  const Tensor<Real>& tv = table.value();
  if (ids.empty()) throw ShapeError("gather_rows: empty id list");
  Tensor<Real> out(ids.size(), tv.cols());
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] >= tv.rows())
      throw ShapeError("gather_rows: id " + std::to_string(ids[r]) + " out of range for table " + tv.shape_string());
    for (std::size_t c = 0; c < tv.cols(); ++c) out(r, c) = tv(ids[r], c);
  }
  const std::size_t it = table.id();
  return t.record(std::move(out), {it}, [it, ids](Tape<Real>& tp, std::size_t self) {
    const Tensor<Real>& g = tp.grad(self);
    Tensor<Real>& gt = tp.grad_accum(it);
    for (std::size_t r = 0; r < ids.size(); ++r)
      for (std::size_t c = 0; c < g.cols(); ++c) gt(ids[r], c) += g(r, c);
  });
}

template <typename Real>
Var<Real> layer_norm(const Var<Real>& x, const Var<Real>& gain, const Var<Real>& bias, Real eps) {
  Tape<Real>& t = same_tape({&x, &gain, &bias});
  const Tensor<Real>& xv = x.value();
  const std::size_t n = xv.cols();
  if (gain.rows() != 1 || gain.cols() != n || bias.rows() != 1 || bias.cols() != n)
    throw ShapeError("layer_norm: gain/bias must be 1x" + std::to_string(n));
  Tensor<Real> xhat(xv.rows(), n);
  std::vector<Real> inv_std(xv.rows());
  for (std::size_t r = 0; r < xv.rows(); ++r) {
    Real mu = 0;
    for (std::size_t c = 0; c < n; ++c) mu += xv(r, c);
    mu /= Real(n);
    Real var = 0;
    for (std::size_t c = 0; c < n; ++c) var += (xv(r, c) - mu) * (xv(r, c) - mu);
    var /= Real(n);
    inv_std[r] = Real(1) / std::sqrt(var + eps);
    for (std::size_t c = 0; c < n; ++c) xhat(r, c) = (xv(r, c) - mu) * inv_std[r];
  }
  Tensor<Real> out(xv.rows(), n);
  const Tensor<Real>& gv = gain.value();
  const Tensor<Real>& bv = bias.value();
  for (std::size_t r = 0; r < xv.rows(); ++r)
    for (std::size_t c = 0; c < n; ++c) out(r, c) = gv(0, c) * xhat(r, c) + bv(0, c);

  const std::size_t ix = x.id(), ig = gain.id(), ib = bias.id();
  return t.record(std::move(out), {ix, ig, ib},
                  [ix, ig, ib, xhat = std::move(xhat), inv_std = std::move(inv_std)](Tape<Real>& tp, std::size_t self) {
                    const Tensor<Real>& g = tp.grad(self);
                    const Tensor<Real>& gv = tp.value(ig);
                    const std::size_t cols = g.cols();
                    if (tp.requires_grad(ig)) {
                      Tensor<Real>& gg = tp.grad_accum(ig);
                      for (std::size_t r = 0; r < g.rows(); ++r)
                        for (std::size_t c = 0; c < cols; ++c) gg(0, c) += g(r, c) * xhat(r, c);
                    }
                    if (tp.requires_grad(ib)) {
                      Tensor<Real>& gb = tp.grad_accum(ib);
                      for (std::size_t r = 0; r < g.rows(); ++r)
                        for (std::size_t c = 0; c < cols; ++c) gb(0, c) += g(r, c);
                    }
                    if (tp.requires_grad(ix)) {
                      Tensor<Real>& gx = tp.grad_accum(ix);
                      std::vector<Real> dxhat(cols);
                      for (std::size_t r = 0; r < g.rows(); ++r) {
                        Real m1 = 0, m2 = 0;
                        for (std::size_t c = 0; c < cols; ++c) {
                          dxhat[c] = g(r, c) * gv(0, c);
                          m1 += dxhat[c];
                          m2 += dxhat[c] * xhat(r, c);
                        }
                        m1 /= Real(cols);
                        m2 /= Real(cols);
                        for (std::size_t c = 0; c < cols; ++c)
                          gx(r, c) += inv_std[r] * (dxhat[c] - m1 - xhat(r, c) * m2);
                      }
                    }
                  });
}

// ---------------------------------------------------------------------------
// Reductions

template <typename Real>
Var<Real> sum(const Var<Real>& a) {
  Tape<Real>& t = same_tape({&a});
  Real acc = 0;
  for (Real v : a.value().values()) acc += v;
  const std::size_t ia = a.id();
  return t.record(Tensor<Real>::scalar(acc), {ia}, [ia](Tape<Real>& tp, std::size_t self) {
    const Real g = tp.grad(self)[0];
    for (Real& v : tp.grad_accum(ia).values()) v += g;
  });
}

template <typename Real>
Var<Real> mean(const Var<Real>& a) {
  return scale(sum(a), Real(1) / Real(a.value().size()));
}

template <typename Real>
Var<Real> pick(const Var<Real>& a, std::size_t r, std::size_t c) {
  Tape<Real>& t = same_tape({&a});
  const Tensor<Real>& x = a.value();
  if (r >= x.rows() || c >= x.cols())
    throw ShapeError("pick: (" + std::to_string(r) + "," + std::to_string(c) + ") outside " + x.shape_string());
  const std::size_t ia = a.id();
  return t.record(Tensor<Real>::scalar(x(r, c)), {ia}, [ia, r, c](Tape<Real>& tp, std::size_t self) {
    tp.grad_accum(ia)(r, c) += tp.grad(self)[0];
  });
}

template <typename Real>
Var<Real> add_scalars(const std::vector<Var<Real>>& terms) {
  if (terms.empty()) throw ShapeError("add_scalars: no terms");
  Tape<Real>& t = *terms.front().tape();
  Real acc = 0;
  std::vector<std::size_t> ids;
  for (const auto& v : terms) {
    if (v.tape() != &t) throw UsageError("operands recorded on different tapes");
    acc += v.value().item();
    ids.push_back(v.id());
  }
  return t.record(Tensor<Real>::scalar(acc), ids, [ids](Tape<Real>& tp, std::size_t self) {
    const Real g = tp.grad(self)[0];
    for (std::size_t id : ids)
      if (tp.requires_grad(id)) tp.grad_accum(id)[0] += g;
  });
}

// ---------------------------------------------------------------------------

#define MRC_INSTANTIATE(Real)                                                                      \
  template class Tape<Real>;                                                                       \
  template Var<Real> matmul(const Var<Real>&, const Var<Real>&);                                   \
  template Var<Real> matmul_nt(const Var<Real>&, const Var<Real>&);                                \
  template Var<Real> transpose(const Var<Real>&);                                                  \
  template Var<Real> add(const Var<Real>&, const Var<Real>&);                                      \
  template Var<Real> add_bias(const Var<Real>&, const Var<Real>&);                                 \
  template Var<Real> scale(const Var<Real>&, Real);                                                \
  template Var<Real> scale_shift(const Var<Real>&, Real, Real);                                    \
  template Var<Real> relu(const Var<Real>&);                                                       \
  template Var<Real> mask_rows(const Var<Real>&, const std::vector<unsigned char>&);               \
  template Var<Real> softmax_rows(const Var<Real>&, const Mask*);                                  \
  template Var<Real> log(const Var<Real>&, std::optional<Real>);                                   \
  template Var<Real> concat_cols(const std::vector<Var<Real>>&);                                   \
  template Var<Real> slice_cols(const Var<Real>&, std::size_t, std::size_t);                       \
  template Var<Real> slice_rows(const Var<Real>&, std::size_t, std::size_t);                       \
  template Var<Real> gather_rows(const Var<Real>&, const std::vector<std::size_t>&);               \
  template Var<Real> layer_norm(const Var<Real>&, const Var<Real>&, const Var<Real>&, Real);       \
  template Var<Real> sum(const Var<Real>&);                                                        \
  template Var<Real> mean(const Var<Real>&);                                                       \
  template Var<Real> pick(const Var<Real>&, std::size_t, std::size_t);                             \
  template Var<Real> add_scalars(const std::vector<Var<Real>>&);

MRC_INSTANTIATE(float)
MRC_INSTANTIATE(double)
#undef MRC_INSTANTIATE

}  // namespace mrc::ad
