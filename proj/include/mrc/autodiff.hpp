#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrc/tensor.hpp"

namespace mrc::ad {

template <typename Real>
class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; only valid while the
/// owning tape is alive and has not been reset.
template <typename Real>
class Var {
 public:
  Var() = default;

  const Tensor<Real>& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  Tape<Real>* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape<Real>;
  Var(Tape<Real>* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape<Real>* tape_ = nullptr;
  std::size_t id_ = 0;
};

template <typename Real>
using GradTable = std::map<std::string, Tensor<Real>>;

/// Linear record of operations for reverse-mode differentiation.
///
/// Nodes are appended in evaluation order, so the node list is already a
/// topological order and backward() is a single reverse sweep. A tape belongs
/// to one thread; build a fresh tape (or reset()) per forward pass.
template <typename Real>
class Tape {
 public:
  // Called during the reverse sweep with the index of the node being
  // processed; must accumulate into the grads of that node's inputs.
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var<Real> constant(Tensor<Real> value);
  Var<Real> variable(Tensor<Real> value);
  // Named leaf; its gradient is reported by backward() under `name`.
  // Registering the same name twice returns the existing leaf.
  Var<Real> parameter(const std::string& name, const Tensor<Real>& value);

  // Generic extension point used by every op. `fn` may be empty when no
  // input requires a gradient.
  Var<Real> record(Tensor<Real> value, std::vector<std::size_t> inputs, BackwardFn fn);

  const Tensor<Real>& value(std::size_t id) const { return nodes_.at(id).value; }
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  bool any_requires_grad(const std::vector<std::size_t>& ids) const;
  const std::vector<std::size_t>& inputs(std::size_t id) const { return nodes_.at(id).inputs; }

  // Gradient buffer of a node during the reverse sweep (zeros when nothing
  // has been accumulated yet).
  const Tensor<Real>& grad(std::size_t id);
  Tensor<Real>& grad_accum(std::size_t id);

  GradTable<Real> backward(const Var<Real>& loss);
  // Gradient of an arbitrary node after backward(); zeros if unreached.
  Tensor<Real> gradient_of(const Var<Real>& v) const;

  void reset();
  std::size_t size() const { return nodes_.size(); }
  bool backward_done() const { return backward_done_; }

 private:
  struct Node {
    Tensor<Real> value;
    Tensor<Real> grad;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    bool requires_grad = false;
  };

  Var<Real> push(Node node);

  std::vector<Node> nodes_;
  std::map<std::string, std::size_t> named_;
  bool backward_done_ = false;
};

template <typename Real>
const Tensor<Real>& Var<Real>::value() const {
  return tape_->value(id_);
}

// ---------------------------------------------------------------------------
// Operations. All operands must live on the same tape.

template <typename Real>
Var<Real> matmul(const Var<Real>& a, const Var<Real>& b);
// a * b^T
template <typename Real>
Var<Real> matmul_nt(const Var<Real>& a, const Var<Real>& b);
template <typename Real>
Var<Real> transpose(const Var<Real>& a);

template <typename Real>
Var<Real> add(const Var<Real>& a, const Var<Real>& b);
// Adds a 1 x c row (or a 1 x 1 scalar) to every row of `a`.
template <typename Real>
Var<Real> add_bias(const Var<Real>& a, const Var<Real>& bias);
template <typename Real>
Var<Real> scale(const Var<Real>& a, Real factor);
// factor * a + shift
template <typename Real>
Var<Real> scale_shift(const Var<Real>& a, Real factor, Real shift);
template <typename Real>
Var<Real> relu(const Var<Real>& a);
// Multiplies row r by keep[r] (0 or 1).
template <typename Real>
Var<Real> mask_rows(const Var<Real>& a, const std::vector<unsigned char>& keep);

// Row softmax, stabilised by subtracting the row max over unmasked entries.
// Masked entries are exactly 0. Throws DomainError on a fully masked row.
template <typename Real>
Var<Real> softmax_rows(const Var<Real>& a, const Mask* mask = nullptr);

// Natural log. Without a floor, any x <= 0 throws DomainError. With a floor,
// values below it are clamped (zero gradient in the clamped region).
template <typename Real>
Var<Real> log(const Var<Real>& a, std::optional<Real> floor = std::nullopt);

template <typename Real>
Var<Real> concat_cols(const std::vector<Var<Real>>& parts);
template <typename Real>
Var<Real> slice_cols(const Var<Real>& a, std::size_t begin, std::size_t width);
template <typename Real>
Var<Real> slice_rows(const Var<Real>& a, std::size_t begin, std::size_t count);
// Rows of `table` selected by `ids`; repeated ids accumulate on backward.
template <typename Real>
Var<Real> gather_rows(const Var<Real>& table, const std::vector<std::size_t>& ids);

// Normalises each row to zero mean / unit variance, then applies the 1 x c
// gain and bias.
template <typename Real>
Var<Real> layer_norm(const Var<Real>& x, const Var<Real>& gain, const Var<Real>& bias, Real eps = Real(1e-5));

template <typename Real>
Var<Real> sum(const Var<Real>& a);
template <typename Real>
Var<Real> mean(const Var<Real>& a);
// 1 x 1 view of a single element.
template <typename Real>
Var<Real> pick(const Var<Real>& a, std::size_t r, std::size_t c);
// Sum of 1 x 1 values in the given order.
template <typename Real>
Var<Real> add_scalars(const std::vector<Var<Real>>& terms);

}  // namespace mrc::ad
