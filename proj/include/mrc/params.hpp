#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "mrc/autodiff.hpp"
#include "mrc/tensor.hpp"

namespace mrc {

template <typename Real>
struct Parameter {
  std::string name;
  Tensor<Real> value;
  bool decay = true;  // subject to decoupled weight decay
};

/// Ordered, name-addressable parameter set. Iteration order is insertion
/// order, which is also the checkpoint record order.
template <typename Real>
class ParamStore {
 public:
  void add(std::string name, Tensor<Real> value, bool decay = true);

  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  Tensor<Real>& at(const std::string& name);
  const Tensor<Real>& at(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;

  std::vector<Parameter<Real>>& items() { return items_; }
  const std::vector<Parameter<Real>>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  std::size_t scalar_count() const;

  template <typename Other>
  ParamStore<Other> cast() const {
    ParamStore<Other> out;
    for (const auto& p : items_) out.add(p.name, p.value.template cast<Other>(), p.decay);
    return out;
  }

  // Same names, order and shapes.
  bool same_layout(const ParamStore& other) const;

 private:
  std::vector<Parameter<Real>> items_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Registers parameters on a tape lazily, the first time a forward pass asks
/// for them. Parameters never touched by the pass never appear on the tape.
template <typename Real>
class ParamBinder {
 public:
  ParamBinder(ad::Tape<Real>& tape, const ParamStore<Real>& store) : tape_(tape), store_(store) {}

  ad::Var<Real> operator()(const std::string& name) { return tape_.parameter(name, store_.at(name)); }
  ad::Tape<Real>& tape() { return tape_; }
  const ParamStore<Real>& store() const { return store_; }

 private:
  ad::Tape<Real>& tape_;
  const ParamStore<Real>& store_;
};

// ---------------------------------------------------------------------------
// Named-tensor checkpoint container.
//
// Layout (all integers little-endian u32):
//   "MRCK" | version | record count |
//   per record: name length | name bytes | rank | dims... | f32 LE values

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointRecord {
  std::string name;
  std::vector<std::uint32_t> shape;
  std::vector<float> values;
};

template <typename Real>
std::vector<std::uint8_t> encode_checkpoint(const ParamStore<Real>& params);
std::vector<CheckpointRecord> decode_checkpoint(const std::vector<std::uint8_t>& bytes);

template <typename Real>
void save_checkpoint(const std::string& path, const ParamStore<Real>& params);
std::vector<CheckpointRecord> read_checkpoint(const std::string& path);

// Overwrites every parameter of `params` from the records. Throws ShapeError
// unless names, order and shapes match exactly.
template <typename Real>
void assign_checkpoint(ParamStore<Real>& params, const std::vector<CheckpointRecord>& records);

extern template class ParamStore<float>;
extern template class ParamStore<double>;

}  // namespace mrc
