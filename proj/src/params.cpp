#include "mrc/params.hpp"

#include <bit>
#include <fstream>
#include <iterator>

namespace mrc {

template <typename Real>
void ParamStore<Real>::add(std::string name, Tensor<Real> value, bool decay) {
  if (index_.count(name)) throw UsageError("duplicate parameter name: " + name);
  index_.emplace(name, items_.size());
  items_.push_back({std::move(name), std::move(value), decay});
}

template <typename Real>
Tensor<Real>& ParamStore<Real>::at(const std::string& name) {
  return items_[index_of(name)].value;
}

template <typename Real>
const Tensor<Real>& ParamStore<Real>::at(const std::string& name) const {
  return items_[index_of(name)].value;
}

template <typename Real>
std::size_t ParamStore<Real>::index_of(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw UsageError("unknown parameter: " + name);
  return it->second;
}

template <typename Real>
std::size_t ParamStore<Real>::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : items_) n += p.value.size();
  return n;
}

template <typename Real>
bool ParamStore<Real>::same_layout(const ParamStore& other) const {
  if (items_.size() != other.items_.size()) return false;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (items_[i].name != other.items_[i].name) return false;
    if (!items_[i].value.same_shape(other.items_[i].value)) return false;
  }
  return true;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::string str(std::size_t n) {
    need(n);
    std::string s(bytes_.begin() + pos_, bytes_.begin() + pos_ + n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw DataError("checkpoint truncated at byte " + std::to_string(pos_));
  }
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

template <typename Real>
std::vector<std::uint8_t> encode_checkpoint(const ParamStore<Real>& params) {
  std::vector<std::uint8_t> out = {'M', 'R', 'C', 'K'};
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params.items()) {
    put_u32(out, static_cast<std::uint32_t>(p.name.size()));
    out.insert(out.end(), p.name.begin(), p.name.end());
    put_u32(out, 2);
    put_u32(out, static_cast<std::uint32_t>(p.value.rows()));
    put_u32(out, static_cast<std::uint32_t>(p.value.cols()));
    for (Real v : p.value.values()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  }
  return out;
}

std::vector<CheckpointRecord> decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  Reader in(bytes);
  if (in.str(4) != "MRCK") throw DataError("not a checkpoint file (bad magic)");
  const std::uint32_t version = in.u32();
  if (version != kCheckpointVersion) throw DataError("unsupported checkpoint version " + std::to_string(version));
  const std::uint32_t count = in.u32();
  std::vector<CheckpointRecord> records;
  records.reserve(count);
  for (std::uint32_t r = 0; r < count; ++r) {
    CheckpointRecord rec;
    rec.name = in.str(in.u32());
    const std::uint32_t rank = in.u32();
    std::size_t n = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      rec.shape.push_back(in.u32());
      n *= rec.shape.back();
    }
    rec.values.resize(n);
    for (float& v : rec.values) v = std::bit_cast<float>(in.u32());
    records.push_back(std::move(rec));
  }
  if (!in.done()) throw DataError("trailing bytes after last checkpoint record");
  return records;
}

template <typename Real>
void save_checkpoint(const std::string& path, const ParamStore<Real>& params) {
  const auto bytes = encode_checkpoint(params);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open " + path + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<CheckpointRecord> read_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot open checkpoint " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

template <typename Real>
void assign_checkpoint(ParamStore<Real>& params, const std::vector<CheckpointRecord>& records) {
  if (records.size() != params.size())
    throw ShapeError("architecture mismatch: checkpoint has " + std::to_string(records.size()) +
                     " tensors, model expects " + std::to_string(params.size()));
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& p = params.items()[i];
    const auto& rec = records[i];
    if (rec.name != p.name) throw ShapeError("architecture mismatch: expected " + p.name + ", found " + rec.name);
    if (rec.shape.size() != 2 || rec.shape[0] != p.value.rows() || rec.shape[1] != p.value.cols())
      throw ShapeError("architecture mismatch: shape of " + p.name + " differs from " + p.value.shape_string());
    for (std::size_t k = 0; k < rec.values.size(); ++k) p.value[k] = static_cast<Real>(rec.values[k]);
  }
}

template class ParamStore<float>;
template class ParamStore<double>;

#define MRC_INSTANTIATE(Real)                                                              \
  template std::vector<std::uint8_t> encode_checkpoint(const ParamStore<Real>&);         \
  template void save_checkpoint(const std::string&, const ParamStore<Real>&);            \
  template void assign_checkpoint(ParamStore<Real>&, const std::vector<CheckpointRecord>&);

MRC_INSTANTIATE(float)
MRC_INSTANTIATE(double)
#undef MRC_INSTANTIATE

}  // namespace mrc
