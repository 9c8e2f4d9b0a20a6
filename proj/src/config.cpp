#include "mrc/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "mrc/errors.hpp"

namespace mrc {

void ModelConfig::validate() const {
  if (d_model == 0 || n_heads == 0 || encoder_heads == 0) throw UsageError("d_model and head counts must be positive");
  if (d_model % n_heads != 0) throw UsageError("n_heads must divide d_model");
  if (d_model % encoder_heads != 0) throw UsageError("encoder_heads must divide d_model");
  if (n_blocks == 0) throw UsageError("n_blocks must be >= 1");
  if (d_ff == 0) throw UsageError("d_ff must be positive");
  if (max_seq_len < 5) throw UsageError("max_seq_len must be >= 5");
}

void TrainConfig::validate() const {
  if (alpha < 0 || beta < 0) throw UsageError("alpha and beta must be >= 0");
  if (batch_size == 0) throw UsageError("batch_size must be >= 1");
  if (!(lr > 0)) throw UsageError("lr must be positive");
  if (task_ratio < 0 || task_ratio > 1) throw UsageError("task_ratio must lie in [0, 1]");
  if (max_answer_len == 0) throw UsageError("max_answer_len must be >= 1");
  if (ensemble_size == 0) throw UsageError("ensemble_size must be >= 1");
}

Config desk_preset() {
  Config c;
  c.train.lr = 2e-3;
  c.train.epochs = 30;
  return c;
}

Config reference_preset() {
  Config c;
  c.model.n_heads = 8;
  c.train.lr = 1e-3;
  c.train.batch_size = 16;
  c.train.epochs = 3;
  c.train.freeze_embeddings = true;
  return c;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& v) {
  T out{};
  const char* first = v.data();
  const char* last = v.data() + v.size();
  const auto r = std::from_chars(first, last, out);
  if (r.ec != std::errc() || r.ptr != last) throw UsageError("config: bad value for " + key + ": '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("config: bad boolean for " + key + ": '" + v + "'");
}

void apply(Config& c, const std::string& key, const std::string& v) {
  auto& m = c.model;
  auto& t = c.train;
  if (key == "alpha") t.alpha = parse_number<double>(key, v);
  else if (key == "beta") t.beta = parse_number<double>(key, v);
  else if (key == "lr") t.lr = parse_number<double>(key, v);
  else if (key == "batch_size") t.batch_size = parse_number<std::size_t>(key, v);
  else if (key == "epochs") t.epochs = parse_number<std::size_t>(key, v);
  else if (key == "seed") t.seed = parse_number<std::uint64_t>(key, v);
  else if (key == "task_ratio") t.task_ratio = parse_number<double>(key, v);
  else if (key == "freeze_embeddings") t.freeze_embeddings = parse_bool(key, v);
  else if (key == "weight_decay") t.weight_decay = parse_number<double>(key, v);
  else if (key == "clip_norm") t.clip_norm = parse_number<double>(key, v);
  else if (key == "max_answer_len") t.max_answer_len = parse_number<std::size_t>(key, v);
  else if (key == "ensemble_size") t.ensemble_size = parse_number<std::size_t>(key, v);
  else if (key == "adam_beta1") t.adam_beta1 = parse_number<double>(key, v);
  else if (key == "adam_beta2") t.adam_beta2 = parse_number<double>(key, v);
  else if (key == "adam_eps") t.adam_eps = parse_number<double>(key, v);
  else if (key == "vocab_size") m.vocab_size = parse_number<std::size_t>(key, v);
  else if (key == "n_blocks") m.n_blocks = parse_number<std::size_t>(key, v);
  else if (key == "n_heads") m.n_heads = parse_number<std::size_t>(key, v);
  else if (key == "d_model") m.d_model = parse_number<std::size_t>(key, v);
  else if (key == "encoder_blocks") m.encoder_blocks = parse_number<std::size_t>(key, v);
  else if (key == "encoder_heads") m.encoder_heads = parse_number<std::size_t>(key, v);
  else if (key == "d_ff") m.d_ff = parse_number<std::size_t>(key, v);
  else if (key == "max_seq_len") m.max_seq_len = parse_number<std::size_t>(key, v);
  else if (key == "block_input_mode") {
    if (v == "propagate") m.block_input = BlockInputMode::propagate;
    else if (v == "reread") m.block_input = BlockInputMode::reread;
    else throw UsageError("config: block_input_mode must be propagate|reread");
  } else if (key == "attention_mode") {
    if (v == "memory") m.attention = AttentionMode::memory;
    else if (v == "standard") m.attention = AttentionMode::standard;
    else throw UsageError("config: attention_mode must be memory|standard");
  } else {
    throw UsageError("config: unknown key '" + key + "'");
  }
}

}  // namespace

Config parse_config(std::string_view text) {
  Config c = desk_preset();
  std::istringstream in{std::string(text)};
  std::size_t lineno = 0;
  bool seen_setting = false;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key == "preset") {
      if (seen_setting) throw UsageError("config line " + std::to_string(lineno) + ": preset must precede other keys");
      if (value == "desk") c = desk_preset();
      else if (value == "reference") c = reference_preset();
      else throw UsageError("config: unknown preset '" + value + "'");
      continue;
    }
    seen_setting = true;
    apply(c, key, value);
  }
  c.model.validate();
  c.train.validate();
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_text(const Config& c) {
  std::ostringstream os;
  os.precision(17);
  const auto& m = c.model;
  const auto& t = c.train;
  os << "alpha = " << t.alpha << "\nbeta = " << t.beta << "\nlr = " << t.lr << "\nbatch_size = " << t.batch_size
     << "\nepochs = " << t.epochs << "\nseed = " << t.seed << "\ntask_ratio = " << t.task_ratio
     << "\nfreeze_embeddings = " << (t.freeze_embeddings ? "true" : "false") << "\nweight_decay = " << t.weight_decay
     << "\nclip_norm = " << t.clip_norm << "\nmax_answer_len = " << t.max_answer_len
     << "\nensemble_size = " << t.ensemble_size << "\nadam_beta1 = " << t.adam_beta1
     << "\nadam_beta2 = " << t.adam_beta2 << "\nadam_eps = " << t.adam_eps << "\nvocab_size = " << m.vocab_size
     << "\nn_blocks = " << m.n_blocks << "\nn_heads = " << m.n_heads
     << "\nd_model = " << m.d_model << "\nencoder_blocks = " << m.encoder_blocks
     << "\nencoder_heads = " << m.encoder_heads << "\nd_ff = " << m.d_ff << "\nmax_seq_len = " << m.max_seq_len
     << "\nblock_input_mode = " << (m.block_input == BlockInputMode::propagate ? "propagate" : "reread")
     << "\nattention_mode = " << (m.attention == AttentionMode::memory ? "memory" : "standard") << '\n';
  return os.str();
}

}  // namespace mrc
