#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace mrc {

// memory: bidirectional memory-guided unit; standard: single-direction
// scaled dot-product attention (the ablation baseline).
enum class AttentionMode { memory, standard };
// propagate: block l > 1 reads the previous block output split by the stream
// masks; reread: every block reads the encoder's padded streams.
enum class BlockInputMode { propagate, reread };

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t d_model = 64;
  std::size_t n_heads = 2;
  std::size_t encoder_heads = 2;
  std::size_t encoder_blocks = 2;
  std::size_t n_blocks = 2;
  std::size_t d_ff = 128;
  std::size_t max_seq_len = 64;
  AttentionMode attention = AttentionMode::memory;
  BlockInputMode block_input = BlockInputMode::propagate;

  std::size_t d_head() const { return d_model / n_heads; }
  void validate() const;
};

struct TrainConfig {
  double alpha = 0.5;
  double beta = 1.0;
  double lr = 1e-3;
  std::size_t batch_size = 16;
  std::size_t epochs = 3;
  double task_ratio = 0.5;  // probability that a batch slot draws an NLI sample
  double weight_decay = 0.01;
  double clip_norm = 1.0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  bool freeze_embeddings = false;
  std::uint64_t seed = 1;
  std::size_t max_answer_len = 8;
  std::size_t ensemble_size = 4;

  void validate() const;
};

struct Config {
  ModelConfig model;
  TrainConfig train;
};

// Small model and a longer schedule; what the tests and the CLI default to.
Config desk_preset();
// lr 0.001, batch 16, 3 epochs, 8 heads.
Config reference_preset();

// Flat `key = value` lines; `#` starts a comment. A `preset` key, if present,
// must come first and selects the base the remaining keys override.
Config parse_config(std::string_view text);
Config load_config(const std::string& path);
std::string config_to_text(const Config& cfg);

}  // namespace mrc
