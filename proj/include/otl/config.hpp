#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "otl/embed.hpp"
#include "otl/lda.hpp"
#include "otl/net.hpp"
#include "otl/optimizer.hpp"

namespace otl {

// Every tunable value of the pipeline. Keys in config files use the field
// names below.
struct RunConfig {
  std::uint64_t seed = 1;

  // optimizer
  double lr = 0.002;
  double beta1 = 0.99;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double schedule_decay = 0.004;

  // network
  double dropout = 0.5;
  double leaky_slope = 0.3;
  std::size_t lstm_units = 100;
  std::vector<int> kernel_sizes{3, 4, 5};
  std::size_t filters = 200;
  std::size_t dense_units = 100;
  std::size_t max_seq_len = 100;

  // embeddings
  std::size_t embed_dim = 300;
  std::size_t buckets = std::size_t{1} << 18;
  int ngram_min = 3;
  int ngram_max = 6;
  std::uint64_t embed_seed = 0;

  // topic models
  int k_topics = 20;
  int k_users = 50;
  double alpha = 0.0;  // 0 selects 10 / K
  double beta = 0.01;
  int lda_iterations = 1000;
  int infer_iterations = 50;
  int infer_burn_in = 25;
  std::size_t min_mentions = 2;
  std::size_t min_user_freq = 5;

  // training
  std::size_t pretrain_batch = 128;
  std::size_t pretrain_epochs = 10;
  std::size_t finetune_batch = 32;
  std::size_t finetune_epochs = 50;
  std::size_t tail = 808;
  std::size_t runs = 10;

  // linear baseline
  double baseline_l2 = 1e-4;
  std::size_t baseline_epochs = 50;
  double baseline_lr = 0.1;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;

  NadamConfig nadam() const;
  EmbeddingConfig embedding() const;
  LdaOptions lda(int topics) const;
  InferOptions infer() const;
  // Architecture with the given input width and head size.
  NetConfig net(std::size_t input_dim, std::size_t n_classes) const;
};

// Sets one key from its textual value and re-validates ranges.
// Unknown keys and out-of-range values raise DataError naming the key.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);
void validate(const RunConfig& config);

// key=value lines; `#` starts a comment; blank lines ignored.
void apply_config(RunConfig& config, std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

std::vector<std::string> config_keys();
void write_config(std::ostream& out, const RunConfig& config);

}  // namespace otl
