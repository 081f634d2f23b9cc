#pragma once

#include <bitset>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace otl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Layer ids used by freeze masks and schedules.
inline constexpr int kLstmLayer = 1;
inline constexpr int kConvLayer = 2;
inline constexpr int kDenseLayer = 3;
inline constexpr int kOutputLayer = 4;

struct NetConfig {
  std::size_t input_dim = 300;
  std::size_t lstm_units = 100;  // per direction
  std::vector<int> kernel_sizes{3, 4, 5};
  std::size_t filters = 200;
  std::size_t dense_units = 100;
  std::size_t cluster_width = 51;  // K_users + 1 (last slot: unknown user)
  std::size_t n_classes = 2;
  double leaky_slope = 0.3;
  double dropout = 0.5;
  std::size_t max_seq_len = 100;

  int max_kernel() const;
  std::size_t pooled_width() const { return filters * kernel_sizes.size(); }

  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

// Gates are stacked in the order input, forget, cell, output.
struct LstmCell {
  Matrix w_in;   // 4H x D
  Matrix w_rec;  // 4H x H
  Vector bias;   // 4H
};

// weight column block j (2H columns) multiplies sequence position p + j.
struct ConvBlock {
  int width = 0;
  Matrix weight;  // filters x (width * 2H)
  Vector bias;    // filters
};

// All trainable weights, grouped into layers 1 (BiLSTM), 2 (conv blocks),
// 3 (dense) and 4 (prediction head). Gradients use the same type.
struct NetworkParams {
  NetConfig config;
  LstmCell forward_cell;
  LstmCell backward_cell;
  std::vector<ConvBlock> conv;
  Matrix dense_w;  // dense_units x (pooled_width + cluster_width)
  Vector dense_b;
  Matrix out_w;    // n_classes x dense_units
  Vector out_b;

  static NetworkParams zeros(const NetConfig& config);
  std::size_t parameter_count() const;
};

template <class T>
struct BasicTensorView {
  int layer;
  std::string name;
  std::span<T> data;
};
using TensorView = BasicTensorView<double>;
using ConstTensorView = BasicTensorView<const double>;

// Every parameter tensor in a fixed order (layer 1 first).
std::vector<TensorView> tensors(NetworkParams& params);
std::vector<ConstTensorView> tensors(const NetworkParams& params);

class FreezeMask {
 public:
  FreezeMask() = default;
  FreezeMask(std::initializer_list<int> trainable_layers);
  static FreezeMask all() { return {1, 2, 3, 4}; }

  bool trainable(int layer) const;
  bool empty() const { return bits_.none(); }
  // Lowest trainable layer id, or 5 when empty.
  int lowest() const;
  std::vector<int> layers() const;
  std::string to_string() const;

  friend bool operator==(const FreezeMask&, const FreezeMask&) = default;

 private:
  std::bitset<4> bits_;
};

// One input example. `tokens` may carry padding columns beyond `length`;
// they are never read.
struct Sample {
  Matrix tokens;  // input_dim x (length + padding)
  std::size_t length = 0;
  Vector clusters;  // multi-hot, cluster_width entries
  int label = 0;
};

struct Batch {
  std::vector<const Sample*> samples;
  std::size_t size() const { return samples.size(); }
  std::vector<int> labels() const;
};

enum class Mode { train, eval };

struct SampleCache {
  std::size_t length = 0;
  std::size_t span = 0;  // max(length, max_kernel): conv input width
  Matrix fw_gates, bw_gates;    // 4H x L, activated
  Matrix fw_cells, bw_cells;    // H x L
  Matrix fw_hidden, bw_hidden;  // H x L, indexed by token position
  Matrix lstm_out;              // 2H x span, zero past length
  Matrix lstm_mask;             // 2H x L dropout scale (train only)
  Matrix conv_in;               // lstm_out after dropout
  std::vector<Vector> conv_peak;                 // pre-activation at the pooled position
  std::vector<std::vector<Eigen::Index>> argmax;  // pooled position per filter
  std::vector<Vector> pooled;       // after LeakyReLU + max-pool
  std::vector<Vector> pooled_mask;  // dropout scale (train only)
  Vector dense_in, dense_pre, dense_out;
  Vector logits, probs;
};

struct ForwardCache {
  Mode mode = Mode::eval;
  NetConfig config;
  std::vector<SampleCache> samples;
};

struct ForwardResult {
  Matrix probs;   // n_classes x batch
  Matrix logits;  // n_classes x batch
  ForwardCache cache;
};

// Glorot-uniform weights, zero biases, LSTM forget-gate bias 1.
NetworkParams init_params(const NetConfig& config, std::uint64_t seed);

// Copies layers 1-3 and draws a fresh prediction layer for `n_classes`.
NetworkParams replace_head(const NetworkParams& params, std::size_t n_classes, std::uint64_t seed);

// BiLSTM -> [conv k + LeakyReLU + global max-pool] x kernels -> concat with
// cluster features -> dense + LeakyReLU -> dense + softmax. Train mode applies
// inverted dropout to the LSTM output sequence and to each pooled vector,
// with masks drawn from `dropout_seed`. Sequences shorter than the widest
// kernel are zero-padded at the conv input.
ForwardResult forward(const NetworkParams& params, const Batch& batch, Mode mode,
                      std::uint64_t dropout_seed = 0);

// Mean categorical cross-entropy, probabilities clamped to >= 1e-12.
double loss(const Matrix& probs, std::span<const int> labels);

// Exact gradient of `loss` for trainable layers; frozen layers get zeros.
NetworkParams backward(const NetworkParams& params, const Batch& batch, const ForwardCache& cache,
                       const FreezeMask& mask);

// Hex SHA-256 over a layer's raw parameter bytes.
std::string layer_checksum(const NetworkParams& params, int layer);

}  // namespace otl
