#include "otl/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "otl/error.hpp"
#include "otl/random.hpp"

namespace otl {

namespace {

using Eigen::Index;

Index idx(std::size_t n) { return static_cast<Index>(n); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void glorot(Matrix& m, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  // Column-major fill keeps the draw order tied to memory layout.
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, -limit, limit);
}

LstmCell zero_cell(std::size_t d, std::size_t h) {
  return {Matrix::Zero(idx(4 * h), idx(d)), Matrix::Zero(idx(4 * h), idx(h)), Vector::Zero(idx(4 * h))};
}

template <class Params, class View>
std::vector<View> collect(Params& p) {
  std::vector<View> out;
  auto add = [&](int layer, std::string name, auto& m) {
    out.push_back(View{layer, std::move(name), {m.data(), static_cast<std::size_t>(m.size())}});
  };
  add(1, "lstm.fw.w_in", p.forward_cell.w_in);
  add(1, "lstm.fw.w_rec", p.forward_cell.w_rec);
  add(1, "lstm.fw.bias", p.forward_cell.bias);
  add(1, "lstm.bw.w_in", p.backward_cell.w_in);
  add(1, "lstm.bw.w_rec", p.backward_cell.w_rec);
  add(1, "lstm.bw.bias", p.backward_cell.bias);
  for (auto& block : p.conv) {
    add(2, "conv" + std::to_string(block.width) + ".weight", block.weight);
    add(2, "conv" + std::to_string(block.width) + ".bias", block.bias);
  }
  add(3, "dense.weight", p.dense_w);
  add(3, "dense.bias", p.dense_b);
  add(4, "out.weight", p.out_w);
  add(4, "out.bias", p.out_b);
  return out;
}

void check_config(const NetConfig& c) {
  if (c.n_classes < 2) throw DataError("network needs at least 2 classes");
  if (c.kernel_sizes.empty()) throw DataError("network needs at least one kernel size");
  for (int k : c.kernel_sizes)
    if (k < 1) throw DataError("kernel sizes must be positive");
  if (c.input_dim == 0 || c.lstm_units == 0 || c.filters == 0 || c.dense_units == 0)
    throw DataError("layer widths must be positive");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw DataError("dropout must be in [0, 1)");
}

// Bernoulli keep-mask scaled by 1/keep (inverted dropout).
void draw_mask(Matrix& mask, double keep, Rng& rng) {
  const double scale = 1.0 / keep;
  for (Index i = 0; i < mask.size(); ++i) mask.data()[i] = uniform01(rng) < keep ? scale : 0.0;
}

void draw_mask(Vector& mask, double keep, Rng& rng) {
  const double scale = 1.0 / keep;
  for (Index i = 0; i < mask.size(); ++i) mask[i] = uniform01(rng) < keep ? scale : 0.0;
}

struct LstmTrace {
  Matrix gates, cells, hidden;
};

// Runs one direction over the first `len` columns of `x`. For the reverse
// direction the recurrence starts at the last token; results stay indexed by
// token position.
LstmTrace run_lstm(const LstmCell& cell, const Matrix& x, std::size_t len, bool reverse) {
  const Index H = cell.w_rec.cols();
  const Index L = idx(len);
  LstmTrace tr{Matrix(4 * H, L), Matrix(H, L), Matrix(H, L)};
  if (L == 0) return tr;
  Matrix z_in = cell.w_in * x.leftCols(L);
  z_in.colwise() += cell.bias;
  Vector h = Vector::Zero(H);
  Vector c = Vector::Zero(H);
  for (Index s = 0; s < L; ++s) {
    const Index t = reverse ? L - 1 - s : s;
    Vector z = z_in.col(t);
    z.noalias() += cell.w_rec * h;
    auto gates = tr.gates.col(t);
    for (Index k = 0; k < H; ++k) {
      gates[k] = sigmoid(z[k]);
      gates[H + k] = sigmoid(z[H + k]);
      gates[2 * H + k] = std::tanh(z[2 * H + k]);
      gates[3 * H + k] = sigmoid(z[3 * H + k]);
      c[k] = gates[H + k] * c[k] + gates[k] * gates[2 * H + k];
      h[k] = gates[3 * H + k] * std::tanh(c[k]);
    }
    tr.cells.col(t) = c;
    tr.hidden.col(t) = h;
  }
  return tr;
}

// Backpropagation through time for one direction. `d_out` is dLoss/dh per
// token position (H x L).
void backprop_lstm(const LstmCell& cell, const Matrix& x, const Matrix& gates, const Matrix& cells,
                   const Matrix& hidden, const Matrix& d_out, bool reverse, LstmCell& grad) {
  const Index H = cell.w_rec.cols();
  const Index L = gates.cols();
  if (L == 0) return;
  Matrix dz(4 * H, L);
  Vector dh_next = Vector::Zero(H);
  Vector dc_next = Vector::Zero(H);
  // Walk against the processing order.
  for (Index s = 0; s < L; ++s) {
    const Index t = reverse ? s : L - 1 - s;
    const Index prev = reverse ? t + 1 : t - 1;
    const bool has_prev = reverse ? prev < L : prev >= 0;
    auto g = gates.col(t);
    auto col = dz.col(t);
    for (Index k = 0; k < H; ++k) {
      const double i = g[k], f = g[H + k], gg = g[2 * H + k], o = g[3 * H + k];
      const double tc = std::tanh(cells(k, t));
      const double c_prev = has_prev ? cells(k, prev) : 0.0;
      const double dh = d_out(k, t) + dh_next[k];
      const double dc = dh * o * (1.0 - tc * tc) + dc_next[k];
      col[k] = dc * gg * i * (1.0 - i);
      col[H + k] = dc * c_prev * f * (1.0 - f);
      col[2 * H + k] = dc * i * (1.0 - gg * gg);
      col[3 * H + k] = dh * tc * o * (1.0 - o);
      dc_next[k] = dc * f;
    }
    dh_next.noalias() = cell.w_rec.transpose() * col;
  }
  grad.w_in.noalias() += dz * x.leftCols(L).transpose();
  grad.bias += dz.rowwise().sum();
  if (L > 1) {
    if (reverse)
      grad.w_rec.noalias() += dz.leftCols(L - 1) * hidden.rightCols(L - 1).transpose();
    else
      grad.w_rec.noalias() += dz.rightCols(L - 1) * hidden.leftCols(L - 1).transpose();
  }
}

}  // namespace

int NetConfig::max_kernel() const {
  return kernel_sizes.empty() ? 1 : *std::max_element(kernel_sizes.begin(), kernel_sizes.end());
}

NetworkParams NetworkParams::zeros(const NetConfig& c) {
  NetworkParams p;
  p.config = c;
  p.forward_cell = zero_cell(c.input_dim, c.lstm_units);
  p.backward_cell = zero_cell(c.input_dim, c.lstm_units);
  for (int k : c.kernel_sizes)
    p.conv.push_back({k, Matrix::Zero(idx(c.filters), idx(static_cast<std::size_t>(k) * 2 * c.lstm_units)),
                      Vector::Zero(idx(c.filters))});
  p.dense_w = Matrix::Zero(idx(c.dense_units), idx(c.pooled_width() + c.cluster_width));
  p.dense_b = Vector::Zero(idx(c.dense_units));
  p.out_w = Matrix::Zero(idx(c.n_classes), idx(c.dense_units));
  p.out_b = Vector::Zero(idx(c.n_classes));
  return p;
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors(*this)) n += t.data.size();
  return n;
}

std::vector<TensorView> tensors(NetworkParams& params) { return collect<NetworkParams, TensorView>(params); }

std::vector<ConstTensorView> tensors(const NetworkParams& params) {
  return collect<const NetworkParams, ConstTensorView>(params);
}

FreezeMask::FreezeMask(std::initializer_list<int> trainable_layers) {
  for (int layer : trainable_layers) {
    if (layer < 1 || layer > 4) throw DataError("layer id out of range: " + std::to_string(layer));
    bits_.set(static_cast<std::size_t>(layer - 1));
  }
}

bool FreezeMask::trainable(int layer) const {
  return layer >= 1 && layer <= 4 && bits_.test(static_cast<std::size_t>(layer - 1));
}

int FreezeMask::lowest() const {
  for (int l = 1; l <= 4; ++l)
    if (trainable(l)) return l;
  return 5;
}

std::vector<int> FreezeMask::layers() const {
  std::vector<int> out;
  for (int l = 1; l <= 4; ++l)
    if (trainable(l)) out.push_back(l);
  return out;
}

std::string FreezeMask::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (int l : layers()) {
    if (!first) os << ',';
    os << l;
    first = false;
  }
  os << '}';
  return os.str();
}

std::vector<int> Batch::labels() const {
  std::vector<int> out;
  out.reserve(samples.size());
  for (const auto* s : samples) out.push_back(s->label);
  return out;
}

NetworkParams init_params(const NetConfig& config, std::uint64_t seed) {
  check_config(config);
  NetworkParams p = NetworkParams::zeros(config);
  Rng rng(seed);
  const std::size_t H = config.lstm_units;
  for (LstmCell* cell : {&p.forward_cell, &p.backward_cell}) {
    glorot(cell->w_in, config.input_dim, 4 * H, rng);
    glorot(cell->w_rec, H, 4 * H, rng);
    cell->bias.segment(idx(H), idx(H)).setOnes();
  }
  for (auto& block : p.conv) {
    const auto k = static_cast<std::size_t>(block.width);
    glorot(block.weight, k * 2 * H, k * config.filters, rng);
  }
  glorot(p.dense_w, config.pooled_width() + config.cluster_width, config.dense_units, rng);
  glorot(p.out_w, config.dense_units, config.n_classes, rng);
  return p;
}

NetworkParams replace_head(const NetworkParams& params, std::size_t n_classes, std::uint64_t seed) {
  NetworkParams out = params;
  out.config.n_classes = n_classes;
  check_config(out.config);
  out.out_w = Matrix::Zero(idx(n_classes), idx(params.config.dense_units));
  out.out_b = Vector::Zero(idx(n_classes));
  Rng rng(seed);
  glorot(out.out_w, params.config.dense_units, n_classes, rng);
  return out;
}

ForwardResult forward(const NetworkParams& params, const Batch& batch, Mode mode, std::uint64_t dropout_seed) {
  const NetConfig& cfg = params.config;
  const Index H = idx(cfg.lstm_units);
  const double slope = cfg.leaky_slope;
  const double keep = 1.0 - cfg.dropout;
  const bool dropout = mode == Mode::train && cfg.dropout > 0.0;
  const auto max_kernel = static_cast<std::size_t>(cfg.max_kernel());
  Rng rng(dropout_seed);

  ForwardResult result;
  result.cache.mode = mode;
  result.cache.config = cfg;
  result.cache.samples.resize(batch.size());
  result.probs.resize(idx(cfg.n_classes), idx(batch.size()));
  result.logits.resize(idx(cfg.n_classes), idx(batch.size()));

  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Sample& s = *batch.samples[b];
    SampleCache& sc = result.cache.samples[b];
    if (s.tokens.rows() != idx(cfg.input_dim) || s.length > static_cast<std::size_t>(s.tokens.cols()))
      throw DataError("sample " + std::to_string(b) + ": token matrix does not match the network input");
    if (s.clusters.size() != idx(cfg.cluster_width))
      throw DataError("sample " + std::to_string(b) + ": cluster feature width mismatch");

    sc.length = s.length;
    sc.span = std::max(s.length, max_kernel);
    const Index L = idx(s.length);

    auto fw = run_lstm(params.forward_cell, s.tokens, s.length, false);
    auto bw = run_lstm(params.backward_cell, s.tokens, s.length, true);
    sc.lstm_out = Matrix::Zero(2 * H, idx(sc.span));
    sc.lstm_out.topLeftCorner(H, L) = fw.hidden;
    sc.lstm_out.bottomLeftCorner(H, L) = bw.hidden;
    sc.fw_gates = std::move(fw.gates);
    sc.fw_cells = std::move(fw.cells);
    sc.fw_hidden = std::move(fw.hidden);
    sc.bw_gates = std::move(bw.gates);
    sc.bw_cells = std::move(bw.cells);
    sc.bw_hidden = std::move(bw.hidden);

    sc.conv_in = sc.lstm_out;
    if (dropout) {
      sc.lstm_mask.resize(2 * H, L);
      draw_mask(sc.lstm_mask, keep, rng);
      sc.conv_in.leftCols(L).array() *= sc.lstm_mask.array();
    }

    sc.dense_in.resize(idx(cfg.pooled_width() + cfg.cluster_width));
    Index offset = 0;
    sc.conv_peak.resize(params.conv.size());
    sc.argmax.resize(params.conv.size());
    sc.pooled.resize(params.conv.size());
    sc.pooled_mask.resize(params.conv.size());
    for (std::size_t k = 0; k < params.conv.size(); ++k) {
      const ConvBlock& block = params.conv[k];
      const Index width = block.width;
      const Index positions = idx(sc.span) - width + 1;
      // Column p of the im2col matrix is the contiguous run of `width`
      // input columns starting at p.
      Eigen::Map<const Matrix, 0, Eigen::OuterStride<>> cols(sc.conv_in.data(), 2 * H * width, positions,
                                                             Eigen::OuterStride<>(2 * H));
      Matrix pre = block.weight * cols;
      pre.colwise() += block.bias;
      const Index F = pre.rows();
      Vector peak(F);
      Vector pooled(F);
      std::vector<Index> arg(static_cast<std::size_t>(F));
      for (Index f = 0; f < F; ++f) {
        Index best = 0;
        double best_act = -std::numeric_limits<double>::infinity();
        for (Index p = 0; p < positions; ++p) {
          const double v = pre(f, p);
          const double act = v > 0.0 ? v : slope * v;
          if (act > best_act) {
            best_act = act;
            best = p;
          }
        }
        arg[static_cast<std::size_t>(f)] = best;
        peak[f] = pre(f, best);
        pooled[f] = best_act;
      }
      Vector dropped = pooled;
      if (dropout) {
        sc.pooled_mask[k].resize(F);
        draw_mask(sc.pooled_mask[k], keep, rng);
        dropped.array() *= sc.pooled_mask[k].array();
      }
      sc.dense_in.segment(offset, F) = dropped;
      offset += F;
      sc.conv_peak[k] = std::move(peak);
      sc.argmax[k] = std::move(arg);
      sc.pooled[k] = std::move(pooled);
    }
    sc.dense_in.segment(offset, s.clusters.size()) = s.clusters;

    sc.dense_pre = params.dense_w * sc.dense_in + params.dense_b;
    sc.dense_out = sc.dense_pre.unaryExpr([slope](double v) { return v > 0.0 ? v : slope * v; });
    sc.logits = params.out_w * sc.dense_out + params.out_b;
    const double mx = sc.logits.maxCoeff();
    sc.probs = (sc.logits.array() - mx).exp();
    sc.probs /= sc.probs.sum();
    result.logits.col(idx(b)) = sc.logits;
    result.probs.col(idx(b)) = sc.probs;
  }
  return result;
}

double loss(const Matrix& probs, std::span<const int> labels) {
  if (static_cast<std::size_t>(probs.cols()) != labels.size())
    throw DataError("loss: label count does not match batch size");
  if (labels.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    const int y = labels[b];
    if (y < 0 || y >= probs.rows()) throw DataError("loss: label out of range");
    total -= std::log(std::max(probs(y, idx(b)), 1e-12));
  }
  return total / static_cast<double>(labels.size());
}

NetworkParams backward(const NetworkParams& params, const Batch& batch, const ForwardCache& cache,
                       const FreezeMask& mask) {
  const NetConfig& cfg = params.config;
  if (!(cache.config == cfg)) throw DataError("backward: cache was produced by a different network shape");
  if (cache.samples.size() != batch.size()) throw DataError("backward: cache does not match batch");

  NetworkParams grad = NetworkParams::zeros(cfg);
  const int lowest = mask.lowest();
  if (lowest > 4 || batch.size() == 0) return grad;

  const Index H = idx(cfg.lstm_units);
  const double slope = cfg.leaky_slope;
  const bool dropout = cache.mode == Mode::train && cfg.dropout > 0.0;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());

  for (std::size_t b = 0; b < batch.size(); ++b) {
    const Sample& s = *batch.samples[b];
    const SampleCache& sc = cache.samples[b];
    if (sc.length != s.length) throw DataError("backward: cache does not match batch");

    Vector d_logits = sc.probs;
    d_logits[s.label] -= 1.0;
    d_logits *= inv_batch;
    if (mask.trainable(4)) {
      grad.out_w.noalias() += d_logits * sc.dense_out.transpose();
      grad.out_b += d_logits;
    }
    if (lowest > 3) continue;

    Vector d_dense_pre = params.out_w.transpose() * d_logits;
    for (Index i = 0; i < d_dense_pre.size(); ++i)
      if (sc.dense_pre[i] <= 0.0) d_dense_pre[i] *= slope;
    if (mask.trainable(3)) {
      grad.dense_w.noalias() += d_dense_pre * sc.dense_in.transpose();
      grad.dense_b += d_dense_pre;
    }
    if (lowest > 2) continue;

    Vector d_dense_in = params.dense_w.transpose() * d_dense_pre;
    Matrix d_conv_in;
    if (lowest == 1) d_conv_in = Matrix::Zero(2 * H, idx(sc.span));
    Index offset = 0;
    for (std::size_t k = 0; k < params.conv.size(); ++k) {
      const ConvBlock& block = params.conv[k];
      const Index F = block.weight.rows();
      const Index patch = block.weight.cols();
      Vector d_peak = d_dense_in.segment(offset, F);
      offset += F;
      if (dropout) d_peak.array() *= sc.pooled_mask[k].array();
      for (Index f = 0; f < F; ++f)
        if (sc.conv_peak[k][f] <= 0.0) d_peak[f] *= slope;
      // Only the pooled position of each filter receives gradient.
      for (Index f = 0; f < F; ++f) {
        const double g = d_peak[f];
        if (g == 0.0) continue;
        const Index p = sc.argmax[k][static_cast<std::size_t>(f)];
        Eigen::Map<const Vector> window(sc.conv_in.data() + p * 2 * H, patch);
        if (mask.trainable(2)) {
          grad.conv[k].weight.row(f).noalias() += g * window.transpose();
          grad.conv[k].bias[f] += g;
        }
        if (lowest == 1) {
          Eigen::Map<Vector> d_window(d_conv_in.data() + p * 2 * H, patch);
          d_window.noalias() += g * block.weight.row(f).transpose();
        }
      }
    }
    if (lowest > 1) continue;

    const Index L = idx(sc.length);
    Matrix d_lstm = d_conv_in.leftCols(L);
    if (dropout) d_lstm.array() *= sc.lstm_mask.array();
    backprop_lstm(params.forward_cell, s.tokens, sc.fw_gates, sc.fw_cells, sc.fw_hidden, d_lstm.topRows(H), false,
                  grad.forward_cell);
    backprop_lstm(params.backward_cell, s.tokens, sc.bw_gates, sc.bw_cells, sc.bw_hidden, d_lstm.bottomRows(H),
                  true, grad.backward_cell);
  }
  return grad;
}

}  // namespace otl
