#include "otl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "otl/error.hpp"

namespace otl {

namespace {

constexpr char kMagic[8] = {'O', 'T', 'L', 'N', 'E', 'T', 'C', 'K'};

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void u64(std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out_.write(buf, 8);
  }
  void u32(std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out_.write(buf, 4);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u64(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void values(std::span<const double> data) {
    for (double v : data) f64(v);
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void bytes(char* buf, std::size_t n) {
    in_.read(buf, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw DataError("checkpoint is truncated");
  }
  std::uint64_t u64() {
    unsigned char buf[8];
    bytes(reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
  }
  std::uint32_t u32() {
    unsigned char buf[4];
    bytes(reinterpret_cast<char*>(buf), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    auto n = u64();
    if (n > 4096) throw DataError("checkpoint is corrupt (name length)");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  void values(std::span<double> data) {
    for (double& v : data) v = f64();
  }

 private:
  std::istream& in_;
};

void write_config(Writer& w, const NetConfig& c) {
  w.u64(c.input_dim);
  w.u64(c.lstm_units);
  w.u64(c.filters);
  w.u64(c.dense_units);
  w.u64(c.cluster_width);
  w.u64(c.n_classes);
  w.u64(c.max_seq_len);
  w.u64(c.kernel_sizes.size());
  for (int k : c.kernel_sizes) w.u64(static_cast<std::uint64_t>(k));
  w.f64(c.leaky_slope);
  w.f64(c.dropout);
}

NetConfig read_config(Reader& r) {
  NetConfig c;
  c.input_dim = r.u64();
  c.lstm_units = r.u64();
  c.filters = r.u64();
  c.dense_units = r.u64();
  c.cluster_width = r.u64();
  c.n_classes = r.u64();
  c.max_seq_len = r.u64();
  auto kernels = r.u64();
  if (kernels > 64) throw DataError("checkpoint is corrupt (kernel count)");
  c.kernel_sizes.clear();
  for (std::uint64_t i = 0; i < kernels; ++i) c.kernel_sizes.push_back(static_cast<int>(r.u64()));
  c.leaky_slope = r.f64();
  c.dropout = r.f64();
  constexpr std::uint64_t kLimit = 1u << 20;
  if (c.input_dim > kLimit || c.lstm_units > kLimit || c.filters > kLimit || c.dense_units > kLimit ||
      c.cluster_width > kLimit || c.n_classes > kLimit)
    throw DataError("checkpoint is corrupt (layer widths)");
  return c;
}

}  // namespace

void write_checkpoint(std::ostream& out, const NetworkParams& params, const OptimizerState* state) {
  Writer w(out);
  out.write(kMagic, sizeof(kMagic));
  w.u32(kCheckpointVersion);
  write_config(w, params.config);
  w.u32(state ? 1 : 0);
  auto views = tensors(params);
  w.u64(views.size());
  for (const auto& t : views) {
    w.str(t.name);
    w.u64(t.data.size());
  }
  for (const auto& t : views) w.values(t.data);
  if (state) {
    const auto& c = state->config;
    for (double v : {c.lr, c.beta1, c.beta2, c.epsilon, c.schedule_decay}) w.f64(v);
    for (const auto& s : state->schedules) {
      w.u64(static_cast<std::uint64_t>(s.step));
      w.f64(s.product);
    }
    for (const auto& t : tensors(state->m)) w.values(t.data);
    for (const auto& t : tensors(state->v)) w.values(t.data);
  }
  if (!out) throw DataError("failed to write checkpoint");
}

Checkpoint read_checkpoint(std::istream& in) {
  Reader r(in);
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw DataError("not a network checkpoint");
  auto version = r.u32();
  if (version != kCheckpointVersion)
    throw DataError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                    std::to_string(kCheckpointVersion) + ")");
  NetConfig config = read_config(r);
  const bool has_state = r.u32() != 0;

  Checkpoint ck{NetworkParams::zeros(config), std::nullopt};
  auto views = tensors(ck.params);
  if (r.u64() != views.size()) throw DataError("checkpoint shape table does not match its architecture");
  for (const auto& t : views) {
    auto name = r.str();
    auto count = r.u64();
    if (name != t.name || count != t.data.size())
      throw DataError("checkpoint tensor '" + name + "' does not match expected '" + t.name + "'");
  }
  for (auto& t : views) r.values(t.data);
  if (has_state) {
    OptimizerState state = OptimizerState::fresh(config, {});
    auto& c = state.config;
    c.lr = r.f64();
    c.beta1 = r.f64();
    c.beta2 = r.f64();
    c.epsilon = r.f64();
    c.schedule_decay = r.f64();
    for (auto& s : state.schedules) {
      s.step = static_cast<long>(r.u64());
      s.product = r.f64();
    }
    for (auto& t : tensors(state.m)) r.values(t.data);
    for (auto& t : tensors(state.v)) r.values(t.data);
    ck.state = std::move(state);
  }
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params, const OptimizerState* state) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_checkpoint(out, params, state);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_checkpoint(in);
}

std::string layer_checksum(const NetworkParams& params, int layer) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  for (const auto& t : tensors(params)) {
    if (t.layer != layer) continue;
    EVP_DigestUpdate(ctx, t.data.data(), t.data.size() * sizeof(double));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int{digest[i]};
  return os.str();
}

}  // namespace otl
