#include "otl/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "otl/error.hpp"

namespace otl {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw DataError("invalid value '" + std::string(value) + "' for config key '" + std::string(key) + "'");
}

template <class T>
T parse_integer(std::string_view key, std::string_view value) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) bad_value(key, value);
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  const std::string s(value);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    bad_value(key, value);
  }
  if (used != s.size()) bad_value(key, value);
  return out;
}

std::vector<int> parse_int_list(std::string_view key, std::string_view value) {
  std::vector<int> out;
  std::string item;
  std::istringstream in{std::string(value)};
  while (std::getline(in, item, ',')) out.push_back(parse_integer<int>(key, trim(item)));
  if (out.empty()) bad_value(key, value);
  return out;
}

std::string format_double(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

struct Field {
  std::function<void(RunConfig&, std::string_view key, std::string_view value)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Field integer_field(T RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) { c.*member = parse_integer<T>(k, v); },
          [member](const RunConfig& c) { return std::to_string(c.*member); }};
}

Field double_field(double RunConfig::*member) {
  return {[member](RunConfig& c, std::string_view k, std::string_view v) { c.*member = parse_double(k, v); },
          [member](const RunConfig& c) { return format_double(c.*member); }};
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = {
      {"seed", integer_field(&RunConfig::seed)},
      {"lr", double_field(&RunConfig::lr)},
      {"beta1", double_field(&RunConfig::beta1)},
      {"beta2", double_field(&RunConfig::beta2)},
      {"epsilon", double_field(&RunConfig::epsilon)},
      {"schedule_decay", double_field(&RunConfig::schedule_decay)},
      {"dropout", double_field(&RunConfig::dropout)},
      {"leaky_slope", double_field(&RunConfig::leaky_slope)},
      {"lstm_units", integer_field(&RunConfig::lstm_units)},
      {"kernel_sizes",
       {[](RunConfig& c, std::string_view k, std::string_view v) { c.kernel_sizes = parse_int_list(k, v); },
        [](const RunConfig& c) {
          std::string s;
          for (std::size_t i = 0; i < c.kernel_sizes.size(); ++i)
            s += (i ? "," : "") + std::to_string(c.kernel_sizes[i]);
          return s;
        }}},
      {"filters", integer_field(&RunConfig::filters)},
      {"dense_units", integer_field(&RunConfig::dense_units)},
      {"max_seq_len", integer_field(&RunConfig::max_seq_len)},
      {"embed_dim", integer_field(&RunConfig::embed_dim)},
      {"buckets", integer_field(&RunConfig::buckets)},
      {"ngram_min", integer_field(&RunConfig::ngram_min)},
      {"ngram_max", integer_field(&RunConfig::ngram_max)},
      {"embed_seed", integer_field(&RunConfig::embed_seed)},
      {"k_topics", integer_field(&RunConfig::k_topics)},
      {"k_users", integer_field(&RunConfig::k_users)},
      {"alpha", double_field(&RunConfig::alpha)},
      {"beta", double_field(&RunConfig::beta)},
      {"lda_iterations", integer_field(&RunConfig::lda_iterations)},
      {"infer_iterations", integer_field(&RunConfig::infer_iterations)},
      {"infer_burn_in", integer_field(&RunConfig::infer_burn_in)},
      {"min_mentions", integer_field(&RunConfig::min_mentions)},
      {"min_user_freq", integer_field(&RunConfig::min_user_freq)},
      {"pretrain_batch", integer_field(&RunConfig::pretrain_batch)},
      {"pretrain_epochs", integer_field(&RunConfig::pretrain_epochs)},
      {"finetune_batch", integer_field(&RunConfig::finetune_batch)},
      {"finetune_epochs", integer_field(&RunConfig::finetune_epochs)},
      {"tail", integer_field(&RunConfig::tail)},
      {"runs", integer_field(&RunConfig::runs)},
      {"baseline_l2", double_field(&RunConfig::baseline_l2)},
      {"baseline_epochs", integer_field(&RunConfig::baseline_epochs)},
      {"baseline_lr", double_field(&RunConfig::baseline_lr)},
  };
  return table;
}

void require(bool ok, const char* key, const char* range) {
  if (!ok) throw DataError(std::string("config key '") + key + "' out of range: expected " + range);
}

}  // namespace

NadamConfig RunConfig::nadam() const { return {lr, beta1, beta2, epsilon, schedule_decay}; }

EmbeddingConfig RunConfig::embedding() const { return {embed_dim, buckets, ngram_min, ngram_max, embed_seed}; }

LdaOptions RunConfig::lda(int topics) const {
  LdaOptions o;
  o.topics = topics;
  o.alpha = alpha;
  o.beta = beta;
  o.iterations = lda_iterations;
  o.seed = seed;
  return o;
}

InferOptions RunConfig::infer() const { return {infer_iterations, infer_burn_in, seed}; }

NetConfig RunConfig::net(std::size_t input_dim, std::size_t n_classes) const {
  NetConfig c;
  c.input_dim = input_dim;
  c.lstm_units = lstm_units;
  c.kernel_sizes = kernel_sizes;
  c.filters = filters;
  c.dense_units = dense_units;
  c.cluster_width = static_cast<std::size_t>(k_users) + 1;
  c.n_classes = n_classes;
  c.leaky_slope = leaky_slope;
  c.dropout = dropout;
  c.max_seq_len = max_seq_len;
  return c;
}

void validate(const RunConfig& c) {
  require(c.lr > 0.0, "lr", "> 0");
  require(c.beta1 >= 0.0 && c.beta1 < 1.0, "beta1", "[0, 1)");
  require(c.beta2 >= 0.0 && c.beta2 < 1.0, "beta2", "[0, 1)");
  require(c.epsilon > 0.0, "epsilon", "> 0");
  require(c.schedule_decay >= 0.0, "schedule_decay", ">= 0");
  require(c.dropout >= 0.0 && c.dropout < 1.0, "dropout", "[0, 1)");
  require(c.leaky_slope >= 0.0 && c.leaky_slope < 1.0, "leaky_slope", "[0, 1)");
  require(c.lstm_units >= 1, "lstm_units", ">= 1");
  require(!c.kernel_sizes.empty(), "kernel_sizes", "a non-empty list");
  for (int k : c.kernel_sizes) require(k >= 1, "kernel_sizes", "entries >= 1");
  require(c.filters >= 1, "filters", ">= 1");
  require(c.dense_units >= 1, "dense_units", ">= 1");
  require(c.max_seq_len >= 1, "max_seq_len", ">= 1");
  require(c.embed_dim >= 1, "embed_dim", ">= 1");
  require(c.buckets >= 1, "buckets", ">= 1");
  require(c.ngram_min >= 1, "ngram_min", ">= 1");
  require(c.ngram_max >= c.ngram_min, "ngram_max", ">= ngram_min");
  require(c.k_topics >= 1, "k_topics", ">= 1");
  require(c.k_users >= 1, "k_users", ">= 1");
  require(c.alpha >= 0.0, "alpha", ">= 0 (0 selects 10/K)");
  require(c.beta > 0.0, "beta", "> 0");
  require(c.lda_iterations >= 1, "lda_iterations", ">= 1");
  require(c.infer_iterations >= 1, "infer_iterations", ">= 1");
  require(c.infer_burn_in >= 0 && c.infer_burn_in < c.infer_iterations, "infer_burn_in",
          "[0, infer_iterations)");
  require(c.min_mentions >= 1, "min_mentions", ">= 1");
  require(c.pretrain_batch >= 1, "pretrain_batch", ">= 1");
  require(c.finetune_batch >= 1, "finetune_batch", ">= 1");
  require(c.finetune_epochs >= 1, "finetune_epochs", ">= 1");
  require(c.runs >= 1, "runs", ">= 1");
  require(c.baseline_l2 >= 0.0, "baseline_l2", ">= 0");
  require(c.baseline_lr > 0.0, "baseline_lr", "> 0");
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  const auto& table = fields();
  auto it = table.find(key);
  if (it == table.end()) throw DataError("unknown config key '" + std::string(key) + "'");
  RunConfig next = config;
  it->second.set(next, key, trim(value));
  validate(next);
  config = std::move(next);
}

void apply_config(RunConfig& config, std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw DataError("config line " + std::to_string(line_no) + ": expected key=value");
    try {
      set_config_value(config, trim(body.substr(0, eq)), body.substr(eq + 1));
    } catch (const DataError& e) {
      throw DataError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  RunConfig config;
  apply_config(config, in);
  return config;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : fields()) keys.push_back(k);
  return keys;
}

void write_config(std::ostream& out, const RunConfig& config) {
  for (const auto& [k, f] : fields()) out << k << '=' << f.get(config) << '\n';
}

}  // namespace otl
