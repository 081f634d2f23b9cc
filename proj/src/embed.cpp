#include "otl/embed.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "otl/error.hpp"
#include "otl/random.hpp"
#include "otl/unicode.hpp"

namespace otl {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> char_ngrams(std::string_view token, int n_min, int n_max) {
  std::u32string word = U"<" + unicode::decode_utf8(token) + U">";
  std::vector<std::string> out;
  const auto len = static_cast<int>(word.size());
  for (int start = 0; start < len; ++start)
    for (int n = n_min; n <= n_max && start + n <= len; ++n)
      out.push_back(unicode::encode_utf8(std::u32string_view(word).substr(start, n)));
  return out;
}

EmbeddingTable::EmbeddingTable(EmbeddingConfig config) : config_(config) {
  if (config_.dim == 0) throw DataError("embedding dimension must be positive");
  if (config_.buckets == 0) throw DataError("bucket count must be positive");
  if (config_.ngram_min < 1 || config_.ngram_min > config_.ngram_max)
    throw DataError("invalid n-gram range");
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path, EmbeddingConfig config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open vector file " + path.string());

  std::vector<std::pair<std::string, std::vector<double>>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> values;
    std::string tok;
    while (fields >> tok) {
      double v = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw DataError(path.string() + ": line " + std::to_string(line_no) + ": bad number '" + tok + "'");
      values.push_back(v);
    }
    if (line_no == 1 && values.size() == 1 && word.find_first_not_of("0123456789") == std::string::npos &&
        values[0] == std::floor(values[0])) {
      dim = static_cast<std::size_t>(values[0]);  // header `count dim`
      continue;
    }
    if (dim == 0) dim = values.size();
    if (values.size() != dim || dim == 0)
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ": expected " + std::to_string(dim) +
                      " values, found " + std::to_string(values.size()));
    rows.emplace_back(std::move(word), std::move(values));
  }
  if (dim != 0) config.dim = dim;
  EmbeddingTable table(config);
  for (auto& [word, values] : rows)
    table.add_word(std::move(word), Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size())));
  return table;
}

void EmbeddingTable::add_word(std::string word, Vector vec) {
  if (static_cast<std::size_t>(vec.size()) != config_.dim)
    throw DataError("vector for '" + word + "' has wrong dimension");
  words_.insert_or_assign(std::move(word), std::move(vec));
}

bool EmbeddingTable::contains(std::string_view token) const {
  return words_.find(std::string(token)) != words_.end();
}

Vector EmbeddingTable::bucket_vector(std::size_t bucket) const {
  std::uint64_t state = derive_seed(config_.seed, bucket);
  const double scale = 1.0 / static_cast<double>(config_.dim);
  Vector v(static_cast<Eigen::Index>(config_.dim));
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    v[j] = (u - 0.5) * scale;
  }
  return v;
}

Vector EmbeddingTable::embed(std::string_view token) const {
  if (auto it = words_.find(std::string(token)); it != words_.end()) return it->second;
  auto grams = char_ngrams(token, config_.ngram_min, config_.ngram_max);
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(config_.dim));
  if (grams.empty()) return sum;
  for (const auto& g : grams) sum += bucket_vector(bucket_of(g));
  return sum / static_cast<double>(grams.size());
}

IdfTable::IdfTable(std::size_t doc_count, std::unordered_map<std::string, std::size_t> df)
    : doc_count_(doc_count), df_(std::move(df)) {}

std::size_t IdfTable::df(std::string_view token) const {
  auto it = df_.find(std::string(token));
  return it == df_.end() ? 0 : it->second;
}

double IdfTable::idf(std::string_view token) const {
  const auto d = df(token);
  const auto n = static_cast<double>(doc_count_);
  return d == 0 ? std::log(n) : std::log(n / static_cast<double>(d));
}

IdfTable compute_idf(std::span<const TokenizedTweet> docs) {
  if (docs.empty()) throw DataError("cannot compute IDF over an empty corpus");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    std::unordered_set<std::string_view> seen;
    for (const auto& tok : doc.tokens)
      if (seen.insert(tok).second) ++df[tok];
  }
  return IdfTable(docs.size(), std::move(df));
}

Vector idf_weighted_vector(const EmbeddingTable& table, const IdfTable& idf, const TokenizedTweet& tweet) {
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(table.dim()));
  double weight = 0.0;
  for (const auto& tok : tweet.tokens) {
    double w = idf.idf(tok);
    if (w == 0.0) continue;
    sum += w * table.embed(tok);
    weight += w;
  }
  if (weight == 0.0) return Vector::Zero(static_cast<Eigen::Index>(table.dim()));
  return sum / weight;
}

}  // namespace otl
