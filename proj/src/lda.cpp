#include "otl/lda.hpp"

#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "otl/error.hpp"
#include "otl/random.hpp"

namespace otl {

namespace {

int sample_topic(std::vector<double>& weights, Rng& rng) {
  double total = 0.0;
  for (double& w : weights) {
    total += w;
    w = total;
  }
  const double u = uniform01(rng) * total;
  for (std::size_t t = 0; t < weights.size(); ++t)
    if (u < weights[t]) return static_cast<int>(t);
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace

int LdaModel::index_of(const std::string& word) const {
  auto it = word_index.find(word);
  return it == word_index.end() ? -1 : it->second;
}

LdaModel train_gibbs(std::span<const Document> docs, const LdaOptions& options) {
  if (options.topics < 1) throw DataError("LDA needs at least one topic");
  if (options.beta <= 0.0 || options.alpha < 0.0) throw DataError("LDA priors must be positive");
  if (docs.empty()) throw DataError("LDA needs at least one document");

  LdaModel m;
  m.topics = options.topics;
  m.alpha = options.alpha > 0.0 ? options.alpha : 10.0 / options.topics;
  m.beta = options.beta;
  m.seed = options.seed;

  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (docs[d].empty()) throw DataError("document " + std::to_string(d) + " is empty");
    std::vector<int> ids;
    ids.reserve(docs[d].size());
    for (const auto& w : docs[d]) {
      auto [it, inserted] = m.word_index.try_emplace(w, static_cast<int>(m.vocab.size()));
      if (inserted) m.vocab.push_back(w);
      ids.push_back(it->second);
    }
    m.doc_words.push_back(std::move(ids));
  }

  const auto K = static_cast<std::size_t>(m.topics);
  const std::size_t V = m.vocab.size();
  const double vbeta = static_cast<double>(V) * m.beta;
  m.topic_word.assign(K * V, 0);
  m.topic_totals.assign(K, 0);
  m.doc_topic.assign(docs.size() * K, 0);

  Rng rng(options.seed);
  m.assignments.resize(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    auto& z = m.assignments[d];
    z.resize(m.doc_words[d].size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      const auto t = uniform_index(rng, K);
      z[i] = static_cast<int>(t);
      ++m.topic_word[t * V + static_cast<std::size_t>(m.doc_words[d][i])];
      ++m.topic_totals[t];
      ++m.doc_topic[d * K + t];
    }
  }

  std::vector<double> weights(K);
  for (int sweep = 1; sweep <= options.iterations; ++sweep) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      const auto& words = m.doc_words[d];
      auto& z = m.assignments[d];
      long* dt = &m.doc_topic[d * K];
      for (std::size_t i = 0; i < words.size(); ++i) {
        const auto w = static_cast<std::size_t>(words[i]);
        auto old = static_cast<std::size_t>(z[i]);
        --m.topic_word[old * V + w];
        --m.topic_totals[old];
        --dt[old];
        for (std::size_t t = 0; t < K; ++t) {
          weights[t] = (static_cast<double>(dt[t]) + m.alpha) *
                       (static_cast<double>(m.topic_word[t * V + w]) + m.beta) /
                       (static_cast<double>(m.topic_totals[t]) + vbeta);
        }
        const auto fresh = static_cast<std::size_t>(sample_topic(weights, rng));
        z[i] = static_cast<int>(fresh);
        ++m.topic_word[fresh * V + w];
        ++m.topic_totals[fresh];
        ++dt[fresh];
      }
    }
    assert(check_counts(m).empty());
    if (options.on_sweep) options.on_sweep(sweep, m);
  }
  return m;
}

std::string check_counts(const LdaModel& m) {
  const auto K = static_cast<std::size_t>(m.topics);
  const std::size_t V = m.vocab.size();
  for (std::size_t t = 0; t < K; ++t) {
    long sum = 0;
    for (std::size_t w = 0; w < V; ++w) {
      const long c = m.topic_word[t * V + w];
      if (c < 0) return "negative topic-word count";
      sum += c;
    }
    if (sum != m.topic_totals[t]) return "topic " + std::to_string(t) + " total mismatch";
  }
  for (std::size_t d = 0; d < m.assignments.size(); ++d) {
    long sum = 0;
    for (std::size_t t = 0; t < K; ++t) {
      const long c = m.doc_topic[d * K + t];
      if (c < 0) return "negative doc-topic count";
      sum += c;
    }
    if (sum != static_cast<long>(m.assignments[d].size()))
      return "document " + std::to_string(d) + " length mismatch";
  }
  return {};
}

std::vector<double> infer_doc_topics(const LdaModel& model, std::span<const std::string> doc,
                                     const InferOptions& options) {
  const auto K = static_cast<std::size_t>(model.topics);
  const std::size_t V = model.vocab.size();
  std::vector<std::size_t> words;
  for (const auto& w : doc)
    if (int id = model.index_of(w); id >= 0) words.push_back(static_cast<std::size_t>(id));
  if (words.empty()) return std::vector<double>(K, 1.0 / static_cast<double>(K));

  const double vbeta = static_cast<double>(V) * model.beta;
  Rng rng(options.seed);
  std::vector<long> local(K, 0);
  std::vector<int> z(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    z[i] = static_cast<int>(uniform_index(rng, K));
    ++local[static_cast<std::size_t>(z[i])];
  }

  const double denom = static_cast<double>(words.size()) + static_cast<double>(K) * model.alpha;
  std::vector<double> acc(K, 0.0);
  std::vector<double> weights(K);
  int kept = 0;
  for (int it = 1; it <= options.iterations; ++it) {
    for (std::size_t i = 0; i < words.size(); ++i) {
      --local[static_cast<std::size_t>(z[i])];
      for (std::size_t t = 0; t < K; ++t)
        weights[t] = (static_cast<double>(local[t]) + model.alpha) *
                     (static_cast<double>(model.topic_word[t * V + words[i]]) + model.beta) /
                     (static_cast<double>(model.topic_totals[t]) + vbeta);
      z[i] = sample_topic(weights, rng);
      ++local[static_cast<std::size_t>(z[i])];
    }
    if (it > options.burn_in) {
      for (std::size_t t = 0; t < K; ++t) acc[t] += (static_cast<double>(local[t]) + model.alpha) / denom;
      ++kept;
    }
  }
  if (kept == 0) {
    for (std::size_t t = 0; t < K; ++t) acc[t] = (static_cast<double>(local[t]) + model.alpha) / denom;
    kept = 1;
  }
  double total = 0.0;
  for (double& a : acc) {
    a /= kept;
    total += a;
  }
  for (double& a : acc) a /= total;
  return acc;
}

int argmax_lowest(std::span<const double> values) {
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  return best;
}

int majority_topic(const LdaModel& model, std::span<const std::string> doc, const InferOptions& options) {
  auto dist = infer_doc_topics(model, doc, options);
  return argmax_lowest(dist);
}

namespace {

constexpr const char* kLdaMagic = "otl-lda";
constexpr int kLdaVersion = 1;

std::string hex_double(double v) {
  std::ostringstream os;
  os << std::hexfloat << v;
  return os.str();
}

double parse_double(const std::string& s, const std::string& what) {
  // strtod accepts the hexfloat form written by hex_double.
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw DataError("LDA checkpoint: bad " + what);
  return v;
}

}  // namespace

void save_lda(const LdaModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  const std::size_t V = model.vocab.size();
  out << kLdaMagic << ' ' << kLdaVersion << '\n';
  out << "topics " << model.topics << '\n';
  out << "alpha " << hex_double(model.alpha) << '\n';
  out << "beta " << hex_double(model.beta) << '\n';
  out << "seed " << model.seed << '\n';
  out << "vocab " << V << '\n';
  for (std::size_t w = 0; w < V; ++w) {
    out << model.vocab[w];
    for (int t = 0; t < model.topics; ++t) out << ' ' << model.n_tw(t, static_cast<int>(w));
    out << '\n';
  }
}

LdaModel load_lda(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kLdaMagic) throw DataError("not an LDA checkpoint: " + path.string());
  if (version != kLdaVersion)
    throw DataError("LDA checkpoint version " + std::to_string(version) + " is not supported");

  auto expect = [&](const char* key) {
    std::string k, v;
    if (!(in >> k >> v) || k != key) throw DataError(std::string("LDA checkpoint: missing ") + key);
    return v;
  };
  LdaModel m;
  m.topics = std::stoi(expect("topics"));
  m.alpha = parse_double(expect("alpha"), "alpha");
  m.beta = parse_double(expect("beta"), "beta");
  m.seed = std::stoull(expect("seed"));
  const auto V = static_cast<std::size_t>(std::stoull(expect("vocab")));
  if (m.topics < 1) throw DataError("LDA checkpoint: bad topic count");
  const auto K = static_cast<std::size_t>(m.topics);
  m.topic_word.assign(K * V, 0);
  m.topic_totals.assign(K, 0);
  m.vocab.reserve(V);
  for (std::size_t w = 0; w < V; ++w) {
    std::string word;
    if (!(in >> word)) throw DataError("LDA checkpoint: truncated vocabulary");
    m.word_index.emplace(word, static_cast<int>(w));
    m.vocab.push_back(std::move(word));
    for (std::size_t t = 0; t < K; ++t) {
      long c = 0;
      if (!(in >> c) || c < 0) throw DataError("LDA checkpoint: truncated counts");
      m.topic_word[t * V + w] = c;
      m.topic_totals[t] += c;
    }
  }
  return m;
}

UserClusters cluster_users(std::span<const Document> mention_lists, LdaOptions options) {
  if (mention_lists.empty()) throw DataError("no mention lists to cluster");
  auto model = train_gibbs(mention_lists, options);
  UserClusters clusters;
  clusters.topics = model.topics;
  for (std::size_t u = 0; u < model.vocab.size(); ++u) {
    int best = 0;
    for (int t = 1; t < model.topics; ++t)
      if (model.n_tw(t, static_cast<int>(u)) > model.n_tw(best, static_cast<int>(u))) best = t;
    clusters.cluster_of.emplace(model.vocab[u], best);
  }
  return clusters;
}

void save_clusters(const UserClusters& clusters, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& [user, cluster] : clusters.cluster_of) out << user << '\t' << cluster << '\n';
}

UserClusters load_clusters(const std::filesystem::path& path, int topics) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  UserClusters clusters;
  std::string line;
  std::size_t line_no = 0;
  int max_cluster = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto tab = line.find('\t');
    int cluster = -1;
    if (tab != std::string::npos) {
      auto [ptr, ec] = std::from_chars(line.data() + tab + 1, line.data() + line.size(), cluster);
      if (ec != std::errc() || ptr != line.data() + line.size()) cluster = -1;
    }
    if (tab == std::string::npos || cluster < 0)
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ": expected user<TAB>cluster");
    clusters.cluster_of.emplace(line.substr(0, tab), cluster);
    max_cluster = std::max(max_cluster, cluster);
  }
  clusters.topics = topics > 0 ? topics : max_cluster + 1;
  if (max_cluster >= clusters.topics) throw DataError(path.string() + ": cluster id out of range");
  return clusters;
}

}  // namespace otl
