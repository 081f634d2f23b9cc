#include "otl/baseline.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "otl/error.hpp"
#include "otl/random.hpp"

namespace otl {

namespace {

void check_inputs(std::span<const Vector> features, std::span<const int> labels, std::size_t n_classes) {
  if (features.size() != labels.size()) throw DataError("feature and label counts differ");
  if (features.empty()) throw DataError("no training examples");
  const auto dim = features.front().size();
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != dim) throw DataError("feature " + std::to_string(i) + " has inconsistent dimension");
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= n_classes)
      throw DataError("label " + std::to_string(labels[i]) + " out of range");
  }
}

// Highest-scoring wrong class under the margin-augmented scores.
int most_violating(const Vector& scores, int gold) {
  int best = -1;
  double best_score = 0.0;
  for (Eigen::Index c = 0; c < scores.size(); ++c) {
    if (c == gold) continue;
    if (best < 0 || scores[c] > best_score) {
      best = static_cast<int>(c);
      best_score = scores[c];
    }
  }
  return best;
}

}  // namespace

Vector linear_scores(const LinearModel& model, const Vector& feature) {
  if (static_cast<std::size_t>(feature.size()) != model.dim())
    throw DataError("feature dimension " + std::to_string(feature.size()) + " does not match model dimension " +
                    std::to_string(model.dim()));
  const auto d = feature.size();
  return model.weights.leftCols(d) * feature + model.weights.col(d);
}

int predict(const LinearModel& model, const Vector& feature) {
  const Vector scores = linear_scores(model, feature);
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  return static_cast<int>(best);
}

double linear_objective(const LinearModel& model, std::span<const Vector> features, std::span<const int> labels,
                        double l2) {
  double hinge = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const Vector s = linear_scores(model, features[i]);
    const int y = labels[i];
    const int r = most_violating(s, y);
    hinge += std::max(0.0, 1.0 + s[r] - s[y]);
  }
  const auto d = static_cast<Eigen::Index>(model.dim());
  const double reg = 0.5 * l2 * model.weights.leftCols(d).squaredNorm();
  return (features.empty() ? 0.0 : hinge / static_cast<double>(features.size())) + reg;
}

LinearModel train_linear(std::span<const Vector> features, std::span<const int> labels,
                         std::vector<std::string> classes, const LinearOptions& options) {
  check_inputs(features, labels, classes.size());
  std::set<int> present(labels.begin(), labels.end());
  if (present.size() < 2) throw DataError("linear baseline needs at least two classes in the training data");

  const auto d = features.front().size();
  LinearModel model;
  model.classes = std::move(classes);
  model.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(model.classes.size()), d + 1);

  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(options.seed, 1));
  std::size_t t = 0;
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      // Decaying step size keeps late epochs from oscillating.
      const double eta = options.lr / (1.0 + options.lr * options.l2 * static_cast<double>(t++));
      const Vector& x = features[i];
      const int y = labels[i];
      const Vector s = linear_scores(model, x);
      const int r = most_violating(s, y);
      model.weights.leftCols(d) *= (1.0 - eta * options.l2);
      if (1.0 + s[r] - s[y] > 0.0) {
        model.weights.row(y).head(d) += eta * x.transpose();
        model.weights(y, d) += eta;
        model.weights.row(r).head(d) -= eta * x.transpose();
        model.weights(r, d) -= eta;
      }
    }
    model.objective.push_back(linear_objective(model, features, labels, options.l2));
  }
  return model;
}

std::vector<std::vector<std::string>> top_terms_per_category(std::span<const TokenizedTweet> tweets,
                                                             std::span<const int> labels, std::size_t n_classes,
                                                             const IdfTable& idf, std::size_t n) {
  if (tweets.size() != labels.size()) throw DataError("tweet and label counts differ");
  std::vector<std::map<std::string, std::size_t>> freq(n_classes);
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= n_classes)
      throw DataError("label " + std::to_string(labels[i]) + " out of range");
    for (const auto& tok : tweets[i].tokens) ++freq[labels[i]][tok];
  }
  std::vector<std::vector<std::string>> out(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    std::vector<std::pair<double, std::string>> ranked;
    for (const auto& [tok, count] : freq[c]) ranked.emplace_back(idf.idf(tok) * static_cast<double>(count), tok);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (std::size_t k = 0; k < std::min(n, ranked.size()); ++k) out[c].push_back(ranked[k].second);
  }
  return out;
}

}  // namespace otl
