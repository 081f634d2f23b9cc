#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "otl/embed.hpp"
#include "otl/textprep.hpp"

namespace otl {

// Linear multiclass model; the last weight column is the bias.
struct LinearModel {
  Eigen::MatrixXd weights;  // n_classes x (dim + 1)
  std::vector<std::string> classes;
  std::vector<double> objective;  // training objective after each epoch

  std::size_t dim() const { return weights.cols() > 0 ? static_cast<std::size_t>(weights.cols() - 1) : 0; }
};

struct LinearOptions {
  double l2 = 1e-4;
  std::size_t epochs = 50;
  double lr = 0.1;
  std::uint64_t seed = 1;
};

// Crammer-Singer multiclass hinge loss with L2, plain SGD over a seeded
// per-epoch permutation. Labels index `classes`.
LinearModel train_linear(std::span<const Vector> features, std::span<const int> labels,
                         std::vector<std::string> classes, const LinearOptions& options);

// Mean hinge loss plus (l2 / 2) * ||W||^2 over the non-bias weights.
double linear_objective(const LinearModel& model, std::span<const Vector> features, std::span<const int> labels,
                        double l2);

Vector linear_scores(const LinearModel& model, const Vector& feature);
// Argmax of the scores; ties go to the first class.
int predict(const LinearModel& model, const Vector& feature);

// Tokens of each class's tweets ranked by idf * in-class frequency,
// descending, ties broken lexicographically. Result is indexed by label id.
std::vector<std::vector<std::string>> top_terms_per_category(std::span<const TokenizedTweet> tweets,
                                                             std::span<const int> labels, std::size_t n_classes,
                                                             const IdfTable& idf, std::size_t n);

}  // namespace otl
