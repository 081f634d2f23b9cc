#include "otl/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "otl/random.hpp"

namespace otl {

std::vector<Sample> random_samples(const NetConfig& config, std::size_t count, std::size_t max_len,
                                   std::uint64_t seed) {
  Rng rng(derive_seed(seed, 21));
  std::vector<Sample> out;
  for (std::size_t i = 0; i < count; ++i) {
    Sample s;
    s.length = 1 + uniform_index(rng, max_len);
    s.tokens.resize(static_cast<Eigen::Index>(config.input_dim), static_cast<Eigen::Index>(s.length));
    for (Eigen::Index j = 0; j < s.tokens.size(); ++j) s.tokens.data()[j] = uniform(rng, -1.0, 1.0);
    s.clusters = Vector::Zero(static_cast<Eigen::Index>(config.cluster_width));
    for (Eigen::Index j = 0; j < s.clusters.size(); ++j)
      if (uniform_index(rng, 4) == 0) s.clusters[j] = 1.0;
    s.label = static_cast<int>(uniform_index(rng, config.n_classes));
    out.push_back(std::move(s));
  }
  return out;
}

GradCheckResult gradient_check(const NetConfig& config, const FreezeMask& mask, std::uint64_t seed,
                               const GradCheckOptions& options) {
  NetworkParams params = init_params(config, derive_seed(seed, 22));
  // Zero biases put all-padding conv windows exactly on the LeakyReLU kink,
  // where central differences see the mean of both slopes. Check at a
  // generic point instead.
  Rng jitter(derive_seed(seed, 25));
  for (auto& view : tensors(params))
    if (view.name.ends_with("bias"))
      for (double& b : view.data) b += uniform(jitter, -0.1, 0.1);
  const auto samples = random_samples(config, options.batch_size, options.max_len, seed);
  Batch batch;
  for (const auto& s : samples) batch.samples.push_back(&s);
  const auto labels = batch.labels();
  const std::uint64_t dropout_seed = derive_seed(seed, 23);

  auto objective = [&] { return loss(forward(params, batch, options.mode, dropout_seed).probs, labels); };

  const auto fwd = forward(params, batch, options.mode, dropout_seed);
  const NetworkParams grads = backward(params, batch, fwd.cache, mask);

  GradCheckResult result;
  auto param_views = tensors(params);
  const auto grad_views = tensors(grads);
  Rng pick(derive_seed(seed, 24));
  for (std::size_t t = 0; t < param_views.size(); ++t) {
    auto& pv = param_views[t];
    const auto& gv = grad_views[t];
    if (!mask.trainable(pv.layer)) {
      for (double g : gv.data) result.frozen_leak = std::max(result.frozen_leak, std::abs(g));
      continue;
    }
    std::vector<std::size_t> idx(pv.data.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (options.per_tensor > 0 && options.per_tensor < idx.size()) {
      shuffle(idx.begin(), idx.end(), pick);
      idx.resize(options.per_tensor);
      std::sort(idx.begin(), idx.end());
    }
    for (std::size_t i : idx) {
      const double saved = pv.data[i];
      pv.data[i] = saved + options.epsilon;
      const double plus = objective();
      pv.data[i] = saved - options.epsilon;
      const double minus = objective();
      pv.data[i] = saved;
      const double numeric = (plus - minus) / (2.0 * options.epsilon);
      const double analytic = gv.data[i];
      const double denom = std::max({std::abs(numeric), std::abs(analytic), options.floor});
      const double rel = std::abs(numeric - analytic) / denom;
      ++result.checked;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst = pv.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  return result;
}

}  // namespace otl
