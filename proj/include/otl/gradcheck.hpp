#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "otl/net.hpp"

namespace otl {

struct GradCheckOptions {
  double epsilon = 1e-5;
  // Denominator floor for the relative error, so that near-zero gradient
  // pairs are compared absolutely.
  double floor = 1e-6;
  // Coordinates checked per tensor; 0 checks every coordinate.
  std::size_t per_tensor = 0;
  std::size_t batch_size = 2;
  std::size_t max_len = 8;
  Mode mode = Mode::train;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst;  // "tensor[index]"
  std::size_t checked = 0;
  // Largest |analytic| gradient entry found in a frozen layer (should be 0).
  double frozen_leak = 0.0;
};

// Random batch of `batch_size` samples with lengths in [1, max_len].
std::vector<Sample> random_samples(const NetConfig& config, std::size_t count, std::size_t max_len,
                                   std::uint64_t seed);

// Compares backward() with central differences of loss() for the layers in
// `mask` on a random batch drawn from `seed`.
GradCheckResult gradient_check(const NetConfig& config, const FreezeMask& mask, std::uint64_t seed,
                               const GradCheckOptions& options = {});

}  // namespace otl
