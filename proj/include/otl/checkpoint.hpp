#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "otl/net.hpp"
#include "otl/optimizer.hpp"

namespace otl {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  NetworkParams params;
  std::optional<OptimizerState> state;
};

// Binary layout: 8-byte magic "OTLNETCK", u32 version, architecture fields,
// shape table (name, element count per tensor), then raw little-endian
// float64 values; optimizer moments and schedules follow when present.
void write_checkpoint(std::ostream& out, const NetworkParams& params, const OptimizerState* state = nullptr);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const NetworkParams& params,
                     const OptimizerState* state = nullptr);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace otl
