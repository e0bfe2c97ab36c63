#pragma once

#include "cann/network.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace cann {

/// Provenance recorded next to the weights so `evolve` can rebuild the run.
struct CheckpointMeta {
    std::string problem;
    std::string variant;
    std::string stencil; // "edge" or "vertex"
    std::vector<double> lo, hi;
    std::vector<int> counts;
    double dt = 0.0;
    double final_time = 0.0;
    std::string target_mode; // "fd" or "exact"
    std::uint64_t seed = 0;
    double final_loss = std::numeric_limits<double>::quiet_NaN();
    long iterations = 0;
};

/// Self-describing JSON document; doubles round-trip bit-exactly.
void save_checkpoint(const std::string& path, const MlpParams& params,
                     const CheckpointMeta& meta);
std::pair<MlpParams, CheckpointMeta> load_checkpoint(const std::string& path);

} // namespace cann
