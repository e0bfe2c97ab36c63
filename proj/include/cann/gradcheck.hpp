#pragma once

#include <cstdint>
#include <vector>

namespace cann {

struct GradCheckResult {
    double max_rel_backward = 0.0; // backward vs central differences of forward
    double max_rel_loss = 0.0;     // loss_gradient vs central differences of loss
};

/// Central-difference check (step 1e-6) on a randomly initialized net and a
/// small synthetic learning set, both derived from the seed.
GradCheckResult gradcheck(const std::vector<int>& sizes, std::uint64_t seed);

} // namespace cann
