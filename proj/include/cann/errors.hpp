#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cann {

// Exit codes used by the CLI: 0 success, 2 config, 3 divergence, 4 blow-up.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IndexError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Training loss became non-finite or exploded past the restart budget.
struct DivergenceError : std::runtime_error {
    long iteration;
    double loss;
    double step_size;
    DivergenceError(long it, double l, double step)
        : std::runtime_error("training diverged at iteration " + std::to_string(it) +
                             " (loss=" + std::to_string(l) +
                             ", step=" + std::to_string(step) + ")"),
          iteration(it), loss(l), step_size(step) {}
};

// A marched field picked up a non-finite value.
struct BlowUpError : std::runtime_error {
    std::vector<int> cell;
    long step;
    BlowUpError(std::vector<int> c, long s, const std::string& what)
        : std::runtime_error(what), cell(std::move(c)), step(s) {}
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitBlowUp = 4;

} // namespace cann
