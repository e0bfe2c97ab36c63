#pragma once

#include "cann/checkpoint.hpp"
#include "cann/evolve.hpp"
#include "cann/problems.hpp"
#include "cann/training.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cann {

struct MeshEntry {
    std::string label; // as written in the config, e.g. "pi/16"
    double dx = 0.0;
};

/// One table's worth of runs: mesh sweep x seeds for a single problem setup.
struct ExperimentConfig {
    std::string name;
    ProblemId problem{};
    std::string train_variant;
    std::vector<std::string> test_variants;
    StencilSpec::Kind stencil = StencilSpec::Kind::EdgeNeighbors;
    std::vector<MeshEntry> meshes;
    double dt_multiplier = 1.0; // dt = multiplier * dx unless dt_absolute > 0
    double dt_absolute = 0.0;
    std::string dt_label;
    std::vector<int> hidden;
    TrainConfig train;
    TargetMode target_mode = TargetMode::FDReference;
    double final_time = 0.0;
    std::string final_time_label;
    std::vector<std::uint64_t> seeds;
    std::string output_dir;
};

/// Numeric token: plain number, "a/b", or "pi"-carrying forms like "pi/16", "2pi".
double parse_value(const std::string& token);

ExperimentConfig load_config(const std::string& path);

/// Hash over the semantically meaningful fields (name/output dir excluded).
std::uint64_t config_hash(const ExperimentConfig& config);

struct SeedOutcome {
    std::uint64_t seed = 0;
    bool failed = false;
    std::string failure;
    double final_loss = 0.0;
    long iterations = 0;
    int restarts = 0;
    double wall_seconds = 0.0;
    MlpParams params;
    LossHistory history;
    std::vector<ErrorReport> stream_errors; // one per evaluation stream
};

struct MeshOutcome {
    MeshEntry mesh;
    double dt = 0.0;
    std::vector<SeedOutcome> seeds;
    std::vector<int> best_seed; // per stream, index into seeds; -1 if all failed
};

struct RunRecord {
    ExperimentConfig config;
    std::uint64_t hash = 0;
    std::vector<std::string> streams; // evaluation stream names (variant or holdout tag)
    std::vector<MeshOutcome> meshes;
    // Orders across meshes from the best-seed errors; NaN where undefined.
    std::vector<std::vector<double>> orders_l2;   // [stream][mesh]
    std::vector<std::vector<double>> orders_linf; // [stream][mesh]
};

RunRecord run_experiment(const ExperimentConfig& config);

/// results.csv, table.txt, per-seed loss histories and checkpoints.
void write_outputs(const RunRecord& record, const std::string& out_dir);

RunRecord run_and_write(const ExperimentConfig& config, const std::string& out_override = "");

std::string results_csv(const RunRecord& record);
std::string formatted_table(const RunRecord& record);

} // namespace cann
