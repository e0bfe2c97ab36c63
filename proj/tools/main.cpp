#include "cann/bench.hpp"
#include "cann/checkpoint.hpp"
#include "cann/errors.hpp"
#include "cann/evolve.hpp"
#include "cann/gradcheck.hpp"
#include "cann/problems.hpp"
#include "cann/training.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace cann;

std::vector<int> parse_sizes(const std::string& csv) {
    std::vector<int> sizes;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            sizes.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ConfigError("bad --sizes entry '" + item + "'");
        }
    }
    if (sizes.size() < 3) throw ConfigError("--sizes needs at least 3 comma-separated widths");
    return sizes;
}

int cmd_train(const std::string& config_path, int mesh_index, int seed_index,
              std::string out_path) {
    ExperimentConfig cfg = load_config(config_path);
    if (mesh_index < 0 || mesh_index >= static_cast<int>(cfg.meshes.size()))
        throw ConfigError("--mesh-index out of range (config has " +
                          std::to_string(cfg.meshes.size()) + " meshes)");
    if (seed_index < 0 || seed_index >= static_cast<int>(cfg.seeds.size()))
        throw ConfigError("--seed-index out of range (config has " +
                          std::to_string(cfg.seeds.size()) + " seeds)");

    const MeshEntry mesh = cfg.meshes[static_cast<std::size_t>(mesh_index)];
    const std::uint64_t seed = cfg.seeds[static_cast<std::size_t>(seed_index)];
    const ProblemSpec spec = catalog(cfg.problem, cfg.train_variant);
    const StencilSpec stencil{cfg.stencil, spec.dim};
    const GridSpec grid = grid_for(spec, mesh.dx);
    const double dt = cfg.dt_absolute > 0.0 ? cfg.dt_absolute : cfg.dt_multiplier * mesh.dx;
    (void)make_plan(cfg.final_time, dt, spec.bc, stencil);

    const auto [f0, f1] = generate_target(spec, grid, dt, cfg.target_mode);
    LearningSet set = assemble_pairs(f0, f1, spec.bc, stencil);
    if (cfg.train.split_fraction < 1.0)
        set = split_set(set, cfg.train.split_fraction, seed).first;

    std::vector<int> sizes{stencil.input_width()};
    for (int h : cfg.hidden) sizes.push_back(h);
    sizes.push_back(1);

    TrainConfig tc = cfg.train;
    tc.seed = seed;
    TrainResult tr = train(set, tc, init_params(sizes, seed));

    CheckpointMeta meta;
    meta.problem = to_string(cfg.problem);
    meta.variant = cfg.train_variant;
    meta.stencil = cfg.stencil == StencilSpec::Kind::EdgeNeighbors ? "edge" : "vertex";
    meta.lo = grid.lo;
    meta.hi = grid.hi;
    meta.counts = grid.counts;
    meta.dt = dt;
    meta.final_time = cfg.final_time;
    meta.target_mode = cfg.target_mode == TargetMode::FDReference ? "fd" : "exact";
    meta.seed = seed;
    meta.final_loss = tr.best_loss;
    meta.iterations = tr.iterations;

    if (out_path.empty())
        out_path = cfg.name + "_seed" + std::to_string(seed) + ".json";
    save_checkpoint(out_path, tr.params, meta);
    std::printf("trained %s on %s (dx=%s, dt=%.6g): loss %.4e after %ld updates -> %s\n",
                to_string(cfg.problem).c_str(), cfg.train_variant.c_str(), mesh.label.c_str(),
                dt, tr.best_loss, tr.iterations, out_path.c_str());
    return kExitOk;
}

int cmd_evolve(const std::string& checkpoint_path, std::string problem, std::string variant,
               std::string t_token, std::string dt_token, std::string dx_token,
               const std::string& out_path) {
    auto [params, meta] = load_checkpoint(checkpoint_path);
    if (problem.empty()) problem = meta.problem;
    if (problem.empty())
        throw ConfigError("checkpoint carries no problem name; pass --problem");
    if (variant.empty()) variant = meta.variant;
    const ProblemSpec spec = catalog(problem_id_from_string(problem), variant);

    GridSpec grid;
    if (!dx_token.empty()) {
        grid = grid_for(spec, parse_value(dx_token));
    } else if (!meta.counts.empty()) {
        grid = build_grid(meta.lo, meta.hi, meta.counts);
    } else {
        throw ConfigError("checkpoint carries no grid; pass --dx");
    }

    const double dt = dt_token.empty() ? meta.dt : parse_value(dt_token);
    if (!(dt > 0.0)) throw ConfigError("checkpoint carries no dt; pass --dt");
    const double T = t_token.empty() ? meta.final_time : parse_value(t_token);

    StencilSpec stencil;
    stencil.dim = spec.dim;
    stencil.kind = meta.stencil == "vertex" ? StencilSpec::Kind::VertexNeighbors
                                            : StencilSpec::Kind::EdgeNeighbors;
    if (static_cast<Eigen::Index>(stencil.input_width()) != params.weights.front().cols())
        throw ConfigError("checkpoint input width does not match the stencil/problem");

    const MarchPlan plan = make_plan(T, dt, spec.bc, stencil);
    const Field f0 = initial_averages(spec, grid);
    const MarchResult mr = march(params, f0, plan);

    std::ofstream os(out_path);
    if (!os) throw ConfigError("cannot write field CSV: " + out_path);
    write_field_csv(os, mr.field);

    const Field ref = spec.has_exact() ? exact_averages(spec, grid, T)
                                       : fd_reference(spec, grid, T);
    const ErrorReport rep = error_norms(mr.field, ref);
    std::printf("%s/%s marched to T=%.10g in %ld steps (dt=%.6g): L2=%.4e Linf=%.4e -> %s\n",
                problem.c_str(), variant.c_str(), T, plan.n_steps, dt, rep.l2, rep.linf,
                out_path.c_str());
    return kExitOk;
}

int cmd_bench(std::vector<std::string> config_paths, const std::string& config_dir,
              const std::string& out_dir) {
    if (!config_dir.empty()) {
        std::vector<std::string> found;
        for (const auto& entry : std::filesystem::directory_iterator(config_dir))
            if (entry.path().extension() == ".json") found.push_back(entry.path().string());
        std::sort(found.begin(), found.end());
        config_paths.insert(config_paths.end(), found.begin(), found.end());
    }
    if (config_paths.empty())
        throw ConfigError("bench: no configs given (use --config or --config-dir)");
    for (const auto& path : config_paths) {
        ExperimentConfig cfg = load_config(path);
        std::string out = cfg.output_dir;
        if (!out_dir.empty())
            out = out_dir + "/" + cfg.name;
        RunRecord rec = run_and_write(cfg, out);
        std::cout << formatted_table(rec) << "\n(outputs in " << out << ")\n";
    }
    return kExitOk;
}

int cmd_gradcheck(const std::string& sizes_csv, std::uint64_t seed) {
    const auto sizes = parse_sizes(sizes_csv);
    const GradCheckResult res = gradcheck(sizes, seed);
    std::printf("sizes=%s seed=%llu\n", sizes_csv.c_str(),
                static_cast<unsigned long long>(seed));
    std::printf("max relative error, backward vs central differences: %.3e\n",
                res.max_rel_backward);
    std::printf("max relative error, loss gradient vs central differences: %.3e\n",
                res.max_rel_loss);
    return kExitOk;
}

int cmd_export(const std::string& checkpoint_path) {
    auto [params, meta] = load_checkpoint(checkpoint_path);
    std::printf("checkpoint %s\n", checkpoint_path.c_str());
    std::printf("sizes:");
    for (int s : params.sizes) std::printf(" %d", s);
    std::printf("\nactivations: tanh (hidden), identity (output)\n");
    std::printf("seed: %llu\n", static_cast<unsigned long long>(meta.seed));
    if (!meta.problem.empty())
        std::printf("trained on: %s/%s dt=%.10g\n", meta.problem.c_str(), meta.variant.c_str(),
                    meta.dt);
    if (std::isfinite(meta.final_loss))
        std::printf("final loss: %.6e after %ld updates\n", meta.final_loss, meta.iterations);
    for (std::size_t i = 0; i < params.weights.size(); ++i) {
        std::printf("W%zu (%ldx%ld):\n", i + 1, static_cast<long>(params.weights[i].rows()),
                    static_cast<long>(params.weights[i].cols()));
        for (Eigen::Index r = 0; r < params.weights[i].rows(); ++r) {
            for (Eigen::Index c = 0; c < params.weights[i].cols(); ++c)
                std::printf(" % .17g", params.weights[i](r, c));
            std::printf("\n");
        }
        std::printf("b%zu:", i + 1);
        for (Eigen::Index r = 0; r < params.biases[i].size(); ++r)
            std::printf(" % .17g", params.biases[i][r]);
        std::printf("\n");
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cell-average network PDE solver"};
    app.require_subcommand(1);

    std::string config_path, out_path, checkpoint_path;
    int mesh_index = 0, seed_index = 0;

    auto* train_cmd = app.add_subcommand("train", "train one network from a config");
    train_cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
    train_cmd->add_option("--mesh-index", mesh_index, "which mesh of the config to use");
    train_cmd->add_option("--seed-index", seed_index, "which seed of the config to use");
    train_cmd->add_option("--out", out_path, "checkpoint output path");

    std::string problem, variant, t_token, dt_token, dx_token;
    std::string field_out = "field.csv";
    auto* evolve_cmd = app.add_subcommand("evolve", "march a checkpoint and export the field");
    evolve_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint JSON")->required();
    evolve_cmd->add_option("--problem", problem, "problem id (default: from checkpoint)");
    evolve_cmd->add_option("--variant", variant, "initial-condition variant");
    evolve_cmd->add_option("--T", t_token, "final time (e.g. pi, 1, pi/4)");
    evolve_cmd->add_option("--dt", dt_token, "time step (default: from checkpoint)");
    evolve_cmd->add_option("--dx", dx_token, "mesh size (default: grid from checkpoint)");
    evolve_cmd->add_option("--out", field_out, "field CSV output path");

    std::vector<std::string> bench_configs;
    std::string config_dir, bench_out;
    auto* bench_cmd = app.add_subcommand("bench", "run experiment configs and emit tables");
    bench_cmd->add_option("--config", bench_configs, "config file(s)");
    bench_cmd->add_option("--config-dir", config_dir, "directory of config files");
    bench_cmd->add_option("--out", bench_out, "output root (default: each config's own)");

    std::string sizes_csv = "5,10,1";
    std::uint64_t gc_seed = 7;
    auto* grad_cmd = app.add_subcommand("gradcheck", "compare gradients to finite differences");
    grad_cmd->add_option("--sizes", sizes_csv, "layer widths, e.g. 5,10,1");
    grad_cmd->add_option("--seed", gc_seed, "rng seed");

    auto* export_cmd = app.add_subcommand("export", "dump checkpoint parameters as text");
    export_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint JSON")->required();

    try {
        app.parse(argc, argv);
        if (train_cmd->parsed())
            return cmd_train(config_path, mesh_index, seed_index, out_path);
        if (evolve_cmd->parsed())
            return cmd_evolve(checkpoint_path, problem, variant, t_token, dt_token, dx_token,
                              field_out);
        if (bench_cmd->parsed()) return cmd_bench(bench_configs, config_dir, bench_out);
        if (grad_cmd->parsed()) return cmd_gradcheck(sizes_csv, gc_seed);
        if (export_cmd->parsed()) return cmd_export(checkpoint_path);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    } catch (const cann::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cann::DivergenceError& e) {
        std::cerr << "divergence: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const cann::BlowUpError& e) {
        std::cerr << "blow-up: " << e.what() << "\n";
        return kExitBlowUp;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
