#include "cann/bench.hpp"

#include "cann/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>
#include <sstream>

namespace cann {

using nlohmann::json;

namespace {

std::string lower_strip(const std::string& s) {
    std::string out;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c)))
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return out;
}

bool parse_plain(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string sanitize(const std::string& label) {
    std::string out;
    for (char c : label) {
        if (c == '/') out.push_back('_');
        else if (c == '*') out.push_back('x');
        else if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    }
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

double parse_value(const std::string& token) {
    const std::string s = lower_strip(token);
    double plain = 0.0;
    if (parse_plain(s, plain)) return plain;

    const auto pi_pos = s.find("pi");
    double coef = 1.0, denom = 1.0;
    std::string num_part, den_part;
    if (pi_pos != std::string::npos) {
        num_part = s.substr(0, pi_pos);
        if (!num_part.empty() && num_part.back() == '*') num_part.pop_back();
        den_part = s.substr(pi_pos + 2);
    } else {
        const auto slash = s.find('/');
        if (slash == std::string::npos)
            throw ConfigError("cannot parse numeric token '" + token + "'");
        num_part = s.substr(0, slash);
        den_part = s.substr(slash); // keep the '/'
    }
    if (!num_part.empty() && !parse_plain(num_part, coef))
        throw ConfigError("cannot parse numeric token '" + token + "'");
    if (!den_part.empty()) {
        if (den_part.front() != '/' || !parse_plain(den_part.substr(1), denom) || denom == 0.0)
            throw ConfigError("cannot parse numeric token '" + token + "'");
    }
    const double base = (pi_pos != std::string::npos) ? std::numbers::pi : 1.0;
    return coef * base / denom;
}

namespace {

double token_value(const json& j, const std::string& key) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_value(j.get<std::string>());
    throw ConfigError("config key '" + key + "' must be a number or numeric string");
}

std::string token_label(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    return fmt("%.10g", j.get<double>());
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) ok = true;
        if (!ok)
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
}

} // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        is >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("malformed config " + path + ": " + e.what());
    }

    check_keys(doc,
               {"name", "problem", "train_variant", "test_variants", "stencil", "mesh",
                "dt_multiplier", "dt", "T", "hidden", "seeds", "target_mode", "output",
                "train"},
               path);

    ExperimentConfig cfg;
    cfg.name = doc.value("name", std::filesystem::path(path).stem().string());
    if (!doc.contains("problem")) throw ConfigError(path + ": missing 'problem'");
    cfg.problem = problem_id_from_string(doc["problem"].get<std::string>());
    if (!doc.contains("train_variant")) throw ConfigError(path + ": missing 'train_variant'");
    cfg.train_variant = doc["train_variant"].get<std::string>();
    if (doc.contains("test_variants"))
        cfg.test_variants = doc["test_variants"].get<std::vector<std::string>>();

    const std::string st = doc.value("stencil", "edge");
    if (st == "edge") cfg.stencil = StencilSpec::Kind::EdgeNeighbors;
    else if (st == "vertex") cfg.stencil = StencilSpec::Kind::VertexNeighbors;
    else throw ConfigError(path + ": stencil must be 'edge' or 'vertex', got '" + st + "'");

    if (!doc.contains("mesh") || !doc["mesh"].is_array() || doc["mesh"].empty())
        throw ConfigError(path + ": 'mesh' must be a non-empty array");
    for (const auto& m : doc["mesh"])
        cfg.meshes.push_back({token_label(m), token_value(m, "mesh")});

    if (doc.contains("dt") && doc.contains("dt_multiplier"))
        throw ConfigError(path + ": give either 'dt' or 'dt_multiplier', not both");
    if (doc.contains("dt")) {
        cfg.dt_absolute = token_value(doc["dt"], "dt");
        cfg.dt_label = token_label(doc["dt"]);
        if (!(cfg.dt_absolute > 0.0)) throw ConfigError(path + ": dt must be positive");
    } else {
        cfg.dt_multiplier = doc.value("dt_multiplier", 1.0);
        if (!(cfg.dt_multiplier > 0.0))
            throw ConfigError(path + ": dt_multiplier must be positive");
    }

    if (!doc.contains("T")) throw ConfigError(path + ": missing final time 'T'");
    cfg.final_time = token_value(doc["T"], "T");
    cfg.final_time_label = token_label(doc["T"]);
    if (cfg.final_time < 0.0) throw ConfigError(path + ": T must be nonnegative");

    if (!doc.contains("hidden") || !doc["hidden"].is_array() || doc["hidden"].empty())
        throw ConfigError(path + ": 'hidden' must be a non-empty array of layer widths");
    cfg.hidden = doc["hidden"].get<std::vector<int>>();

    if (!doc.contains("seeds") || !doc["seeds"].is_array() || doc["seeds"].empty())
        throw ConfigError(path + ": 'seeds' must be a non-empty array");
    cfg.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();

    const std::string tm = doc.value("target_mode", "fd");
    if (tm == "fd") cfg.target_mode = TargetMode::FDReference;
    else if (tm == "exact") cfg.target_mode = TargetMode::ExactAverages;
    else throw ConfigError(path + ": target_mode must be 'fd' or 'exact'");

    cfg.output_dir = doc.value("output", "out/" + cfg.name);

    if (doc.contains("train")) {
        const json& t = doc["train"];
        check_keys(t,
                   {"max_iters", "tolerance", "optimizer", "learning_rate", "beta1", "beta2",
                    "epsilon_guard", "log_every", "split", "train_biases"},
                   path + ":train");
        cfg.train.max_iters = t.value("max_iters", cfg.train.max_iters);
        cfg.train.tolerance = t.value("tolerance", cfg.train.tolerance);
        if (t.contains("optimizer")) {
            const std::string opt = t["optimizer"].get<std::string>();
            if (opt == "adam") cfg.train.optimizer = TrainConfig::Optimizer::Adam;
            else if (opt == "sgd") cfg.train.optimizer = TrainConfig::Optimizer::Sgd;
            else throw ConfigError(path + ": optimizer must be 'adam' or 'sgd'");
        }
        cfg.train.learning_rate = t.value("learning_rate", cfg.train.learning_rate);
        cfg.train.beta1 = t.value("beta1", cfg.train.beta1);
        cfg.train.beta2 = t.value("beta2", cfg.train.beta2);
        cfg.train.epsilon_guard = t.value("epsilon_guard", cfg.train.epsilon_guard);
        cfg.train.log_every = t.value("log_every", cfg.train.log_every);
        cfg.train.train_biases = t.value("train_biases", cfg.train.train_biases);
        if (t.contains("split")) {
            if (t["split"].is_string() && t["split"].get<std::string>() == "full")
                cfg.train.split_fraction = 1.0;
            else if (t["split"].is_number())
                cfg.train.split_fraction = t["split"].get<double>();
            else
                throw ConfigError(path + ": split must be 'full' or a fraction in (0,1)");
            if (cfg.train.split_fraction != 1.0 &&
                !(cfg.train.split_fraction > 0.0 && cfg.train.split_fraction < 1.0))
                throw ConfigError(path + ": split fraction must lie in (0,1)");
        }
    }
    return cfg;
}

std::uint64_t config_hash(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "problem=" << to_string(c.problem) << ";train=" << c.train_variant << ";tests=";
    for (const auto& v : c.test_variants) os << v << ",";
    os << ";stencil=" << (c.stencil == StencilSpec::Kind::EdgeNeighbors ? "edge" : "vertex");
    os << ";mesh=";
    for (const auto& m : c.meshes) os << fmt("%.17g", m.dx) << ",";
    os << ";dtmul=" << fmt("%.17g", c.dt_multiplier) << ";dtabs=" << fmt("%.17g", c.dt_absolute);
    os << ";T=" << fmt("%.17g", c.final_time) << ";hidden=";
    for (int h : c.hidden) os << h << ",";
    os << ";seeds=";
    for (auto s : c.seeds) os << s << ",";
    os << ";target=" << (c.target_mode == TargetMode::FDReference ? "fd" : "exact");
    os << ";K=" << c.train.max_iters << ";tol=" << fmt("%.17g", c.train.tolerance);
    os << ";opt=" << (c.train.optimizer == TrainConfig::Optimizer::Adam ? "adam" : "sgd");
    os << ";lr=" << fmt("%.17g", c.train.learning_rate);
    os << ";b1=" << fmt("%.17g", c.train.beta1) << ";b2=" << fmt("%.17g", c.train.beta2);
    os << ";eps=" << fmt("%.17g", c.train.epsilon_guard);
    os << ";log=" << c.train.log_every;
    os << ";split=" << fmt("%.17g", c.train.split_fraction);
    os << ";biases=" << (c.train.train_biases ? 1 : 0);
    return fnv1a(os.str());
}

namespace {

struct EvalStream {
    enum class Kind { AtFinalTime, HoldoutT1, HoldoutAtFinalTime };
    std::string name;
    Kind kind;
    ProblemSpec spec;
    Field init;      // marching start (unused for HoldoutT1)
    Field reference; // reference at T (unused for HoldoutT1)
    MarchPlan plan;
};

ErrorReport subset_errors(const Field& approx, const Field& reference,
                          const std::vector<std::size_t>& cells) {
    ErrorReport rep;
    double sq = 0.0, mx = 0.0;
    for (std::size_t id : cells) {
        const double d = approx.values[id] - reference.values[id];
        sq += d * d;
        mx = std::max(mx, std::abs(d));
    }
    rep.l2 = std::sqrt(sq * approx.grid.cell_measure);
    rep.linf = mx;
    rep.T = approx.time;
    rep.mesh_dx = approx.grid.min_dx();
    return rep;
}

} // namespace

RunRecord run_experiment(const ExperimentConfig& cfg) {
    RunRecord rec;
    rec.config = cfg;
    rec.hash = config_hash(cfg);

    const ProblemSpec train_spec = catalog(cfg.problem, cfg.train_variant);
    const StencilSpec stencil{cfg.stencil, train_spec.dim};
    std::vector<int> sizes;
    sizes.push_back(stencil.input_width());
    for (int h : cfg.hidden) sizes.push_back(h);
    sizes.push_back(1);
    validate_sizes(sizes);

    const bool split_mode = cfg.train.split_fraction < 1.0;

    // Stream names are fixed up front; per-mesh data fills in below.
    for (const auto& v : cfg.test_variants) rec.streams.push_back(v);
    if (split_mode) {
        rec.streams.push_back(cfg.train_variant + ":t1");
        rec.streams.push_back(cfg.train_variant + ":T");
    }
    if (rec.streams.empty())
        throw ConfigError("experiment '" + cfg.name +
                          "' evaluates nothing: give test_variants or a split");

    // Validate the whole mesh/dt/T sweep before any training runs.
    for (const auto& mesh : cfg.meshes) {
        const double dt = cfg.dt_absolute > 0.0 ? cfg.dt_absolute : cfg.dt_multiplier * mesh.dx;
        (void)grid_for(train_spec, mesh.dx);
        (void)make_plan(cfg.final_time, dt, train_spec.bc, stencil);
        for (const auto& v : cfg.test_variants) (void)catalog(cfg.problem, v);
    }

    for (const auto& mesh : cfg.meshes) {
        MeshOutcome mo;
        mo.mesh = mesh;
        const double dt = cfg.dt_absolute > 0.0 ? cfg.dt_absolute : cfg.dt_multiplier * mesh.dx;
        mo.dt = dt;

        const GridSpec grid = grid_for(train_spec, mesh.dx);
        const auto [f0, f1] = generate_target(train_spec, grid, dt, cfg.target_mode);
        const LearningSet full = assemble_pairs(f0, f1, train_spec.bc, stencil);

        std::vector<EvalStream> streams;
        for (const auto& v : cfg.test_variants) {
            EvalStream s;
            s.kind = EvalStream::Kind::AtFinalTime;
            s.name = v;
            s.spec = catalog(cfg.problem, v);
            s.init = initial_averages(s.spec, grid);
            s.reference = s.spec.has_exact() ? exact_averages(s.spec, grid, cfg.final_time)
                                             : fd_reference(s.spec, grid, cfg.final_time);
            s.plan = make_plan(cfg.final_time, dt, s.spec.bc, stencil);
            streams.push_back(std::move(s));
        }
        if (split_mode) {
            EvalStream t1;
            t1.kind = EvalStream::Kind::HoldoutT1;
            t1.name = cfg.train_variant + ":t1";
            t1.spec = train_spec;
            t1.plan = make_plan(cfg.final_time, dt, train_spec.bc, stencil);
            streams.push_back(std::move(t1));

            EvalStream tT;
            tT.kind = EvalStream::Kind::HoldoutAtFinalTime;
            tT.name = cfg.train_variant + ":T";
            tT.spec = train_spec;
            tT.init = f0;
            tT.reference = train_spec.has_exact()
                               ? exact_averages(train_spec, grid, cfg.final_time)
                               : fd_reference(train_spec, grid, cfg.final_time);
            tT.plan = make_plan(cfg.final_time, dt, train_spec.bc, stencil);
            streams.push_back(std::move(tT));
        }

        mo.seeds.resize(cfg.seeds.size());
        auto run_seed = [&](std::size_t si) {
            SeedOutcome& out = mo.seeds[si];
            out.seed = cfg.seeds[si];
            const auto tick = std::chrono::steady_clock::now();
            try {
                LearningSet train_set;
                LearningSet holdout;
                if (split_mode) {
                    auto parts = split_set(full, cfg.train.split_fraction, out.seed);
                    train_set = std::move(parts.first);
                    holdout = std::move(parts.second);
                } else {
                    train_set = full;
                }
                TrainConfig tc = cfg.train;
                tc.seed = out.seed;
                const MlpParams p0 = init_params(sizes, out.seed);
                TrainResult tr = train(train_set, tc, p0);
                out.params = std::move(tr.params);
                out.history = std::move(tr.history);
                out.final_loss = tr.best_loss;
                out.iterations = tr.iterations;
                out.restarts = tr.restarts;

                for (const auto& s : streams) {
                    ErrorReport rep;
                    switch (s.kind) {
                        case EvalStream::Kind::AtFinalTime: {
                            MarchResult mr = march(out.params, s.init, s.plan);
                            rep = error_norms(mr.field, s.reference);
                            break;
                        }
                        case EvalStream::Kind::HoldoutT1: {
                            const Eigen::VectorXd preds = predict_batch(
                                out.params, holdout.inputs, holdout.center_inputs);
                            double sq = 0.0, mx = 0.0;
                            for (Eigen::Index m = 0; m < holdout.size(); ++m) {
                                const double d = preds[m] - holdout.targets[m];
                                sq += d * d;
                                mx = std::max(mx, std::abs(d));
                            }
                            rep.l2 = std::sqrt(sq * holdout.cell_measure);
                            rep.linf = mx;
                            rep.T = dt;
                            rep.mesh_dx = grid.min_dx();
                            break;
                        }
                        case EvalStream::Kind::HoldoutAtFinalTime: {
                            MarchResult mr = march(out.params, s.init, s.plan);
                            rep = subset_errors(mr.field, s.reference, holdout.cell_ids);
                            break;
                        }
                    }
                    rep.dt = dt;
                    out.stream_errors.push_back(rep);
                }
            } catch (const DivergenceError& e) {
                out.failed = true;
                out.failure = e.what();
            } catch (const BlowUpError& e) {
                out.failed = true;
                out.failure = e.what();
            }
            out.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - tick).count();
        };

        {
            std::vector<std::future<void>> futs;
            futs.reserve(cfg.seeds.size());
            for (std::size_t si = 0; si < cfg.seeds.size(); ++si)
                futs.push_back(std::async(std::launch::async, run_seed, si));
            for (auto& f : futs) f.get();
        }

        mo.best_seed.assign(rec.streams.size(), -1);
        for (std::size_t st = 0; st < rec.streams.size(); ++st) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t si = 0; si < mo.seeds.size(); ++si) {
                const auto& so = mo.seeds[si];
                if (so.failed || st >= so.stream_errors.size()) continue;
                if (so.stream_errors[st].l2 < best) {
                    best = so.stream_errors[st].l2;
                    mo.best_seed[st] = static_cast<int>(si);
                }
            }
        }
        rec.meshes.push_back(std::move(mo));
    }

    // Orders from best-seed errors across consecutive meshes.
    const auto nan = std::numeric_limits<double>::quiet_NaN();
    rec.orders_l2.assign(rec.streams.size(), std::vector<double>(rec.meshes.size(), nan));
    rec.orders_linf.assign(rec.streams.size(), std::vector<double>(rec.meshes.size(), nan));
    for (std::size_t st = 0; st < rec.streams.size(); ++st) {
        for (std::size_t mi = 1; mi < rec.meshes.size(); ++mi) {
            const auto& prev = rec.meshes[mi - 1];
            const auto& cur = rec.meshes[mi];
            if (prev.best_seed[st] < 0 || cur.best_seed[st] < 0) continue;
            const double h0 = prev.mesh.dx, h1 = cur.mesh.dx;
            if (!(h0 > h1) || h1 <= 0.0) continue;
            const auto& e0 = prev.seeds[static_cast<std::size_t>(prev.best_seed[st])]
                                 .stream_errors[st];
            const auto& e1 = cur.seeds[static_cast<std::size_t>(cur.best_seed[st])]
                                 .stream_errors[st];
            if (e0.l2 > 0.0 && e1.l2 > 0.0)
                rec.orders_l2[st][mi] = std::log(e0.l2 / e1.l2) / std::log(h0 / h1);
            if (e0.linf > 0.0 && e1.linf > 0.0)
                rec.orders_linf[st][mi] = std::log(e0.linf / e1.linf) / std::log(h0 / h1);
        }
    }
    return rec;
}

std::string results_csv(const RunRecord& rec) {
    std::ostringstream os;
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(rec.hash));
    os << "# config=" << rec.config.name << " hash=" << hash << "\n";
    os << "problem,variant,stencil,dx,dt,T,seed,l2,linf,order_l2,order_linf,"
          "train_loss_final,wall_seconds\n";
    const std::string stencil =
        rec.config.stencil == StencilSpec::Kind::EdgeNeighbors ? "edge" : "vertex";
    for (std::size_t mi = 0; mi < rec.meshes.size(); ++mi) {
        const auto& mo = rec.meshes[mi];
        for (std::size_t st = 0; st < rec.streams.size(); ++st) {
            for (std::size_t si = 0; si < mo.seeds.size(); ++si) {
                const auto& so = mo.seeds[si];
                os << to_string(rec.config.problem) << "," << rec.streams[st] << ","
                   << stencil << "," << fmt("%.10g", mo.mesh.dx) << ","
                   << fmt("%.10g", mo.dt) << "," << fmt("%.10g", rec.config.final_time)
                   << "," << so.seed << ",";
                if (so.failed || st >= so.stream_errors.size()) {
                    os << ",,,,";
                } else {
                    const auto& rep = so.stream_errors[st];
                    os << fmt("%.4e", rep.l2) << "," << fmt("%.4e", rep.linf) << ",";
                    const bool best = mo.best_seed[st] == static_cast<int>(si);
                    if (best && !std::isnan(rec.orders_l2[st][mi]))
                        os << fmt("%.2f", rec.orders_l2[st][mi]);
                    os << ",";
                    if (best && !std::isnan(rec.orders_linf[st][mi]))
                        os << fmt("%.2f", rec.orders_linf[st][mi]);
                    os << ",";
                }
                if (so.failed) os << ",";
                else os << fmt("%.4e", so.final_loss) << ",";
                os << fmt("%.3f", so.wall_seconds) << "\n";
            }
        }
    }
    return os.str();
}

std::string formatted_table(const RunRecord& rec) {
    std::ostringstream os;
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(rec.hash));
    os << "# " << rec.config.name << "  (hash " << hash << ")\n";
    os << "# problem=" << to_string(rec.config.problem) << " train=" << rec.config.train_variant
       << " stencil="
       << (rec.config.stencil == StencilSpec::Kind::EdgeNeighbors ? "edge" : "vertex")
       << " T=" << rec.config.final_time_label << " seeds=";
    for (std::size_t i = 0; i < rec.config.seeds.size(); ++i)
        os << rec.config.seeds[i] << (i + 1 < rec.config.seeds.size() ? "," : "");
    os << "\n# best seed per row; every seed is in results.csv\n";

    auto cell = [&](const std::string& s, int w) {
        os << s;
        for (int i = static_cast<int>(s.size()); i < w; ++i) os << ' ';
    };

    for (std::size_t st = 0; st < rec.streams.size(); ++st) {
        os << "\n[" << rec.streams[st] << "]\n";
        cell("dx", 12);
        cell("dt", 12);
        cell("L2", 13);
        cell("order", 8);
        cell("Linf", 13);
        cell("order", 8);
        cell("loss", 13);
        cell("seed", 6);
        os << "\n";
        for (std::size_t mi = 0; mi < rec.meshes.size(); ++mi) {
            const auto& mo = rec.meshes[mi];
            cell(mo.mesh.label, 12);
            cell(fmt("%.6g", mo.dt), 12);
            if (mo.best_seed[st] < 0) {
                os << "failed\n";
                continue;
            }
            const auto& so = mo.seeds[static_cast<std::size_t>(mo.best_seed[st])];
            const auto& rep = so.stream_errors[st];
            cell(fmt("%.4e", rep.l2), 13);
            cell(std::isnan(rec.orders_l2[st][mi]) ? "--" : fmt("%.2f", rec.orders_l2[st][mi]), 8);
            cell(fmt("%.4e", rep.linf), 13);
            cell(std::isnan(rec.orders_linf[st][mi]) ? "--"
                                                     : fmt("%.2f", rec.orders_linf[st][mi]),
                 8);
            cell(fmt("%.4e", so.final_loss), 13);
            cell(std::to_string(so.seed), 6);
            os << "\n";
        }
    }
    return os.str();
}

void write_outputs(const RunRecord& rec, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    {
        std::ofstream os(out_dir + "/results.csv");
        if (!os) throw ConfigError("cannot write " + out_dir + "/results.csv");
        os << results_csv(rec);
    }
    {
        std::ofstream os(out_dir + "/table.txt");
        os << formatted_table(rec);
    }

    for (const auto& mo : rec.meshes) {
        const std::string mlabel = sanitize(mo.mesh.label);
        for (const auto& so : mo.seeds) {
            if (so.failed) {
                std::ofstream os(out_dir + "/failed_" + mlabel + "_seed" +
                                 std::to_string(so.seed) + ".txt");
                os << so.failure << "\n";
                continue;
            }
            {
                std::ofstream os(out_dir + "/loss_" + mlabel + "_seed" +
                                 std::to_string(so.seed) + ".csv");
                os << "iteration,loss\n";
                for (std::size_t i = 0; i < so.history.iterations.size(); ++i)
                    os << so.history.iterations[i] << "," << fmt("%.17g", so.history.losses[i])
                       << "\n";
            }
            const ProblemSpec spec = catalog(rec.config.problem, rec.config.train_variant);
            const GridSpec grid = grid_for(spec, mo.mesh.dx);
            CheckpointMeta meta;
            meta.problem = to_string(rec.config.problem);
            meta.variant = rec.config.train_variant;
            meta.stencil =
                rec.config.stencil == StencilSpec::Kind::EdgeNeighbors ? "edge" : "vertex";
            meta.lo = grid.lo;
            meta.hi = grid.hi;
            meta.counts = grid.counts;
            meta.dt = mo.dt;
            meta.final_time = rec.config.final_time;
            meta.target_mode =
                rec.config.target_mode == TargetMode::FDReference ? "fd" : "exact";
            meta.seed = so.seed;
            meta.final_loss = so.final_loss;
            meta.iterations = so.iterations;
            save_checkpoint(out_dir + "/checkpoint_" + mlabel + "_seed" +
                                std::to_string(so.seed) + ".json",
                            so.params, meta);
        }
    }
}

RunRecord run_and_write(const ExperimentConfig& cfg, const std::string& out_override) {
    RunRecord rec = run_experiment(cfg);
    write_outputs(rec, out_override.empty() ? cfg.output_dir : out_override);
    return rec;
}

} // namespace cann
