// Config-driven experiment runner: executes verification suites against a
// configured model, dumps exact enumeration tables, and runs the built-in
// preconfigured suites.
//
// Exit codes: 0 all checks pass, 2 some inconclusive, 1 any failure,
//             64 config/usage error, 65 enumeration overflow, 70 runtime
//             assertion.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "clusterflip/config.hpp"
#include "clusterflip/report.hpp"
#include "clusterflip/suites.hpp"
#include "clusterflip/verify.hpp"

namespace {

using namespace clusterflip;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 64;
constexpr int kExitOverflow = 65;
constexpr int kExitRuntime = 70;

int verdict_exit_code(const std::vector<TestVerdict>& verdicts) {
    if (any_failed(verdicts)) return kExitFail;
    if (any_inconclusive(verdicts)) return kExitInconclusive;
    return kExitPass;
}

std::vector<std::pair<Vertex, Vertex>> edge_pairs(const Json& arr, const std::string& context) {
    std::vector<std::pair<Vertex, Vertex>> out;
    if (!arr.is_array()) throw config_error(context + ": expected an array of [u, v] pairs");
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2)
            throw config_error(context + ": expected [u, v] pairs");
        out.push_back({e[0].get<Vertex>(), e[1].get<Vertex>()});
    }
    return out;
}

std::vector<std::pair<double, double>> interval_pairs(const Json& arr,
                                                      const std::string& context) {
    std::vector<std::pair<double, double>> out;
    if (!arr.is_array()) throw config_error(context + ": expected an array of [a, b] pairs");
    for (const auto& e : arr) {
        if (!e.is_array() || e.size() != 2)
            throw config_error(context + ": expected [a, b] pairs");
        out.push_back({e[0].get<double>(), e[1].get<double>()});
    }
    return out;
}

std::vector<TestVerdict> run_one_check(const ExperimentConfig& cfg, const CheckConfig& check,
                                       std::size_t threads) {
    const VerifyOptions opts{cfg.replicas, threads};
    const Json& p = check.params;

    if (check.kind == "extremal_gradients") {
        const auto* m = std::get_if<SurfaceModel>(&cfg.model.model);
        if (!m) throw config_error("extremal_gradients: needs a surface model");
        ExtremalSpec spec;
        spec.oriented_edges = edge_pairs(p.at("edges"), "extremal_gradients.edges");
        spec.epsilon = detail::get_required<double>(p, "extremal_gradients", "epsilon");
        spec.epsilon_grid =
            detail::get_or<std::vector<double>>(p, "extremal_gradients", "epsilon_grid", {});
        spec.tree_exact_hammock =
            detail::get_or<bool>(p, "extremal_gradients", "tree_exact", false);
        return check_extremal_gradients(*m, spec, cfg.settings, opts);
    }
    if (check.kind == "reflection_principle") {
        const auto* m = std::get_if<SurfaceModel>(&cfg.model.model);
        if (!m) throw config_error("reflection_principle: needs a surface model");
        BarrierSpec spec;
        spec.vertex = detail::get_required<Vertex>(p, "reflection_principle", "vertex");
        spec.m = detail::get_required<double>(p, "reflection_principle", "m");
        spec.oracle_targets =
            detail::get_or<std::vector<double>>(p, "reflection_principle", "oracle_targets", {});
        if (p.contains("d_intervals"))
            spec.d_intervals = interval_pairs(p.at("d_intervals"),
                                              "reflection_principle.d_intervals");
        return check_reflection_principle(*m, spec, cfg.settings, opts);
    }
    if (check.kind == "density_monotonicity") {
        const auto* m = std::get_if<SpinModel>(&cfg.model.model);
        if (!m) throw config_error("density_monotonicity: needs a spin model");
        DensitySpec spec;
        spec.vertex = detail::get_required<Vertex>(p, "density_monotonicity", "vertex");
        spec.n_bins = detail::get_or<int>(p, "density_monotonicity", "bins", 20);
        spec.null_replicates =
            detail::get_or<std::size_t>(p, "density_monotonicity", "null_replicates", 40);
        return check_density_monotonicity(*m, spec, cfg.settings, opts);
    }
    if (check.kind == "surface_density_monotonicity") {
        const auto* m = std::get_if<SurfaceModel>(&cfg.model.model);
        if (!m) throw config_error("surface_density_monotonicity: needs a surface model");
        SurfaceDensitySpec spec;
        spec.vertex = detail::get_required<Vertex>(p, "surface_density_monotonicity", "vertex");
        spec.n_bins = detail::get_or<int>(p, "surface_density_monotonicity", "bins", 20);
        spec.range = detail::get_or<double>(p, "surface_density_monotonicity", "range", 0.0);
        return check_surface_density_monotonicity(*m, spec, cfg.settings, opts);
    }
    if (check.kind == "lemma1_continuous") {
        const auto vertices =
            detail::get_required<std::vector<Vertex>>(p, "lemma1_continuous", "vertices");
        const double alpha = detail::get_or<double>(p, "lemma1_continuous", "alpha", 1e-3);
        if (const auto* m = std::get_if<SurfaceModel>(&cfg.model.model)) {
            auto mean_height = [](const SurfaceConfig& phi) {
                double x = 0.0;
                for (double h : phi) x += h;
                return x / static_cast<double>(phi.size());
            };
            return check_lemma1_continuous(*m, vertices, mean_height, alpha, cfg.settings, opts);
        }
        if (const auto* m = std::get_if<SpinModel>(&cfg.model.model)) {
            auto magnetization = [](const SpinConfig& phi) {
                double x = 0.0;
                for (const auto& s : phi) x += s.c[0];
                return x / static_cast<double>(phi.size());
            };
            return check_lemma1_continuous(*m, vertices, magnetization, alpha, cfg.settings,
                                           opts);
        }
        throw config_error("lemma1_continuous: needs a surface or spin model");
    }
    if (check.kind == "mixture") {
        const auto* m = std::get_if<SurfaceModel>(&cfg.model.model);
        if (!m) throw config_error("mixture: needs a surface model");
        MixtureSpec spec;
        spec.probe_vertices = detail::get_required<std::vector<Vertex>>(p, "mixture", "vertices");
        spec.oracle_vertex = detail::get_or<Vertex>(p, "mixture", "oracle_vertex",
                                                    spec.probe_vertices.front());
        spec.oracle_points =
            detail::get_or<std::vector<double>>(p, "mixture", "oracle_points", {});
        spec.resample_sweeps = detail::get_or<std::size_t>(p, "mixture", "resample_sweeps", 10);
        return check_mixture_decomposition(*m, spec, cfg.settings, opts);
    }
    if (check.kind == "markov_reflection") {
        if (cfg.model.family != "markov_chain" || !cfg.chain_raw)
            throw config_error("markov_reflection: needs a markov_chain model");
        const Json& c = *cfg.chain_raw;
        const auto tau = discrete_involution(
            detail::get_required<std::vector<int>>(p, "markov_reflection", "involution"));
        return check_markov_reflection(
            c.at("P").get<std::vector<std::vector<double>>>(),
            c.at("pi").get<std::vector<double>>(), c.at("mu").get<std::vector<double>>(),
            c.at("steps").get<std::uint32_t>(), tau);
    }
    if (check.kind == "cluster_sides") {
        const std::size_t pairs = detail::get_or<std::size_t>(p, "cluster_sides", "pairs", 100000);
        if (const auto* m = std::get_if<SurfaceModel>(&cfg.model.model))
            return {check_cluster_sides(*m, pairs, cfg.settings, opts)};
        if (const auto* m = std::get_if<SpinModel>(&cfg.model.model))
            return {check_cluster_sides(*m, pairs, cfg.settings, opts)};
        throw config_error("cluster_sides: needs a surface or spin model");
    }
    if (check.kind == "flip_invariance") {
        const auto* m = std::get_if<DiscreteModel>(&cfg.model.model);
        if (!m) throw config_error("flip_invariance: needs a discrete model");
        const auto tables =
            detail::get_required<std::vector<std::vector<int>>>(p, "flip_invariance",
                                                                "involutions");
        std::vector<TestVerdict> verdicts;
        double flip_diff = 0.0, sw_diff = 0.0;
        for (const auto& table : tables) {
            const DiscreteReflection tau = discrete_involution(table);
            const JointLaw joint = enumerate_joint_es(*m, tau);
            for (Vertex x = 0; x < m->g.vertex_count(); ++x) {
                flip_diff = std::max(flip_diff, joint_pushforward_max_diff(
                                                    joint, flip_component_kernel(m->g, tau, x)));
            }
            sw_diff = std::max(
                sw_diff, marginal_pushforward_max_diff(joint, swendsen_wang_kernel(m->g, tau)));
        }
        verdicts.push_back(exact_verdict("flip-invariance", "flip-preserves-joint-law", flip_diff,
                                         1e-12, cfg.settings.seed));
        verdicts.push_back(exact_verdict("sw-marginal-invariance", "coin-flip-preserves-marginal",
                                         sw_diff, 1e-12, cfg.settings.seed));
        return verdicts;
    }
    throw config_error("suite.checks[]: unknown check kind '" + check.kind + "'");
}

void write_samples(const ExperimentConfig& cfg, const std::string& dir, std::size_t threads) {
    std::vector<Vertex> record = cfg.record_vertices;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::visit(
        [&](const auto& model) {
            if (record.empty()) {
                for (Vertex v = 0; v < model.graph().vertex_count(); ++v) {
                    if (!model.graph().in_boundary(v)) {
                        record.push_back(v);
                        break;
                    }
                }
            }
            for (Vertex v : record) columns.push_back("v" + std::to_string(v));
            const auto batches = run_replicas(model, cfg.settings, cfg.replicas, threads);
            for (const auto& batch : batches) {
                for (std::size_t n = 0; n < batch.configs.size(); ++n) {
                    std::vector<double> row{static_cast<double>(n),
                                            static_cast<double>(batch.replica)};
                    for (Vertex v : record) {
                        using State = std::decay_t<decltype(batch.configs[n][v])>;
                        if constexpr (std::is_same_v<State, SpinVec>) {
                            row.push_back(batch.configs[n][v].c[0]);
                        } else {
                            row.push_back(static_cast<double>(batch.configs[n][v]));
                        }
                    }
                    rows.push_back(std::move(row));
                }
            }
        },
        cfg.model.model);
    write_samples_csv(dir + "/samples.csv", columns, rows);
}

int finish(const std::vector<TestVerdict>& verdicts, const std::string& out_dir,
           std::uint64_t seed) {
    std::filesystem::create_directories(out_dir);
    write_verdicts_json(out_dir + "/verdicts.json", verdicts, seed);
    write_summary_file(out_dir + "/summary.txt", verdicts);
    write_summary(std::cout, verdicts);
    return verdict_exit_code(verdicts);
}

int cmd_run(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
            std::size_t threads, const std::string& out_override) {
    ExperimentConfig cfg = load_config(config_path);
    if (has_seed) cfg.settings.seed = seed_override;
    const std::string out_dir = out_override.empty() ? cfg.out_dir : out_override;
    std::vector<TestVerdict> verdicts;
    for (const auto& check : cfg.checks) {
        auto vs = run_one_check(cfg, check, threads);
        verdicts.insert(verdicts.end(), vs.begin(), vs.end());
    }
    std::filesystem::create_directories(out_dir);
    if (cfg.write_samples) write_samples(cfg, out_dir, threads);
    return finish(verdicts, out_dir, cfg.settings.seed);
}

int cmd_enumerate(const std::string& config_path, const std::string& out_override) {
    ExperimentConfig cfg = load_config(config_path);
    const auto* m = std::get_if<DiscreteModel>(&cfg.model.model);
    if (!m) throw config_error("enumerate: needs a discrete (potts or markov_chain) model");
    const std::string out_dir = out_override.empty() ? cfg.out_dir : out_override;
    std::filesystem::create_directories(out_dir);
    const ExactLaw law = enumerate_exact(*m);
    write_law_csv(out_dir + "/law.csv", law);
    std::cout << "wrote " << out_dir << "/law.csv (" << law.size() << " configurations)\n";
    if (cfg.involution) {
        const DiscreteReflection tau = discrete_involution(*cfg.involution);
        const JointLaw joint = enumerate_joint_es(*m, tau);
        write_joint_csv(out_dir + "/joint_law.csv", joint);
        std::cout << "wrote " << out_dir << "/joint_law.csv (" << joint.prob.size() << " rows)\n";
    }
    return kExitPass;
}

int cmd_verify_builtin(const std::string& suite, std::uint64_t seed, std::size_t threads,
                       const std::string& out_dir) {
    const auto verdicts = suites::run_builtin(suite, seed, threads);
    return finish(verdicts, out_dir.empty() ? "out" : out_dir, seed);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"reflection/cluster simulation engine and verification harness"};
    app.require_subcommand(1);

    std::string config_path, out_dir, suite_name;
    std::uint64_t seed = 1;
    std::size_t threads = 0;

    auto* run = app.add_subcommand("run", "run the checks configured in a config file");
    run->add_option("--config", config_path, "config file path")->required();
    auto* run_seed = run->add_option("--seed", seed, "override the sampler seed");
    run->add_option("--threads", threads, "replica-level thread cap (default: cores)");
    run->add_option("--out", out_dir, "output directory (overrides config)");

    auto* enumerate = app.add_subcommand("enumerate", "dump the exact law of a discrete model");
    enumerate->add_option("--config", config_path, "config file path")->required();
    enumerate->add_option("--out", out_dir, "output directory (overrides config)");

    auto* builtin = app.add_subcommand("verify-builtin", "run a named preconfigured suite");
    builtin->add_option("--suite", suite_name, "suite name")->required();
    builtin->add_option("--seed", seed, "master seed");
    builtin->add_option("--threads", threads, "replica-level thread cap");
    builtin->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (run->parsed()) {
            return cmd_run(config_path, seed, run_seed->count() > 0, threads, out_dir);
        }
        if (enumerate->parsed()) {
            return cmd_enumerate(config_path, out_dir);
        }
        if (builtin->parsed()) {
            return cmd_verify_builtin(suite_name, seed, threads, out_dir);
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const oracle_overflow_error& e) {
        std::cerr << "enumeration overflow: " << e.what() << "\n";
        return kExitOverflow;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "runtime assertion: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}
