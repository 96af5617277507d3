#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "clusterflip/verify.hpp"

namespace clusterflip {

// Rebuild a free-boundary discrete model with one vertex pinned to a state:
// the graph gains the boundary marker and the site weight becomes one-hot.
inline DiscreteModel pin_vertex(const DiscreteModel& m, Vertex v0, int state) {
    Graph g(m.g.vertex_count(), m.g.edges(), {v0});
    auto weights = m.site_weight;
    weights[v0].assign(m.n_states, 0.0);
    weights[v0][state] = 1.0;
    return make_discrete_model(std::move(g), m.n_states, std::move(weights), m.kernel);
}

inline std::vector<DiscreteReflection> all_involutions(int n_states) {
    std::vector<DiscreteReflection> out{identity_involution(n_states)};
    for (int a = 0; a < n_states; ++a) {
        for (int b = a + 1; b < n_states; ++b) out.push_back(swap_involution(n_states, a, b));
    }
    return out;
}

namespace suites {

// --- exact joint-law invariance (discrete, all flip variants) ----------------

inline std::vector<TestVerdict> lemma1_exact(std::uint64_t seed, std::size_t) {
    std::vector<TestVerdict> verdicts;
    struct Case {
        std::string label;
        int q;
        double beta;
    };
    const std::vector<Case> cases{{"ising-ferro", 2, std::log(2.0)},
                                  {"ising-antiferro", 2, -std::log(2.0)},
                                  {"potts3", 3, 1.0}};
    struct GraphCase {
        std::string label;
        Graph g;
    };
    const std::vector<GraphCase> graphs{{"K3", complete_graph(3)}, {"P4", path_graph(4, {})}};

    for (const auto& c : cases) {
        for (const auto& gc : graphs) {
            const DiscreteModel free_model = potts_model(gc.g, c.q, c.beta);
            const DiscreteModel pinned = pin_vertex(free_model, 0, 0);
            const auto taus = all_involutions(c.q);

            double flip_diff = 0.0, sw_diff = 0.0, orc_diff = 0.0;
            for (const auto& tau : taus) {
                for (const DiscreteModel* m : {&free_model, &pinned}) {
                    const JointLaw joint = enumerate_joint_es(*m, tau);
                    for (Vertex x = 0; x < m->g.vertex_count(); ++x) {
                        flip_diff = std::max(
                            flip_diff,
                            joint_pushforward_max_diff(joint, flip_component_kernel(m->g, tau, x)));
                    }
                    sw_diff = std::max(sw_diff, marginal_pushforward_max_diff(
                                                    joint, swendsen_wang_kernel(m->g, tau)));
                }
                const JointLaw joint = enumerate_joint_es(pinned, tau);
                const std::uint32_t nv = pinned.g.vertex_count();
                for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nv); ++mask) {
                    std::vector<Vertex> w_set;
                    for (Vertex v = 0; v < nv; ++v) {
                        if ((mask >> v) & 1u) w_set.push_back(v);
                    }
                    orc_diff = std::max(
                        orc_diff, joint_pushforward_max_diff(
                                      joint, flip_component_or_complement_kernel(pinned.g, tau,
                                                                                 w_set)));
                }
            }
            const std::string base = "lemma1-" + c.label + "-" + gc.label;
            verdicts.push_back(exact_verdict(base + "-flip", "flip-preserves-joint-law",
                                             flip_diff, 1e-12, seed));
            verdicts.push_back(exact_verdict(base + "-or-complement",
                                             "component-or-complement-preserves-joint-law",
                                             orc_diff, 1e-12, seed));
            verdicts.push_back(exact_verdict(base + "-sw-marginal",
                                             "coin-flip-preserves-marginal", sw_diff, 1e-12,
                                             seed));
        }
    }
    return verdicts;
}

// --- extremal gradients --------------------------------------------------------

inline std::vector<TestVerdict> theorem1_tree(std::uint64_t seed, std::size_t threads) {
    std::vector<TestVerdict> verdicts;
    const VerifyOptions opts{8, threads};

    const SurfaceModel path = surface_model(path_graph(6, {0}), Potential::hammock());
    struct Case {
        std::size_t k;
        double eps;
        std::vector<std::pair<Vertex, Vertex>> edges;
    };
    const std::vector<Case> cases{{1, 0.1, {{2, 3}}},
                                  {2, 0.1, {{1, 2}, {3, 4}}},
                                  {2, 0.05, {{1, 2}, {3, 4}}}};
    std::uint64_t salt = 0;
    for (const auto& c : cases) {
        ChainSettings s;
        s.seed = hash64(seed, ++salt);
        s.burn_in_sweeps = 1000;
        s.thinning = 2;
        s.n_samples = 125000;  // x8 replicas = 1e6
        ExtremalSpec spec;
        spec.oriented_edges = c.edges;
        spec.epsilon = c.eps;
        spec.tree_exact_hammock = true;
        for (auto& v : check_extremal_gradients(path, spec, s, opts)) {
            v.name = "path-" + v.name;
            verdicts.push_back(std::move(v));
        }
    }

    // Square grid: the bound is reported (vacuous) and the decay/monotone
    // property checks substitute for the quantitative constant.
    const SurfaceModel grid = surface_model(grid_graph(8, 8), Potential::hammock());
    ChainSettings s;
    s.seed = hash64(seed, 99);
    s.burn_in_sweeps = 1000;
    s.thinning = 1;
    s.n_samples = 125000;
    ExtremalSpec spec;
    spec.oriented_edges = {{9, 10}, {12, 20}, {33, 41}};  // disjoint interior edges
    spec.epsilon = 0.05;
    spec.epsilon_grid = {0.05, 0.075, 0.1};
    spec.tree_exact_hammock = false;
    for (auto& v : check_extremal_gradients(grid, spec, s, opts)) {
        v.name = "grid-" + v.name;
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

// --- barrier inequalities --------------------------------------------------------

inline std::vector<TestVerdict> theorem2_path(std::uint64_t seed, std::size_t threads) {
    const SurfaceModel m = surface_model(path_graph(3, {0}), Potential::hammock());
    ChainSettings s;
    s.seed = hash64(seed, 1);
    s.burn_in_sweeps = 1000;
    s.thinning = 2;
    s.n_samples = 125000;
    BarrierSpec spec;
    spec.vertex = 2;
    spec.m = 1.0;
    spec.oracle_targets = {0.125, 0.25, 0.125};
    spec.d_intervals = {{0.0, 0.5}};
    return check_reflection_principle(m, spec, s, {8, threads});
}

inline std::vector<TestVerdict> theorem2_grid(std::uint64_t seed, std::size_t threads) {
    const SurfaceModel m = surface_model(grid_graph(5, 5), Potential::hammock());
    ChainSettings s;
    s.seed = hash64(seed, 2);
    s.burn_in_sweeps = 1000;
    s.thinning = 1;
    s.n_samples = 125000;
    BarrierSpec spec;
    spec.vertex = 12;  // center
    spec.m = 0.5;
    return check_reflection_principle(m, spec, s, {8, threads});
}

// --- density monotonicity ----------------------------------------------------------

inline std::vector<TestVerdict> theorem3_spin(std::uint64_t seed, std::size_t threads) {
    std::vector<TestVerdict> verdicts;

    // Exact route: the n = 1 model on K3 with one pinned vertex.
    {
        const SpinModel ising =
            spin_on_model(complete_graph(3, {0}), 1, SpinPotential::linear(1.0));
        DensitySpec spec;
        spec.vertex = 1;
        ChainSettings s;
        s.seed = hash64(seed, 3);
        for (auto& v : check_density_monotonicity(ising, spec, s, {2, threads})) {
            verdicts.push_back(std::move(v));
        }
    }

    // Monte Carlo route: the n = 3 model on a 3x3 grid with a pinned corner.
    {
        const Graph free_grid = grid_graph(3, 3, GridBoundary::none);
        const Graph pinned(free_grid.vertex_count(), free_grid.edges(), {0});
        const SpinModel heis = spin_on_model(pinned, 3, SpinPotential::linear(1.0));
        DensitySpec spec;
        spec.vertex = 4;  // center
        spec.n_bins = 20;
        ChainSettings s;
        s.seed = hash64(seed, 4);
        s.burn_in_sweeps = 1000;
        s.thinning = 4;
        s.n_samples = 125000;
        s.move_mix = {{MoveKind::single_site, 1.0}, {MoveKind::wolff_cluster, 0.5}};
        for (auto& v : check_density_monotonicity(heis, spec, s, {8, threads})) {
            verdicts.push_back(std::move(v));
        }
    }
    return verdicts;
}

inline std::vector<TestVerdict> surface_density(std::uint64_t seed, std::size_t threads) {
    std::vector<TestVerdict> verdicts;
    struct Case {
        std::string label;
        SurfaceModel model;
        Vertex vertex;
        std::size_t n_samples;
        std::size_t thinning;
    };
    std::vector<Case> cases;
    cases.push_back({"edge", surface_model(path_graph(2, {0}), Potential::hammock()), 1, 50000, 2});
    cases.push_back({"path2", surface_model(path_graph(3, {0}), Potential::hammock()), 2, 50000, 2});
    cases.push_back({"grid", surface_model(grid_graph(5, 5), Potential::hammock()), 12, 125000, 1});
    std::uint64_t salt = 10;
    for (auto& c : cases) {
        ChainSettings s;
        s.seed = hash64(seed, ++salt);
        s.burn_in_sweeps = 1000;
        s.thinning = c.thinning;
        s.n_samples = c.n_samples;
        SurfaceDensitySpec spec;
        spec.vertex = c.vertex;
        spec.n_bins = 20;
        for (auto& v : check_surface_density_monotonicity(c.model, spec, s, {8, threads})) {
            v.name = c.label + "-" + v.name;
            verdicts.push_back(std::move(v));
        }
    }
    return verdicts;
}

// --- continuous-model flip invariance ------------------------------------------------

inline std::vector<TestVerdict> lemma1_continuous(std::uint64_t seed, std::size_t threads) {
    std::vector<TestVerdict> verdicts;
    const VerifyOptions opts{8, threads};
    {
        const SurfaceModel m = surface_model(grid_graph(4, 4), Potential::hammock());
        ChainSettings s;
        s.seed = hash64(seed, 21);
        s.burn_in_sweeps = 500;
        s.thinning = 2;
        s.n_samples = 12500;
        auto mean_height = [&m](const SurfaceConfig& phi) {
            double x = 0.0;
            for (double h : phi) x += h;
            return x / static_cast<double>(phi.size());
        };
        for (auto& v :
             check_lemma1_continuous(m, {5, 6, 9}, mean_height, 1e-3, s, opts)) {
            v.name = "surface-" + v.name;
            verdicts.push_back(std::move(v));
        }
    }
    {
        const SpinModel m = spin_on_model(grid_graph(4, 4, GridBoundary::none), 2,
                                          SpinPotential::linear(1.0));
        ChainSettings s;
        s.seed = hash64(seed, 22);
        s.burn_in_sweeps = 500;
        // The free-boundary global phase mode decorrelates only through
        // cluster moves; without them the paired KS test sees a frozen
        // empirical law rather than independent equilibrium draws.
        s.move_mix = {{MoveKind::single_site, 1.0}, {MoveKind::wolff_cluster, 1.0}};
        s.thinning = 8;
        s.n_samples = 12500;
        auto magnetization = [](const SpinConfig& phi) {
            double x = 0.0;
            for (const auto& v : phi) x += v.c[0];
            return x / static_cast<double>(phi.size());
        };
        for (auto& v :
             check_lemma1_continuous(m, {5, 6, 9}, magnetization, 1e-3, s, opts)) {
            v.name = "spin-" + v.name;
            verdicts.push_back(std::move(v));
        }
    }
    return verdicts;
}

// --- edge-width mixture -----------------------------------------------------------------

inline std::vector<TestVerdict> mixture(std::uint64_t seed, std::size_t threads) {
    const SurfaceModel m = surface_model(path_graph(5, {0}), Potential::quadratic_lipschitz());
    ChainSettings s;
    s.seed = hash64(seed, 31);
    s.burn_in_sweeps = 1000;
    s.thinning = 2;
    s.n_samples = 12500;
    MixtureSpec spec;
    spec.probe_vertices = {2, 4};
    spec.oracle_vertex = 4;
    spec.oracle_points = {-1.0, 0.0, 1.0};
    spec.resample_sweeps = 10;
    return check_mixture_decomposition(m, spec, s, {8, threads});
}

// --- reversible chains --------------------------------------------------------------------

inline std::vector<TestVerdict> markov_reflection(std::uint64_t seed, std::size_t) {
    std::vector<std::vector<double>> P(6, std::vector<double>(6, 0.0));
    for (int a = 0; a < 6; ++a) {
        P[a][a] = 0.5;
        P[a][(a + 1) % 6] = 0.25;
        P[a][(a + 5) % 6] = 0.25;
    }
    const std::vector<double> pi(6, 1.0 / 6.0);
    std::vector<double> mu(6, 0.0);
    mu[0] = 1.0;
    const DiscreteReflection negation = discrete_involution({0, 5, 4, 3, 2, 1});
    auto verdicts = check_markov_reflection(P, pi, mu, 4, negation);
    for (auto& v : verdicts) v.seed = seed;
    return verdicts;
}

// --- cluster one-sidedness ------------------------------------------------------------------

inline std::vector<TestVerdict> cluster_sides(std::uint64_t seed, std::size_t threads) {
    std::vector<TestVerdict> verdicts;
    const VerifyOptions opts{8, threads};
    {
        const SurfaceModel m = surface_model(grid_graph(4, 4), Potential::hammock());
        ChainSettings s;
        s.seed = hash64(seed, 41);
        s.burn_in_sweeps = 500;
        s.thinning = 1;
        TestVerdict v = check_cluster_sides(m, 100000, s, opts);
        v.name = "surface-" + v.name;
        verdicts.push_back(std::move(v));
    }
    {
        const SpinModel m = spin_on_model(grid_graph(4, 4, GridBoundary::none), 3,
                                          SpinPotential::linear(1.0));
        ChainSettings s;
        s.seed = hash64(seed, 42);
        s.burn_in_sweeps = 500;
        s.thinning = 1;
        TestVerdict v = check_cluster_sides(m, 100000, s, opts);
        v.name = "spin-" + v.name;
        verdicts.push_back(std::move(v));
    }
    // One-sidedness on the exact geometries used by the extremal-gradient
    // and barrier suites.
    struct Extra {
        std::string label;
        SurfaceModel model;
    };
    const std::vector<Extra> extras{
        {"path6", surface_model(path_graph(6, {0}), Potential::hammock())},
        {"path3", surface_model(path_graph(3, {0}), Potential::hammock())},
        {"grid5x5", surface_model(grid_graph(5, 5), Potential::hammock())},
    };
    std::uint64_t salt = 43;
    for (const auto& extra : extras) {
        ChainSettings s;
        s.seed = hash64(seed, ++salt);
        s.burn_in_sweeps = 500;
        s.thinning = 1;
        TestVerdict v = check_cluster_sides(extra.model, 20000, s, opts);
        v.name = extra.label + "-" + v.name;
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

using SuiteFn = std::function<std::vector<TestVerdict>(std::uint64_t, std::size_t)>;

inline const std::map<std::string, SuiteFn>& registry() {
    static const std::map<std::string, SuiteFn> suites{
        {"lemma1-exact", lemma1_exact},
        {"theorem1-tree", theorem1_tree},
        {"theorem2-path", theorem2_path},
        {"theorem2-grid", theorem2_grid},
        {"theorem3-spin", theorem3_spin},
        {"surface-density", surface_density},
        {"lemma1-continuous", lemma1_continuous},
        {"mixture", mixture},
        {"markov-reflection", markov_reflection},
        {"cluster-sides", cluster_sides},
    };
    return suites;
}

inline std::vector<TestVerdict> run_builtin(const std::string& name, std::uint64_t seed,
                                            std::size_t threads) {
    const auto& reg = registry();
    const auto it = reg.find(name);
    if (it == reg.end()) throw std::invalid_argument("unknown builtin suite: " + name);
    return it->second(seed, threads);
}

}  // namespace suites
}  // namespace clusterflip
