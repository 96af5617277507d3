#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "clusterflip/discrete.hpp"
#include "clusterflip/graph.hpp"
#include "clusterflip/potential.hpp"
#include "clusterflip/sampler.hpp"
#include "clusterflip/spin.hpp"
#include "clusterflip/surface.hpp"

namespace clusterflip {

using Json = nlohmann::ordered_json;

// Schema violations map to the CLI usage exit code.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_keys(const Json& obj, const std::string& context,
                         const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw config_error(context + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.count(key))
            throw config_error(context + ": unknown key '" + key + "'");
    }
}

template <class T>
T get_required(const Json& obj, const std::string& context, const std::string& key) {
    if (!obj.contains(key)) throw config_error(context + ": missing key '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw config_error(context + ": bad value for '" + key + "'");
    }
}

template <class T>
T get_or(const Json& obj, const std::string& context, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw config_error(context + ": bad value for '" + key + "'");
    }
}

}  // namespace detail

inline Graph graph_from_config(const Json& spec) {
    detail::require_keys(spec, "model.graph",
                         {"kind", "n", "width", "height", "boundary", "seed", "path"});
    const std::string kind = detail::get_required<std::string>(spec, "model.graph", "kind");
    auto boundary_list = [&](std::vector<Vertex> fallback) -> std::vector<Vertex> {
        if (!spec.contains("boundary")) return fallback;
        const auto& b = spec.at("boundary");
        if (b.is_string()) {
            const std::string s = b.get<std::string>();
            if (s == "none") return {};
            throw config_error("model.graph.boundary: unknown keyword '" + s + "'");
        }
        if (b.is_array()) return b.get<std::vector<Vertex>>();
        throw config_error("model.graph.boundary: expected an array or 'none'");
    };
    if (kind == "path") {
        return path_graph(detail::get_required<std::uint32_t>(spec, "model.graph", "n"),
                          boundary_list({0}));
    }
    if (kind == "cycle") {
        return cycle_graph(detail::get_required<std::uint32_t>(spec, "model.graph", "n"),
                           boundary_list({}));
    }
    if (kind == "complete") {
        return complete_graph(detail::get_required<std::uint32_t>(spec, "model.graph", "n"),
                              boundary_list({}));
    }
    if (kind == "random_tree") {
        return random_tree(detail::get_required<std::uint32_t>(spec, "model.graph", "n"),
                           detail::get_or<std::uint64_t>(spec, "model.graph", "seed", 1),
                           boundary_list({0}));
    }
    if (kind == "grid") {
        const auto w = detail::get_required<std::uint32_t>(spec, "model.graph", "width");
        const auto h = detail::get_required<std::uint32_t>(spec, "model.graph", "height");
        if (spec.contains("boundary") && spec.at("boundary").is_array()) {
            const Graph base = grid_graph(w, h, GridBoundary::none);
            return Graph(base.vertex_count(), base.edges(), boundary_list({}));
        }
        const std::string mode =
            detail::get_or<std::string>(spec, "model.graph", "boundary", "frame");
        if (mode == "frame") return grid_graph(w, h, GridBoundary::frame);
        if (mode == "none") return grid_graph(w, h, GridBoundary::none);
        throw config_error("model.graph.boundary: unknown keyword '" + mode + "'");
    }
    if (kind == "file") {
        return load_edge_list(detail::get_required<std::string>(spec, "model.graph", "path"));
    }
    throw config_error("model.graph.kind: unknown kind '" + kind + "'");
}

inline Potential potential_from_config(const Json& spec) {
    detail::require_keys(spec, "model.potential", {"name", "csv"});
    if (spec.contains("csv"))
        return Potential::from_csv(detail::get_required<std::string>(spec, "model.potential", "csv"));
    const std::string name = detail::get_required<std::string>(spec, "model.potential", "name");
    if (name == "hammock") return Potential::hammock();
    if (name == "quadratic_lipschitz") return Potential::quadratic_lipschitz();
    if (name == "quadratic") return Potential::quadratic();
    throw config_error("model.potential.name: unknown potential '" + name + "'");
}

inline SpinPotential spin_potential_from_config(const Json& spec) {
    detail::require_keys(spec, "model.spin_potential", {"name", "beta"});
    const std::string name =
        detail::get_required<std::string>(spec, "model.spin_potential", "name");
    if (name == "linear" || name == "linear_spin")
        return SpinPotential::linear(
            detail::get_required<double>(spec, "model.spin_potential", "beta"));
    throw config_error("model.spin_potential.name: unknown potential '" + name + "'");
}

using AnyModel = std::variant<DiscreteModel, SurfaceModel, SpinModel>;

struct ModelConfig {
    std::string family;
    AnyModel model;
};

inline ModelConfig model_from_config(const Json& spec) {
    detail::require_keys(spec, "model",
                         {"family", "graph", "potential", "pin", "q", "beta", "n",
                          "spin_potential", "chain"});
    const std::string family = detail::get_required<std::string>(spec, "model", "family");
    if (family == "potts") {
        Graph g = graph_from_config(spec.at("graph"));
        return {family, potts_model(std::move(g),
                                    detail::get_required<int>(spec, "model", "q"),
                                    detail::get_required<double>(spec, "model", "beta"))};
    }
    if (family == "surface") {
        Graph g = graph_from_config(spec.at("graph"));
        const Potential u = potential_from_config(spec.at("potential"));
        std::vector<double> pin = detail::get_or<std::vector<double>>(spec, "model", "pin", {});
        return {family, surface_model(std::move(g), u, std::move(pin))};
    }
    if (family == "spin") {
        Graph g = graph_from_config(spec.at("graph"));
        return {family, spin_on_model(std::move(g),
                                      detail::get_required<int>(spec, "model", "n"),
                                      spin_potential_from_config(spec.at("spin_potential")))};
    }
    if (family == "markov_chain") {
        if (!spec.contains("chain")) throw config_error("model: markov_chain needs a chain block");
        const Json& c = spec.at("chain");
        detail::require_keys(c, "model.chain", {"P", "pi", "mu", "steps"});
        return {family, markov_chain_model(
                            detail::get_required<std::vector<std::vector<double>>>(c, "model.chain",
                                                                                   "P"),
                            detail::get_required<std::vector<double>>(c, "model.chain", "pi"),
                            detail::get_required<std::vector<double>>(c, "model.chain", "mu"),
                            detail::get_required<std::uint32_t>(c, "model.chain", "steps"))};
    }
    throw config_error("model.family: unknown family '" + family + "'");
}

inline ChainSettings sampler_from_config(const Json& spec) {
    detail::require_keys(spec, "sampler",
                         {"seed", "burn_in_sweeps", "thinning", "n_samples", "moves",
                          "surface_window", "spin_step", "replicas"});
    ChainSettings s;
    s.seed = detail::get_or<std::uint64_t>(spec, "sampler", "seed", 1);
    s.burn_in_sweeps = detail::get_or<std::size_t>(spec, "sampler", "burn_in_sweeps", 1000);
    s.thinning = detail::get_or<std::size_t>(spec, "sampler", "thinning", 1);
    s.n_samples = detail::get_or<std::size_t>(spec, "sampler", "n_samples", 10000);
    s.surface_window = detail::get_or<double>(spec, "sampler", "surface_window", 3.0);
    s.sweep.spin_step = detail::get_or<double>(spec, "sampler", "spin_step", 0.5);
    if (spec.contains("moves")) {
        s.move_mix.clear();
        for (const auto& mv : spec.at("moves")) {
            detail::require_keys(mv, "sampler.moves[]", {"kind", "weight"});
            const std::string kind = detail::get_required<std::string>(mv, "sampler.moves[]",
                                                                       "kind");
            MoveKind k;
            if (kind == "single_site") k = MoveKind::single_site;
            else if (kind == "wolff") k = MoveKind::wolff_cluster;
            else if (kind == "swendsen_wang") k = MoveKind::swendsen_wang;
            else throw config_error("sampler.moves[].kind: unknown move '" + kind + "'");
            s.move_mix.push_back({k, detail::get_or<double>(mv, "sampler.moves[]", "weight", 1.0)});
        }
    }
    return s;
}

struct CheckConfig {
    std::string kind;
    Json params;
};

struct ExperimentConfig {
    ModelConfig model;
    ChainSettings settings;
    std::size_t replicas = 8;
    std::vector<CheckConfig> checks;
    std::string out_dir = "out";
    bool write_samples = false;
    std::vector<Vertex> record_vertices;
    std::optional<std::vector<int>> involution;  // for the enumerate command
    std::optional<Json> chain_raw;               // the model.chain block, when present
};

inline ExperimentConfig parse_config(const Json& root) {
    detail::require_keys(root, "config", {"model", "sampler", "suite", "output"});
    if (!root.contains("model")) throw config_error("config: missing model block");
    ExperimentConfig cfg;
    cfg.model = model_from_config(root.at("model"));
    if (root.at("model").contains("chain")) cfg.chain_raw = root.at("model").at("chain");
    if (root.contains("sampler")) {
        cfg.settings = sampler_from_config(root.at("sampler"));
        cfg.replicas = detail::get_or<std::size_t>(root.at("sampler"), "sampler", "replicas", 8);
    }
    if (root.contains("suite")) {
        const Json& suite = root.at("suite");
        detail::require_keys(suite, "suite", {"checks", "involution"});
        if (suite.contains("involution"))
            cfg.involution = suite.at("involution").get<std::vector<int>>();
        if (suite.contains("checks")) {
            for (const auto& c : suite.at("checks")) {
                if (!c.is_object() || !c.contains("kind"))
                    throw config_error("suite.checks[]: each check needs a kind");
                CheckConfig cc;
                cc.kind = c.at("kind").get<std::string>();
                cc.params = c;
                cfg.checks.push_back(std::move(cc));
            }
        }
    }
    if (root.contains("output")) {
        const Json& out = root.at("output");
        detail::require_keys(out, "output", {"dir", "write_samples", "record_vertices"});
        cfg.out_dir = detail::get_or<std::string>(out, "output", "dir", "out");
        cfg.write_samples = detail::get_or<bool>(out, "output", "write_samples", false);
        cfg.record_vertices =
            detail::get_or<std::vector<Vertex>>(out, "output", "record_vertices", {});
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path);
    Json root;
    try {
        root = Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config: JSON parse error: ") + e.what());
    }
    return parse_config(root);
}

}  // namespace clusterflip
