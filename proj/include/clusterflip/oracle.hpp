#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "clusterflip/coupling.hpp"
#include "clusterflip/discrete.hpp"
#include "clusterflip/graph.hpp"
#include "clusterflip/stats.hpp"
#include "clusterflip/surface.hpp"

namespace clusterflip {

// Raised when an enumeration request exceeds the configured size budget;
// the CLI maps it to its own exit code.
struct oracle_overflow_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kOracleBudget = 10'000'000;

namespace detail {

inline std::uint64_t pow_checked(std::uint64_t base, std::uint32_t exp, std::uint64_t limit) {
    std::uint64_t r = 1;
    for (std::uint32_t i = 0; i < exp; ++i) {
        if (r > limit / base) return limit + 1;
        r *= base;
    }
    return r;
}

}  // namespace detail

// Exact law over all n_states^V configurations, indexed in mixed radix with
// vertex 0 least significant. Entries with zero weight stay in the support
// with probability zero.
struct ExactLaw {
    int n_states = 0;
    std::uint32_t n_vertices = 0;
    std::vector<double> prob;

    std::uint64_t size() const { return prob.size(); }

    std::uint64_t encode(const DiscreteConfig& cfg) const {
        std::uint64_t idx = 0;
        for (std::uint32_t v = n_vertices; v-- > 0;) {
            idx = idx * static_cast<std::uint64_t>(n_states) + static_cast<std::uint64_t>(cfg[v]);
        }
        return idx;
    }

    DiscreteConfig decode(std::uint64_t idx) const {
        DiscreteConfig cfg(n_vertices);
        for (std::uint32_t v = 0; v < n_vertices; ++v) {
            cfg[v] = static_cast<int>(idx % n_states);
            idx /= n_states;
        }
        return cfg;
    }
};

inline double unnormalized_weight(const DiscreteModel& model, const DiscreteConfig& cfg) {
    double w = 1.0;
    for (Vertex v = 0; v < model.g.vertex_count(); ++v) w *= model.site(v, cfg[v]);
    for (std::uint32_t e = 0; e < model.g.edge_count(); ++e) {
        const auto [a, b] = model.g.edge(e);
        w *= model.edge_weight(e, cfg[a], cfg[b]);
    }
    return w;
}

inline ExactLaw enumerate_exact(const DiscreteModel& model) {
    const std::uint64_t total = detail::pow_checked(
        static_cast<std::uint64_t>(model.n_states), model.g.vertex_count(), kOracleBudget);
    if (total > kOracleBudget)
        throw oracle_overflow_error("enumerate_exact: state space exceeds budget");
    ExactLaw law;
    law.n_states = model.n_states;
    law.n_vertices = model.g.vertex_count();
    law.prob.resize(total);
    NeumaierSum z;
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        const double w = unnormalized_weight(model, law.decode(idx));
        law.prob[idx] = w;
        z.add(w);
    }
    const double zv = z.value();
    if (!(zv > 0.0)) throw std::domain_error("enumerate_exact: zero partition function");
    for (double& p : law.prob) p /= zv;
    return law;
}

// Exact joint law over (configuration, bonds) under the bond coupling:
// P(cfg) * prod_e p_e^{w_e} (1 - p_e)^{1 - w_e}.
struct JointLaw {
    int n_states = 0;
    std::uint32_t n_vertices = 0;
    std::uint32_t n_edges = 0;
    std::vector<double> prob;  // index = cfg_index * 2^E + bond_index

    std::uint64_t bond_words() const { return std::uint64_t{1} << n_edges; }

    BondConfig decode_bonds(std::uint64_t idx) const {
        BondConfig bonds(n_edges);
        for (std::uint32_t e = 0; e < n_edges; ++e) bonds[e] = (idx >> e) & 1u;
        return bonds;
    }

    std::uint64_t encode_bonds(const BondConfig& bonds) const {
        std::uint64_t idx = 0;
        for (std::uint32_t e = 0; e < n_edges; ++e) {
            if (bonds[e]) idx |= std::uint64_t{1} << e;
        }
        return idx;
    }
};

inline JointLaw enumerate_joint_es(const DiscreteModel& model, const DiscreteReflection& tau) {
    const ExactLaw marginal = enumerate_exact(model);
    const std::uint32_t n_edges = model.g.edge_count();
    if (n_edges >= 40 || marginal.size() > (kOracleBudget >> n_edges))
        throw oracle_overflow_error("enumerate_joint_es: joint table exceeds budget");
    JointLaw joint;
    joint.n_states = model.n_states;
    joint.n_vertices = model.g.vertex_count();
    joint.n_edges = n_edges;
    joint.prob.assign(marginal.size() << n_edges, 0.0);
    const std::uint64_t words = joint.bond_words();
    std::vector<double> p_edge(n_edges);
    for (std::uint64_t cfg_idx = 0; cfg_idx < marginal.size(); ++cfg_idx) {
        const DiscreteConfig cfg = marginal.decode(cfg_idx);
        for (std::uint32_t e = 0; e < n_edges; ++e) {
            p_edge[e] = bond_probability(model, tau, e, cfg);
        }
        for (std::uint64_t b = 0; b < words; ++b) {
            double w = marginal.prob[cfg_idx];
            for (std::uint32_t e = 0; e < n_edges && w > 0.0; ++e) {
                w *= ((b >> e) & 1u) ? p_edge[e] : 1.0 - p_edge[e];
            }
            joint.prob[cfg_idx * words + b] = w;
        }
    }
    return joint;
}

inline std::vector<double> phi_marginal(const JointLaw& joint) {
    const std::uint64_t words = joint.bond_words();
    std::vector<double> marg(joint.prob.size() / words, 0.0);
    for (std::uint64_t c = 0; c < marg.size(); ++c) {
        NeumaierSum s;
        for (std::uint64_t b = 0; b < words; ++b) s.add(joint.prob[c * words + b]);
        marg[c] = s.value();
    }
    return marg;
}

// A configuration kernel maps (configuration, bonds) to a sub-probability
// mix of successor configurations; the bond pattern is left unchanged.
// Deterministic transformations emit a single successor with weight 1.
using ConfigKernel = std::function<void(
    const DiscreteConfig&, const BondConfig&,
    const std::function<void(const DiscreteConfig&, double)>&)>;

// Sup-norm distance between the joint law and its pushforward under the
// kernel. Zero (up to rounding) certifies distribution preservation.
inline double joint_pushforward_max_diff(const JointLaw& joint, const ConfigKernel& kernel) {
    const std::uint64_t words = joint.bond_words();
    std::vector<double> pushed(joint.prob.size(), 0.0);
    ExactLaw codec;
    codec.n_states = joint.n_states;
    codec.n_vertices = joint.n_vertices;
    for (std::uint64_t c = 0; c < joint.prob.size() / words; ++c) {
        const DiscreteConfig cfg = codec.decode(c);
        for (std::uint64_t b = 0; b < words; ++b) {
            const double mass = joint.prob[c * words + b];
            if (mass == 0.0) continue;
            const BondConfig bonds = joint.decode_bonds(b);
            kernel(cfg, bonds, [&](const DiscreteConfig& out, double weight) {
                pushed[codec.encode(out) * words + b] += mass * weight;
            });
        }
    }
    double diff = 0.0;
    for (std::uint64_t i = 0; i < pushed.size(); ++i)
        diff = std::max(diff, std::abs(pushed[i] - joint.prob[i]));
    return diff;
}

// Same comparison on the configuration marginal only (for transformations
// with auxiliary randomness, compared after integrating the bonds out).
inline double marginal_pushforward_max_diff(const JointLaw& joint, const ConfigKernel& kernel) {
    const std::uint64_t words = joint.bond_words();
    const std::vector<double> before = phi_marginal(joint);
    std::vector<double> after(before.size(), 0.0);
    ExactLaw codec;
    codec.n_states = joint.n_states;
    codec.n_vertices = joint.n_vertices;
    for (std::uint64_t c = 0; c < before.size(); ++c) {
        const DiscreteConfig cfg = codec.decode(c);
        for (std::uint64_t b = 0; b < words; ++b) {
            const double mass = joint.prob[c * words + b];
            if (mass == 0.0) continue;
            const BondConfig bonds = joint.decode_bonds(b);
            kernel(cfg, bonds, [&](const DiscreteConfig& out, double weight) {
                after[codec.encode(out)] += mass * weight;
            });
        }
    }
    double diff = 0.0;
    for (std::uint64_t i = 0; i < after.size(); ++i)
        diff = std::max(diff, std::abs(after[i] - before[i]));
    return diff;
}

// Kernel for the single-cluster flip at a fixed seed vertex.
inline ConfigKernel flip_component_kernel(const Graph& g, const DiscreteReflection& tau,
                                          Vertex x) {
    return [&g, tau, x](const DiscreteConfig& cfg, const BondConfig& bonds, const auto& emit) {
        emit(flip_component(g, cfg, bonds, tau, x), 1.0);
    };
}

inline ConfigKernel flip_component_or_complement_kernel(const Graph& g,
                                                        const DiscreteReflection& tau,
                                                        std::vector<Vertex> w_set) {
    return [&g, tau, w = std::move(w_set)](const DiscreteConfig& cfg, const BondConfig& bonds,
                                           const auto& emit) {
        emit(flip_component_or_complement(g, cfg, bonds, tau, w), 1.0);
    };
}

// Kernel for the all-components coin flip: enumerates every coin outcome
// with weight 2^-k over the k components not meeting the boundary.
inline ConfigKernel swendsen_wang_kernel(const Graph& g, const DiscreteReflection& tau) {
    return [&g, tau](const DiscreteConfig& cfg, const BondConfig& bonds, const auto& emit) {
        const Partition part = connected_components(g, bonds);
        std::vector<std::uint8_t> protected_comp(part.component_count, 0);
        for (Vertex b : g.boundary()) protected_comp[part.component_id[b]] = 1;
        std::vector<std::uint32_t> free_comps;
        for (std::uint32_t c = 0; c < part.component_count; ++c) {
            if (!protected_comp[c]) free_comps.push_back(c);
        }
        const std::uint32_t k = static_cast<std::uint32_t>(free_comps.size());
        const double w = std::ldexp(1.0, -static_cast<int>(k));
        for (std::uint64_t coins = 0; coins < (std::uint64_t{1} << k); ++coins) {
            DiscreteConfig out = cfg;
            for (std::uint32_t i = 0; i < k; ++i) {
                if ((coins >> i) & 1u) {
                    for (Vertex v = 0; v < g.vertex_count(); ++v) {
                        if (part.component_id[v] == free_comps[i]) out[v] = tau(out[v]);
                    }
                }
            }
            emit(out, w);
        }
    };
}

// --- Tree quadrature for surface models ----------------------------------

// Marginal tables on a uniform height grid.
struct GridLaw {
    double delta = 0.0;
    double box = 0.0;  // grid spans [-box, box]
    std::vector<double> centers;
    std::map<Vertex, std::vector<double>> marginal;  // masses per cell, sum 1
};

// Leaf-to-root numerical convolution for surface models on trees with a
// single pinned vertex. Conditional independence across subtrees makes the
// computation exact up to the grid discretization (midpoint rule).
class TreeQuadrature {
  public:
    TreeQuadrature(const SurfaceModel& model, double delta, double box = 0.0)
        : model_(model), delta_(delta) {
        const Graph& g = model.g;
        if (!(delta > 0.0)) throw std::invalid_argument("tree quadrature: need delta > 0");
        if (g.boundary().size() != 1)
            throw std::invalid_argument("tree quadrature: need exactly one boundary vertex");
        if (g.edge_count() + 1 != g.vertex_count())
            throw std::invalid_argument("tree quadrature: graph is not a tree");
        root_ = g.boundary()[0];
        pin_ = model.pin[root_];
        if (box > 0.0) {
            box_ = box;
        } else {
            double span = 0.5;
            for (const auto& u : model.edge_potential) {
                if (!std::isfinite(u.support_radius()))
                    throw std::invalid_argument(
                        "tree quadrature: unbounded support needs an explicit box");
                span += u.support_radius();
            }
            box_ = span + std::abs(pin_);
        }
        n_cells_ = static_cast<std::size_t>(std::ceil(2.0 * box_ / delta_));
        centers_.resize(n_cells_);
        for (std::size_t i = 0; i < n_cells_; ++i)
            centers_[i] = -box_ + (static_cast<double>(i) + 0.5) * delta_;
        build_tree();
        for (Vertex v = 0; v < g.vertex_count(); ++v) {
            if (v != root_ && parent_[v] == UINT32_MAX)
                throw std::invalid_argument("tree quadrature: graph is not connected");
        }
    }

    double delta() const { return delta_; }
    double box() const { return box_; }
    const std::vector<double>& centers() const { return centers_; }

    // Normalized marginal masses of a non-root vertex (the root is a point mass).
    std::vector<double> marginal(Vertex v) const {
        if (v == root_)
            throw std::invalid_argument("tree quadrature: root marginal is a point mass");
        const std::vector<double> up = subtree_factor(v, NoRestrict{});
        const std::vector<double> down = downward_message(v);
        std::vector<double> mass(n_cells_);
        NeumaierSum z;
        for (std::size_t i = 0; i < n_cells_; ++i) {
            mass[i] = up[i] * down[i];
            z.add(mass[i]);
        }
        const double zv = z.value();
        if (!(zv > 0.0)) throw std::domain_error("tree quadrature: zero mass");
        for (double& m : mass) m /= zv;
        return mass;
    }

    GridLaw grid_law(const std::vector<Vertex>& vertices) const {
        GridLaw law;
        law.delta = delta_;
        law.box = box_;
        law.centers = centers_;
        for (Vertex v : vertices) law.marginal[v] = marginal(v);
        return law;
    }

    double prob_in(Vertex v, double a, double b) const {
        return reduce_marginal(v, [&](double x) { return x >= a && x < b; });
    }

    double prob_abs_ge(Vertex v, double m) const {
        return reduce_marginal(v, [&](double x) { return std::abs(x) >= m; });
    }

    double cdf_le(Vertex v, double x0) const {
        return reduce_marginal(v, [&](double x) { return x <= x0; });
    }

    double mean(Vertex v) const {
        const std::vector<double> mass = marginal(v);
        NeumaierSum s;
        for (std::size_t i = 0; i < n_cells_; ++i) s.add(centers_[i] * mass[i]);
        return s.value();
    }

    // P(no sub-m path from the pinned vertex to v). On a tree every walk
    // from the root to v visits the unique simple path, so the complement
    // event restricts exactly the path vertices to heights < m.
    double prob_barrier(Vertex v, double m) const {
        if (pin_ >= m) return 1.0;  // the pinned vertex itself blocks every path
        return 1.0 - restricted_mass(v, m, -kInf, kInf) / partition_value();
    }

    // P(barrier AND phi_v in [a, b)).
    double prob_barrier_and_in(Vertex v, double m, double a, double b) const {
        const double in_d = prob_in(v, a, b);
        if (pin_ >= m) return in_d;
        return in_d - restricted_mass(v, m, a, b) / partition_value();
    }

    // P(|gradient| >= 1 - eps on every listed edge): with a single pinned
    // vertex the edge increments are independent with density proportional
    // to the edge kernel, so the event factorizes over edges.
    double ext_probability(const std::vector<std::uint32_t>& edge_ids, double eps) const {
        double p = 1.0;
        for (std::uint32_t e : edge_ids) {
            NeumaierSum tail, total;
            for (std::size_t i = 0; i < n_cells_; ++i) {
                const double k = std::exp(-model_.edge_potential[e](centers_[i]));
                total.add(k);
                if (std::abs(centers_[i]) >= 1.0 - eps) tail.add(k);
            }
            p *= tail.value() / total.value();
        }
        return p;
    }

  private:
    // Height restriction applied during an upward pass: vertices flagged in
    // `below_m` are confined to heights < m, and one vertex may additionally
    // be confined to [lo, hi).
    struct NoRestrict {};
    struct PathRestrict {
        const std::vector<std::uint8_t>* below_m;
        double m;
        Vertex interval_vertex;
        double lo, hi;
    };

    void build_tree() {
        const Graph& g = model_.g;
        parent_.assign(g.vertex_count(), UINT32_MAX);
        parent_edge_.assign(g.vertex_count(), UINT32_MAX);
        children_.assign(g.vertex_count(), {});
        std::vector<Vertex> stack{root_};
        std::vector<std::uint8_t> seen(g.vertex_count(), 0);
        seen[root_] = 1;
        while (!stack.empty()) {
            const Vertex v = stack.back();
            stack.pop_back();
            for (const auto& [w, e] : g.neighbors(v)) {
                if (!seen[w]) {
                    seen[w] = 1;
                    parent_[w] = v;
                    parent_edge_[w] = e;
                    children_[v].push_back(w);
                    stack.push_back(w);
                }
            }
        }
    }

    double kernel_value(std::uint32_t e, double d) const {
        return std::exp(-model_.edge_potential[e](d));
    }

    template <class F>
    double reduce_marginal(Vertex v, F&& keep) const {
        const std::vector<double> mass = marginal(v);
        NeumaierSum s;
        for (std::size_t i = 0; i < n_cells_; ++i) {
            if (keep(centers_[i])) s.add(mass[i]);
        }
        return s.value();
    }

    void apply_restriction(Vertex, std::vector<double>&, NoRestrict) const {}

    void apply_restriction(Vertex v, std::vector<double>& acc, const PathRestrict& r) const {
        if ((*r.below_m)[v]) {
            for (std::size_t i = 0; i < n_cells_; ++i) {
                if (centers_[i] >= r.m) acc[i] = 0.0;
            }
        }
        if (v == r.interval_vertex) {
            for (std::size_t i = 0; i < n_cells_; ++i) {
                if (centers_[i] < r.lo || centers_[i] >= r.hi) acc[i] = 0.0;
            }
        }
    }

    // Unnormalized density factor at v collecting its whole subtree, as a
    // function of v's height; `skip` omits one child (for downward passes).
    template <class R>
    std::vector<double> subtree_factor(Vertex v, const R& restrict_spec,
                                       Vertex skip = UINT32_MAX) const {
        std::vector<double> acc(n_cells_, 1.0);
        apply_restriction(v, acc, restrict_spec);
        for (Vertex c : children_[v]) {
            if (c == skip) continue;
            const std::vector<double> msg = convolve(subtree_factor(c, restrict_spec),
                                                     parent_edge_[c]);
            for (std::size_t i = 0; i < n_cells_; ++i) acc[i] *= msg[i];
        }
        return acc;
    }

    // out[j] = delta * sum_i K_e(x_i - x_j) a[i]
    std::vector<double> convolve(const std::vector<double>& a, std::uint32_t e) const {
        const double radius = model_.edge_potential[e].support_radius();
        const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(n_cells_);
        const std::ptrdiff_t window =
            std::isfinite(radius) ? static_cast<std::ptrdiff_t>(radius / delta_) + 1 : n;
        std::vector<double> kernel_tab(2 * window + 1);
        for (std::ptrdiff_t d = -window; d <= window; ++d) {
            kernel_tab[d + window] = kernel_value(e, static_cast<double>(d) * delta_);
        }
        std::vector<double> out(n_cells_, 0.0);
        for (std::ptrdiff_t j = 0; j < n; ++j) {
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, j - window);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, j + window);
            double s = 0.0;
            for (std::ptrdiff_t i = lo; i <= hi; ++i) {
                s += kernel_tab[i - j + window] * a[i];
            }
            out[j] = s * delta_;
        }
        return out;
    }

    // Message from a child of the root evaluated at the exact pin height.
    template <class R>
    double message_at_pin(Vertex c, const R& restrict_spec) const {
        const std::vector<double> a = subtree_factor(c, restrict_spec);
        const std::uint32_t e = parent_edge_[c];
        NeumaierSum s;
        for (std::size_t i = 0; i < n_cells_; ++i) {
            if (a[i] != 0.0) s.add(kernel_value(e, centers_[i] - pin_) * a[i]);
        }
        return s.value() * delta_;
    }

    template <class R>
    double partition_with(const R& restrict_spec) const {
        double z = 1.0;
        for (Vertex c : children_[root_]) z *= message_at_pin(c, restrict_spec);
        return z;
    }

    double partition_value() const { return partition_with(NoRestrict{}); }

    // Unnormalized mass of {path vertices < m, phi_v in [lo, hi)}.
    double restricted_mass(Vertex v, double m, double lo, double hi) const {
        std::vector<std::uint8_t> on_path(model_.g.vertex_count(), 0);
        for (Vertex u = v; u != root_; u = parent_[u]) on_path[u] = 1;
        on_path[root_] = 1;
        const PathRestrict r{&on_path, m, v, lo, hi};
        return partition_with(r);
    }

    // Message into v from the rest of the tree (through its parent).
    std::vector<double> downward_message(Vertex v) const {
        std::vector<Vertex> chain;
        for (Vertex u = v; u != root_; u = parent_[u]) chain.push_back(u);
        std::vector<double> down;
        Vertex above = root_;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            const Vertex cur = *it;
            const std::uint32_t e = parent_edge_[cur];
            if (above == root_) {
                double z_side = 1.0;
                for (Vertex c : children_[root_]) {
                    if (c != cur) z_side *= message_at_pin(c, NoRestrict{});
                }
                down.assign(n_cells_, 0.0);
                for (std::size_t i = 0; i < n_cells_; ++i) {
                    down[i] = kernel_value(e, centers_[i] - pin_) * z_side;
                }
            } else {
                std::vector<double> at_above = subtree_factor(above, NoRestrict{}, cur);
                for (std::size_t i = 0; i < n_cells_; ++i) at_above[i] *= down[i];
                down = convolve(at_above, e);
            }
            above = cur;
        }
        return down;
    }

    const SurfaceModel& model_;
    double delta_;
    double box_ = 0.0;
    Vertex root_ = 0;
    double pin_ = 0.0;
    std::size_t n_cells_ = 0;
    std::vector<double> centers_;
    std::vector<Vertex> parent_;
    std::vector<std::uint32_t> parent_edge_;
    std::vector<std::vector<Vertex>> children_;
};

}  // namespace clusterflip
