#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_set>
#include <utility>
#include <vector>

#include "clusterflip/discrete.hpp"
#include "clusterflip/graph.hpp"
#include "clusterflip/product.hpp"
#include "clusterflip/rng.hpp"
#include "clusterflip/spin.hpp"
#include "clusterflip/surface.hpp"

namespace clusterflip {

template <class C>
struct ESPair {
    C configuration;
    BondConfig bonds;
};

// Opening probability of an edge under the bond coupling:
//   p = max(1 - h(tau(phi_v), phi_w) / h(phi_v, phi_w), 0)
// with the conventions 0/0 := 1 and t/0 := inf (both give p = 0). Working
// with log weights realizes the conventions by one sign comparison and
// never overflows: log-ratio >= 0 means p = 0.
template <class M, class R>
double bond_probability(const M& model, const R& tau, std::uint32_t e,
                        const std::vector<typename M::state_type>& phi) {
    const auto [v, w] = model.graph().edge(e);
    const double reflected = model.log_edge_weight(e, tau(phi[v]), phi[w]);
    const double direct = model.log_edge_weight(e, phi[v], phi[w]);
    if (reflected >= direct) return 0.0;
    return 1.0 - std::exp(reflected - direct);  // reflected = -inf gives p = 1
}

// Independent Bernoulli(p_e) bonds given the configuration. One uniform is
// consumed per edge regardless of p, so the draw count is configuration
// independent.
template <class M, class R>
BondConfig sample_bonds(const M& model, const R& tau,
                        const std::vector<typename M::state_type>& phi, Rng& rng) {
    const Graph& g = model.graph();
    BondConfig bonds(g.edge_count(), 0);
    for (std::uint32_t e = 0; e < g.edge_count(); ++e) {
        const double p = bond_probability(model, tau, e, phi);
        bonds[e] = runif01(rng) < p ? 1 : 0;
    }
    return bonds;
}

// Apply tau on the bond component of x unless that component meets the
// boundary set, in which case the configuration is returned unchanged.
template <class S, class R>
std::vector<S> flip_component(const Graph& g, std::vector<S> phi, const BondConfig& bonds,
                              const R& tau, Vertex x) {
    if (x >= g.vertex_count()) throw std::invalid_argument("flip_component: bad vertex");
    UnionFind uf = bond_union_find(g, bonds);
    const std::uint32_t root = uf.find(x);
    for (Vertex b : g.boundary()) {
        if (uf.find(b) == root) return phi;
    }
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        if (uf.find(v) == root) phi[v] = tau(phi[v]);
    }
    return phi;
}

// Apply tau either to the union of bond components meeting W, or (when that
// union contains the boundary vertex) to its complement. Requires a
// singleton boundary.
template <class S, class R>
std::vector<S> flip_component_or_complement(const Graph& g, std::vector<S> phi,
                                            const BondConfig& bonds, const R& tau,
                                            const std::vector<Vertex>& w_set) {
    if (g.boundary().size() != 1)
        throw std::invalid_argument("flip_component_or_complement: boundary must be a singleton");
    if (w_set.empty()) return phi;
    UnionFind uf = bond_union_find(g, bonds);
    std::unordered_set<std::uint32_t> w_roots;
    for (Vertex w : w_set) {
        if (w >= g.vertex_count())
            throw std::invalid_argument("flip_component_or_complement: bad vertex in W");
        w_roots.insert(uf.find(w));
    }
    const bool boundary_connected = w_roots.count(uf.find(g.boundary()[0])) > 0;
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        const bool in_w_cluster = w_roots.count(uf.find(v)) > 0;
        if (in_w_cluster != boundary_connected) phi[v] = tau(phi[v]);
    }
    return phi;
}

// Apply tau with probability 1/2, independently, to each bond component not
// meeting the boundary. Coins are consumed in component-id order.
template <class S, class R>
std::vector<S> swendsen_wang_flip(const Graph& g, std::vector<S> phi, const BondConfig& bonds,
                                  const R& tau, Rng& rng) {
    const Partition part = connected_components(g, bonds);
    std::vector<std::uint8_t> protected_comp(part.component_count, 0);
    for (Vertex b : g.boundary()) protected_comp[part.component_id[b]] = 1;
    std::vector<std::uint8_t> flip(part.component_count, 0);
    for (std::uint32_t c = 0; c < part.component_count; ++c) {
        if (!protected_comp[c]) flip[c] = runif01(rng) < 0.5 ? 1 : 0;
    }
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        if (flip[part.component_id[v]]) phi[v] = tau(phi[v]);
    }
    return phi;
}

// --- One-sidedness of clusters -------------------------------------------

struct SideReport {
    std::uint32_t component_count = 0;
    std::vector<std::uint32_t> violating_components;

    bool ok() const { return violating_components.empty(); }
};

namespace detail {

// Each component must be strictly one-sided in the given sign field; a zero
// sign is admissible only in singleton components.
inline SideReport one_sided_report(const Graph& g, const BondConfig& bonds,
                                   const std::vector<int>& sign) {
    const Partition part = connected_components(g, bonds);
    std::vector<int> pos(part.component_count, 0), neg(part.component_count, 0),
        zero(part.component_count, 0), size(part.component_count, 0);
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        const std::uint32_t c = part.component_id[v];
        ++size[c];
        if (sign[v] > 0) ++pos[c];
        else if (sign[v] < 0) ++neg[c];
        else ++zero[c];
    }
    SideReport report;
    report.component_count = part.component_count;
    for (std::uint32_t c = 0; c < part.component_count; ++c) {
        const bool mixed = pos[c] > 0 && neg[c] > 0;
        const bool zero_in_cluster = zero[c] > 0 && size[c] > 1;
        if (mixed || zero_in_cluster) report.violating_components.push_back(c);
    }
    return report;
}

}  // namespace detail

inline SideReport cluster_side_check(const SurfaceModel& model, const SurfaceReflection& tau,
                                     const SurfaceConfig& phi, const BondConfig& bonds) {
    std::vector<int> sign(model.g.vertex_count());
    for (Vertex v = 0; v < model.g.vertex_count(); ++v) {
        sign[v] = phi[v] > tau.m ? 1 : (phi[v] < tau.m ? -1 : 0);
    }
    return detail::one_sided_report(model.g, bonds, sign);
}

inline SideReport cluster_side_check(const SpinModel& model, const SpinReflection& tau,
                                     const SpinConfig& phi, const BondConfig& bonds) {
    std::vector<int> sign(model.g.vertex_count());
    for (Vertex v = 0; v < model.g.vertex_count(); ++v) {
        const double s = tau.axis.dot(phi[v]);
        sign[v] = s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
    }
    return detail::one_sided_report(model.g, bonds, sign);
}

inline SideReport cluster_side_check(const ProductModel<SurfaceModel>& model,
                                     const SwapReflection&,
                                     const std::vector<PairState<double>>& phi,
                                     const BondConfig& bonds) {
    const Graph& g = model.graph();
    std::vector<int> sign(g.vertex_count());
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        const double d = phi[v].first - phi[v].second;
        sign[v] = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    }
    return detail::one_sided_report(g, bonds, sign);
}

// --- Measure-preservation diagnostics ------------------------------------

// Surface and spin reflections preserve their reference measures
// analytically (translation/reflection invariance of Lebesgue measure,
// rotation invariance of the sphere measure); only discrete models carry
// site weights that an involution can fail to preserve.
inline bool preserves_measures(const DiscreteModel& model, const DiscreteReflection& tau) {
    if (static_cast<int>(tau.perm.size()) != model.n_states) return false;
    for (Vertex v = 0; v < model.g.vertex_count(); ++v) {
        if (model.g.in_boundary(v)) continue;
        for (int s = 0; s < model.n_states; ++s) {
            if (model.site_weight[v][s] != model.site_weight[v][tau(s)]) return false;
        }
    }
    for (std::uint32_t e = 0; e < model.g.edge_count(); ++e) {
        for (int a = 0; a < model.n_states; ++a) {
            for (int b = 0; b < model.n_states; ++b) {
                if (model.kernel[e]->at(a, b) != model.kernel[e]->at(tau(a), tau(b))) return false;
            }
        }
    }
    return true;
}

inline bool preserves_measures(const SurfaceModel&, const SurfaceReflection&) { return true; }
inline bool preserves_measures(const SpinModel&, const SpinReflection&) { return true; }
template <class M>
bool preserves_measures(const ProductModel<M>&, const SwapReflection&) {
    return true;  // enforced at product construction: equal measures off the boundary
}

}  // namespace clusterflip
