#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "clusterflip/discrete.hpp"
#include "clusterflip/graph.hpp"
#include "clusterflip/state.hpp"
#include "clusterflip/surface.hpp"

namespace clusterflip {

// Two independent copies of a base model viewed as one model on pair
// states, with (h x h) edge weights and product site measures. The copies
// must share the interaction and the off-boundary site measures; boundary
// conditions may differ.
template <class M>
struct ProductModel {
    using base_type = M;
    using state_type = PairState<typename M::state_type>;

    M first;
    M second;

    const Graph& graph() const { return first.graph(); }

    double log_edge_weight(std::uint32_t e, const state_type& a, const state_type& b) const {
        return first.log_edge_weight(e, a.first, b.first) +
               second.log_edge_weight(e, a.second, b.second);
    }
    double edge_weight(std::uint32_t e, const state_type& a, const state_type& b) const {
        return std::exp(log_edge_weight(e, a, b));
    }
};

namespace detail {

inline bool same_graph(const Graph& a, const Graph& b) {
    return a.vertex_count() == b.vertex_count() && a.edges() == b.edges() &&
           a.boundary() == b.boundary();
}

inline void check_product_compatible(const DiscreteModel& a, const DiscreteModel& b) {
    if (!same_graph(a.g, b.g)) throw std::invalid_argument("product_model: mismatched graphs");
    if (a.n_states != b.n_states)
        throw std::invalid_argument("product_model: mismatched state spaces");
    for (std::uint32_t e = 0; e < a.g.edge_count(); ++e) {
        if (a.kernel[e]->h != b.kernel[e]->h)
            throw std::invalid_argument("product_model: edge interactions differ");
    }
    for (Vertex v = 0; v < a.g.vertex_count(); ++v) {
        if (!a.g.in_boundary(v) && a.site_weight[v] != b.site_weight[v])
            throw std::invalid_argument("product_model: off-boundary site measures differ");
    }
}

inline void check_product_compatible(const SurfaceModel& a, const SurfaceModel& b) {
    if (!same_graph(a.g, b.g)) throw std::invalid_argument("product_model: mismatched graphs");
    for (std::uint32_t e = 0; e < a.g.edge_count(); ++e) {
        for (double x = 0.0; x <= 2.0; x += 0.05) {
            const double ua = a.edge_potential[e](x);
            const double ub = b.edge_potential[e](x);
            const bool both_inf = std::isinf(ua) && std::isinf(ub);
            if (!both_inf && std::abs(ua - ub) > 1e-12)
                throw std::invalid_argument("product_model: edge interactions differ");
        }
    }
    // Off-boundary site measures are Lebesgue on both sides by construction.
}

}  // namespace detail

template <class M>
ProductModel<M> product_model(M a, M b) {
    detail::check_product_compatible(a, b);
    return ProductModel<M>{std::move(a), std::move(b)};
}

// Coordinate swap on pair states.
struct SwapReflection {
    template <class S>
    PairState<S> operator()(const PairState<S>& p) const {
        return {p.second, p.first};
    }
};

inline SwapReflection swap_reflection() { return SwapReflection{}; }

}  // namespace clusterflip
