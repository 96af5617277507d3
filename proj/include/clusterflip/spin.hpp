#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "clusterflip/discrete.hpp"
#include "clusterflip/graph.hpp"
#include "clusterflip/potential.hpp"
#include "clusterflip/state.hpp"

namespace clusterflip {

// Spin O(n) model: unit-vector states, uniform sphere measure off the
// boundary, delta at e1 on it, h(a, b) = exp(-U(<a, b>)).
struct SpinModel {
    using state_type = SpinVec;

    Graph g;
    int n = 0;
    SpinPotential u;

    const Graph& graph() const { return g; }

    double log_edge_weight(std::uint32_t e, const SpinVec& a, const SpinVec& b) const {
        (void)e;
        return -u(std::clamp(a.dot(b), -1.0, 1.0));
    }
    double edge_weight(std::uint32_t e, const SpinVec& a, const SpinVec& b) const {
        return std::exp(log_edge_weight(e, a, b));
    }
};

inline SpinModel spin_on_model(Graph g, int n, SpinPotential u) {
    if (n < 1) throw std::invalid_argument("spin_on_model: need n >= 1");
    if (n > SpinVec::max_dim)
        throw std::invalid_argument("spin_on_model: n exceeds the supported dimension");
    return SpinModel{std::move(g), n, std::move(u)};
}

// Reflection across the hyperplane orthogonal to the unit vector `axis`.
struct SpinReflection {
    SpinVec axis;

    SpinVec operator()(const SpinVec& b) const {
        const double t = 2.0 * axis.dot(b);
        SpinVec r = b;
        for (int i = 0; i < r.dim; ++i) r.c[i] -= t * axis.c[i];
        return r;
    }
};

inline SpinReflection spin_reflection(const SpinVec& axis) {
    if (std::abs(axis.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("spin_reflection: axis must be a unit vector");
    return SpinReflection{axis};
}

// The n = 1 model is the Ising model on {+1, -1}; expose it as a discrete
// model so the exact enumeration oracle applies. State 0 is +1 (= e1),
// state 1 is -1. Boundary vertices are pinned to +1.
inline DiscreteModel spin_ising_discrete(const SpinModel& model) {
    if (model.n != 1)
        throw std::invalid_argument("spin_ising_discrete: only defined for n = 1");
    auto sigma = [](int s) { return s == 0 ? 1.0 : -1.0; };
    std::vector<double> h(4);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) h[a * 2 + b] = std::exp(-model.u(sigma(a) * sigma(b)));
    auto kern = std::make_shared<const DiscreteKernel>(2, std::move(h));
    std::vector<std::vector<double>> weights(model.g.vertex_count(), {1.0, 1.0});
    for (Vertex v : model.g.boundary()) weights[v] = {1.0, 0.0};
    std::vector<DiscreteKernelPtr> kernels(model.g.edge_count(), kern);
    return make_discrete_model(model.g, 2, std::move(weights), std::move(kernels));
}

}  // namespace clusterflip
