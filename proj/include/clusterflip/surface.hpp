#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "clusterflip/graph.hpp"
#include "clusterflip/potential.hpp"
#include "clusterflip/rng.hpp"
#include "clusterflip/state.hpp"

namespace clusterflip {

// Per-edge Lipschitz half-widths t_e for the inhomogeneous hammock measure.
using HammockRadii = std::vector<double>;

// Real-valued height model: Lebesgue site measures off the boundary, point
// masses at the pin heights on it, h(a, b) = exp(-U_e(a - b)) per edge.
struct SurfaceModel {
    using state_type = double;

    Graph g;
    std::vector<Potential> edge_potential;  // [edge]
    std::vector<double> pin;                // [vertex], meaningful on the boundary

    const Graph& graph() const { return g; }

    double log_edge_weight(std::uint32_t e, double a, double b) const {
        return -edge_potential[e](a - b);
    }
    double edge_weight(std::uint32_t e, double a, double b) const {
        return std::exp(log_edge_weight(e, a, b));
    }

    bool all_flat() const {
        for (const auto& u : edge_potential)
            if (!u.flat_on_support()) return false;
        return true;
    }
    bool all_lipschitz() const {
        for (const auto& u : edge_potential)
            if (!u.is_lipschitz_support()) return false;
        return true;
    }
    bool all_monotone() const {
        for (const auto& u : edge_potential)
            if (!u.is_monotone()) return false;
        return true;
    }
    bool bounded_support() const {
        for (const auto& u : edge_potential)
            if (!std::isfinite(u.support_radius())) return false;
        return true;
    }
};

inline SurfaceModel surface_model(Graph g, const Potential& u,
                                  std::vector<double> pin_heights = {}) {
    if (g.boundary().empty())
        throw std::invalid_argument("surface_model: boundary must be non-empty");
    if (!u.is_lipschitz_support() && !u.finiteness_attested())
        throw std::invalid_argument(
            "surface_model: potential '" + u.name() +
            "' has unbounded support; construct it with a finiteness attestation");
    if (pin_heights.empty()) pin_heights.assign(g.vertex_count(), 0.0);
    if (pin_heights.size() != g.vertex_count())
        throw std::invalid_argument("surface_model: pin height count mismatch");
    std::vector<Potential> per_edge(g.edge_count(), u);
    return SurfaceModel{std::move(g), std::move(per_edge), std::move(pin_heights)};
}

// Uniform measure over t-Lipschitz functions: per-edge hammock potentials
// with half-widths t_e.
inline SurfaceModel hammock_radii_model(Graph g, const HammockRadii& radii) {
    if (g.boundary().empty())
        throw std::invalid_argument("hammock_radii_model: boundary must be non-empty");
    if (radii.size() != g.edge_count())
        throw std::invalid_argument("hammock_radii_model: radii count mismatch");
    std::vector<Potential> per_edge;
    per_edge.reserve(radii.size());
    for (double t : radii) per_edge.push_back(Potential::hammock_radius(t));
    std::vector<double> pin(g.vertex_count(), 0.0);
    return SurfaceModel{std::move(g), std::move(per_edge), std::move(pin)};
}

// Height reflection around level m.
struct SurfaceReflection {
    double m = 0.0;

    double operator()(double a) const { return 2.0 * m - a; }
};

inline SurfaceReflection surface_reflection(double m) {
    if (!std::isfinite(m)) throw std::invalid_argument("surface_reflection: m must be finite");
    return SurfaceReflection{m};
}

// One draw from the edge-width mixture given the current surface: t_e is
// distributed as dlambda_U(t) = -d exp(-U(t)) conditioned on t_e exceeding
// the current gradient, realized through the generalized inverse of the
// right-continuous survival function s -> exp(-U(s)).
inline HammockRadii sample_hammock_radii(const SurfaceModel& model, const SurfaceConfig& phi,
                                         Rng& rng) {
    if (phi.size() != model.g.vertex_count())
        throw std::invalid_argument("sample_hammock_radii: configuration size mismatch");
    HammockRadii t(model.g.edge_count());
    for (std::uint32_t e = 0; e < model.g.edge_count(); ++e) {
        const auto& u_pot = model.edge_potential[e];
        if (!u_pot.is_monotone())
            throw std::invalid_argument("sample_hammock_radii: potential must be monotone");
        const auto [v, w] = model.g.edge(e);
        const double grad = std::abs(phi[v] - phi[w]);
        const double cap = std::exp(-u_pot(grad));
        if (!(cap > 0.0))
            throw std::domain_error("sample_hammock_radii: configuration has zero density");
        const double u = cap * (1.0 - runif01(rng));  // in (0, cap]
        // Smallest s with exp(-U(s)) <= u. The set is an interval (possibly
        // half-open) to the right of grad; bisection keeps exp(-U(hi)) <= u.
        double lo = grad;
        double hi = std::max(1.0, 2.0 * grad + 1.0);
        while (std::exp(-u_pot(hi)) > u) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e12)
                throw std::domain_error("sample_hammock_radii: survival function does not decay");
        }
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            if (std::exp(-u_pot(mid)) <= u) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        t[e] = hi;
    }
    return t;
}

}  // namespace clusterflip
