#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "clusterflip/graph.hpp"
#include "clusterflip/potential.hpp"
#include "clusterflip/state.hpp"

namespace clusterflip {

// Symmetric edge interaction on a finite state set, shared between edges
// via shared_ptr. log values are precomputed for the bond-probability path.
struct DiscreteKernel {
    int n_states = 0;
    std::vector<double> h;      // row-major n x n
    std::vector<double> log_h;  // log(h), -inf where h == 0

    DiscreteKernel(int n, std::vector<double> values) : n_states(n), h(std::move(values)) {
        if (static_cast<int>(h.size()) != n * n)
            throw std::invalid_argument("discrete kernel: matrix size mismatch");
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                const double v = h[a * n + b];
                if (!(v >= 0.0) || std::isinf(v))
                    throw std::invalid_argument("discrete kernel: weights must be finite and >= 0");
                if (v != h[b * n + a])
                    throw std::invalid_argument("discrete kernel: matrix must be symmetric");
            }
        }
        log_h.resize(h.size());
        for (std::size_t i = 0; i < h.size(); ++i) log_h[i] = h[i] > 0.0 ? std::log(h[i]) : -kInf;
    }

    double at(int a, int b) const { return h[a * n_states + b]; }
    double log_at(int a, int b) const { return log_h[a * n_states + b]; }
};

using DiscreteKernelPtr = std::shared_ptr<const DiscreteKernel>;

// Finite-state model: per-vertex site weights and per-edge symmetric
// interaction matrices. Boundary conditions are one-hot site weights.
struct DiscreteModel {
    using state_type = int;

    Graph g;
    int n_states = 0;
    std::vector<std::vector<double>> site_weight;  // [vertex][state]
    std::vector<DiscreteKernelPtr> kernel;         // [edge]

    const Graph& graph() const { return g; }

    double edge_weight(std::uint32_t e, int a, int b) const { return kernel[e]->at(a, b); }
    double log_edge_weight(std::uint32_t e, int a, int b) const { return kernel[e]->log_at(a, b); }
    double site(std::uint32_t v, int s) const { return site_weight[v][s]; }

    // A vertex is pinned when exactly one state carries positive weight.
    bool pinned(Vertex v) const {
        int positive = 0;
        for (double w : site_weight[v])
            if (w > 0.0) ++positive;
        return positive == 1;
    }

    int pin_state(Vertex v) const {
        for (int s = 0; s < n_states; ++s)
            if (site_weight[v][s] > 0.0) return s;
        throw std::logic_error("discrete model: vertex has no admissible state");
    }
};

inline DiscreteModel make_discrete_model(Graph g, int n_states,
                                         std::vector<std::vector<double>> site_weight,
                                         std::vector<DiscreteKernelPtr> kernels) {
    if (n_states < 1) throw std::invalid_argument("discrete model: need at least one state");
    if (site_weight.size() != g.vertex_count())
        throw std::invalid_argument("discrete model: site weight count mismatch");
    for (const auto& w : site_weight) {
        if (static_cast<int>(w.size()) != n_states)
            throw std::invalid_argument("discrete model: site weight size mismatch");
        bool any = false;
        for (double x : w) {
            if (x < 0.0) throw std::invalid_argument("discrete model: negative site weight");
            any = any || x > 0.0;
        }
        if (!any) throw std::invalid_argument("discrete model: vertex with no admissible state");
    }
    if (kernels.size() != g.edge_count())
        throw std::invalid_argument("discrete model: kernel count mismatch");
    for (const auto& k : kernels) {
        if (!k || k->n_states != n_states)
            throw std::invalid_argument("discrete model: kernel state count mismatch");
    }
    return DiscreteModel{std::move(g), n_states, std::move(site_weight), std::move(kernels)};
}

// q-state Potts with free boundary: counting site measures and
// h(a, b) = exp(beta * [a == b]). Negative beta gives the antiferromagnet;
// the proper-coloring limit beta = -inf is not representable here.
inline DiscreteModel potts_model(Graph g, int q, double beta) {
    if (q < 2) throw std::invalid_argument("potts_model: need q >= 2");
    if (!std::isfinite(beta)) throw std::invalid_argument("potts_model: beta must be finite");
    if (!g.boundary().empty())
        throw std::invalid_argument("potts_model: free boundary required (empty V0)");
    std::vector<double> h(static_cast<std::size_t>(q) * q, 1.0);
    const double diag = std::exp(beta);
    for (int a = 0; a < q; ++a) h[a * q + a] = diag;
    auto kern = std::make_shared<const DiscreteKernel>(q, std::move(h));
    std::vector<std::vector<double>> weights(g.vertex_count(), std::vector<double>(q, 1.0));
    std::vector<DiscreteKernelPtr> kernels(g.edge_count(), kern);
    return make_discrete_model(std::move(g), q, std::move(weights), std::move(kernels));
}

// Reversible Markov chain of n_steps transitions as a one-dimensional model:
// path graph 0..n, lambda_0 = mu, lambda_j = pi, h(a, b) = P(a, b) / pi(b),
// symmetric thanks to detailed balance. The matrix is filled from ordered
// pairs (a <= b) and mirrored so it is symmetric by construction.
inline DiscreteModel markov_chain_model(const std::vector<std::vector<double>>& P,
                                        const std::vector<double>& pi,
                                        const std::vector<double>& mu, std::uint32_t n_steps) {
    const std::size_t s = P.size();
    if (s == 0) throw std::invalid_argument("markov_chain_model: empty state set");
    if (pi.size() != s || mu.size() != s)
        throw std::invalid_argument("markov_chain_model: pi/mu size mismatch");
    constexpr double tol = 1e-12;
    double pi_sum = 0.0, mu_sum = 0.0;
    for (std::size_t a = 0; a < s; ++a) {
        if (!(pi[a] > 0.0)) throw std::invalid_argument("markov_chain_model: pi must be positive");
        if (mu[a] < 0.0) throw std::invalid_argument("markov_chain_model: mu must be >= 0");
        pi_sum += pi[a];
        mu_sum += mu[a];
        if (P[a].size() != s) throw std::invalid_argument("markov_chain_model: P is not square");
        double row = 0.0;
        for (double p : P[a]) {
            if (p < 0.0) throw std::invalid_argument("markov_chain_model: negative transition");
            row += p;
        }
        if (std::abs(row - 1.0) > tol)
            throw std::invalid_argument("markov_chain_model: row " + std::to_string(a) +
                                        " of P does not sum to 1");
    }
    if (std::abs(pi_sum - 1.0) > tol)
        throw std::invalid_argument("markov_chain_model: pi does not sum to 1");
    if (std::abs(mu_sum - 1.0) > tol)
        throw std::invalid_argument("markov_chain_model: mu does not sum to 1");
    for (std::size_t a = 0; a < s; ++a) {
        for (std::size_t b = 0; b < s; ++b) {
            if (std::abs(pi[a] * P[a][b] - pi[b] * P[b][a]) > tol)
                throw std::invalid_argument("markov_chain_model: detailed balance fails at (" +
                                            std::to_string(a) + "," + std::to_string(b) + ")");
        }
    }
    std::vector<double> h(s * s, 0.0);
    for (std::size_t a = 0; a < s; ++a) {
        for (std::size_t b = a; b < s; ++b) {
            const double v = P[a][b] / pi[b];
            h[a * s + b] = v;
            h[b * s + a] = v;
        }
    }
    auto kern = std::make_shared<const DiscreteKernel>(static_cast<int>(s), std::move(h));
    Graph g = path_graph(n_steps + 1, {0});
    std::vector<std::vector<double>> weights(g.vertex_count(), pi);
    weights[0] = mu;
    std::vector<DiscreteKernelPtr> kernels(g.edge_count(), kern);
    return make_discrete_model(std::move(g), static_cast<int>(s), std::move(weights),
                               std::move(kernels));
}

// State-space involution given by its permutation table.
struct DiscreteReflection {
    std::vector<int> perm;

    int operator()(int s) const { return perm[s]; }
};

inline DiscreteReflection discrete_involution(std::vector<int> perm) {
    const int n = static_cast<int>(perm.size());
    for (int s = 0; s < n; ++s) {
        if (perm[s] < 0 || perm[s] >= n)
            throw std::invalid_argument("discrete_involution: table entry out of range");
        if (perm[perm[s]] != s)
            throw std::invalid_argument("discrete_involution: table is not an involution");
    }
    return DiscreteReflection{std::move(perm)};
}

inline DiscreteReflection identity_involution(int n_states) {
    std::vector<int> perm(n_states);
    for (int s = 0; s < n_states; ++s) perm[s] = s;
    return DiscreteReflection{std::move(perm)};
}

inline DiscreteReflection swap_involution(int n_states, int a, int b) {
    auto r = identity_involution(n_states);
    std::swap(r.perm[a], r.perm[b]);
    return r;
}

}  // namespace clusterflip
