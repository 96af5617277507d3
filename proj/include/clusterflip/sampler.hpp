#pragma once

#include <cmath>
#include <cstdint>
#include <future>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "clusterflip/coupling.hpp"
#include "clusterflip/discrete.hpp"
#include "clusterflip/graph.hpp"
#include "clusterflip/product.hpp"
#include "clusterflip/rng.hpp"
#include "clusterflip/spin.hpp"
#include "clusterflip/surface.hpp"

namespace clusterflip {

enum class MoveKind { single_site, wolff_cluster, swendsen_wang };

struct MoveMix {
    MoveKind kind = MoveKind::single_site;
    double weight = 1.0;
};

// Involutions (with weights) to draw from for cluster moves on discrete
// models. Surface and spin models draw their reflection parameters from
// continuous laws configured below.
struct DiscreteReflectionLaw {
    std::vector<DiscreteReflection> reflections;
    std::vector<double> weights;
};

struct SweepParams {
    double spin_step = 0.5;            // Metropolis proposal scale on the sphere
    std::size_t rejection_cap = 10000;
};

struct ChainSettings {
    std::uint64_t seed = 1;
    std::size_t burn_in_sweeps = 1000;
    std::size_t thinning = 1;
    std::size_t n_samples = 1;
    std::vector<MoveMix> move_mix{{MoveKind::single_site, 1.0}};

    double surface_window = 3.0;  // cluster moves reflect around m ~ Uniform[-M, M]
    SweepParams sweep;
    DiscreteReflectionLaw discrete_law;

    void validate() const {
        if (n_samples < 1) throw std::invalid_argument("chain settings: need n_samples >= 1");
        if (thinning < 1) throw std::invalid_argument("chain settings: need thinning >= 1");
        for (const auto& m : move_mix) {
            if (!(m.weight > 0.0))
                throw std::invalid_argument("chain settings: move weights must be positive");
            if (m.kind != MoveKind::single_site && !(surface_window > 0.0))
                throw std::invalid_argument("chain settings: cluster moves need a positive window");
        }
        if (discrete_law.weights.size() != discrete_law.reflections.size())
            throw std::invalid_argument("chain settings: reflection law size mismatch");
        for (double w : discrete_law.weights) {
            if (!(w > 0.0))
                throw std::invalid_argument("chain settings: reflection weights must be positive");
        }
    }
};

struct SweepStats {
    std::uint64_t attempts = 0;
    std::uint64_t accepted = 0;

    void operator+=(const SweepStats& o) {
        attempts += o.attempts;
        accepted += o.accepted;
    }
};

// --- Deterministic starts --------------------------------------------------

inline DiscreteConfig initial_config(const DiscreteModel& m) {
    DiscreteConfig phi(m.g.vertex_count());
    for (Vertex v = 0; v < m.g.vertex_count(); ++v) {
        for (int s = 0; s < m.n_states; ++s) {
            if (m.site(v, s) > 0.0) {
                phi[v] = s;
                break;
            }
        }
    }
    return phi;
}

inline SurfaceConfig initial_config(const SurfaceModel& m) {
    SurfaceConfig phi(m.g.vertex_count(), 0.0);
    for (Vertex b : m.g.boundary()) phi[b] = m.pin[b];
    for (std::uint32_t e = 0; e < m.g.edge_count(); ++e) {
        const auto [u, v] = m.g.edge(e);
        if (std::isinf(m.edge_potential[e](phi[u] - phi[v])))
            throw std::invalid_argument("surface chain: deterministic start has zero density");
    }
    return phi;
}

inline SpinConfig initial_config(const SpinModel& m) {
    return SpinConfig(m.g.vertex_count(), SpinVec::e1(m.n));
}

template <class M>
std::vector<PairState<typename M::state_type>> initial_config(const ProductModel<M>& m) {
    const auto a = initial_config(m.first);
    const auto b = initial_config(m.second);
    std::vector<PairState<typename M::state_type>> phi(a.size());
    for (std::size_t v = 0; v < a.size(); ++v) phi[v] = {a[v], b[v]};
    return phi;
}

// --- Configuration validity ------------------------------------------------

// Hard Lipschitz assertion: gradients never exceed the edge support radius.
// The tolerance absorbs the one-rounding wobble of reflected heights.
inline void assert_valid(const SurfaceModel& m, const SurfaceConfig& phi) {
    for (std::uint32_t e = 0; e < m.g.edge_count(); ++e) {
        const double r = m.edge_potential[e].support_radius();
        if (!std::isfinite(r)) continue;
        const auto [u, v] = m.g.edge(e);
        if (std::abs(phi[u] - phi[v]) > r + 1e-9)
            throw std::logic_error("surface chain: gradient exceeds the Lipschitz bound");
    }
}

inline void assert_valid(const DiscreteModel&, const DiscreteConfig&) {}
inline void assert_valid(const SpinModel&, const SpinConfig&) {}

template <class M>
void assert_valid(const ProductModel<M>& m,
                  const std::vector<PairState<typename M::state_type>>& phi) {
    std::vector<typename M::state_type> a(phi.size()), b(phi.size());
    for (std::size_t v = 0; v < phi.size(); ++v) {
        a[v] = phi[v].first;
        b[v] = phi[v].second;
    }
    assert_valid(m.first, a);
    assert_valid(m.second, b);
}

// --- Single-site sweeps ----------------------------------------------------

// Exact heat bath from the conditional at each non-pinned vertex.
inline SweepStats single_site_sweep(const DiscreteModel& m, DiscreteConfig& phi, Rng& rng,
                                    const SweepParams& = {}) {
    std::vector<double> w(m.n_states);
    for (Vertex v = 0; v < m.g.vertex_count(); ++v) {
        if (m.pinned(v)) continue;
        double total = 0.0;
        for (int s = 0; s < m.n_states; ++s) {
            double x = m.site(v, s);
            for (const auto& [u, e] : m.g.neighbors(v)) {
                x *= m.edge_weight(e, s, phi[u]);
            }
            w[s] = x;
            total += x;
        }
        if (!(total > 0.0)) throw std::logic_error("discrete chain: empty conditional support");
        double target = runif01(rng) * total;
        int chosen = m.n_states - 1;
        for (int s = 0; s < m.n_states; ++s) {
            target -= w[s];
            if (target < 0.0) {
                chosen = s;
                break;
            }
        }
        phi[v] = chosen;
    }
    return {};
}

// Surfaces: exact uniform draws on the feasible interval for flat (hammock)
// interactions, rejection sampling against the flat envelope for bounded
// supports, Metropolis random walk otherwise (attested unbounded supports).
inline SweepStats single_site_sweep(const SurfaceModel& m, SurfaceConfig& phi, Rng& rng,
                                    const SweepParams& params = {}) {
    SweepStats stats;
    for (Vertex v = 0; v < m.g.vertex_count(); ++v) {
        if (m.g.in_boundary(v)) continue;
        double lo = -kInf, hi = kInf;
        bool bounded = true, flat = true;
        for (const auto& [u, e] : m.g.neighbors(v)) {
            const double r = m.edge_potential[e].support_radius();
            if (std::isfinite(r)) {
                lo = std::max(lo, phi[u] - r);
                hi = std::min(hi, phi[u] + r);
            } else {
                bounded = false;
            }
            flat = flat && m.edge_potential[e].flat_on_support();
        }
        if (bounded) {
            if (!(hi > lo)) throw std::logic_error("surface chain: empty conditional support");
            if (flat) {
                phi[v] = runif(rng, lo, hi);
                continue;
            }
            // Envelope: exp(-sum_u min U_e) dominates the conditional on the interval.
            bool accepted = false;
            for (std::size_t trial = 0; trial < params.rejection_cap; ++trial) {
                const double x = runif(rng, lo, hi);
                double log_ratio = 0.0;
                for (const auto& [u, e] : m.g.neighbors(v)) {
                    log_ratio -= m.edge_potential[e](x - phi[u]) -
                                 m.edge_potential[e].min_on_support();
                }
                ++stats.attempts;
                if (runif01(rng) < std::exp(log_ratio)) {
                    phi[v] = x;
                    ++stats.accepted;
                    accepted = true;
                    break;
                }
            }
            if (!accepted)
                throw std::runtime_error("surface chain: rejection sampling cap exceeded");
        } else {
            // Metropolis window move against the full conditional.
            const double proposal = phi[v] + runif(rng, -1.0, 1.0);
            double delta = 0.0;
            for (const auto& [u, e] : m.g.neighbors(v)) {
                delta += m.edge_potential[e](proposal - phi[u]) -
                         m.edge_potential[e](phi[v] - phi[u]);
            }
            ++stats.attempts;
            if (runif01(rng) < std::exp(-delta)) {
                phi[v] = proposal;
                ++stats.accepted;
            }
        }
    }
    return stats;
}

// Spheres: exact two-state heat bath for n = 1, Metropolis otherwise with a
// perturb-and-renormalize proposal whose density depends only on the angle
// between the states (hence symmetric).
inline SweepStats single_site_sweep(const SpinModel& m, SpinConfig& phi, Rng& rng,
                                    const SweepParams& params = {}) {
    SweepStats stats;
    for (Vertex v = 0; v < m.g.vertex_count(); ++v) {
        if (m.g.in_boundary(v)) continue;
        if (m.n == 1) {
            double log_w_plus = 0.0, log_w_minus = 0.0;
            for (const auto& [u, e] : m.g.neighbors(v)) {
                (void)e;
                const double r = std::clamp(phi[u].c[0], -1.0, 1.0);
                log_w_plus -= m.u(r);
                log_w_minus -= m.u(-r);
            }
            const double p_plus = 1.0 / (1.0 + std::exp(log_w_minus - log_w_plus));
            SpinVec s(1);
            s.c[0] = runif01(rng) < p_plus ? 1.0 : -1.0;
            phi[v] = s;
            continue;
        }
        SpinVec proposal = phi[v];
        for (int i = 0; i < m.n; ++i) proposal.c[i] += params.spin_step * rnorm(rng);
        proposal.normalize();
        double delta = 0.0;
        for (const auto& [u, e] : m.g.neighbors(v)) {
            (void)e;
            delta += m.u(std::clamp(proposal.dot(phi[u]), -1.0, 1.0)) -
                     m.u(std::clamp(phi[v].dot(phi[u]), -1.0, 1.0));
        }
        ++stats.attempts;
        if (runif01(rng) < std::exp(-delta)) {
            phi[v] = proposal;
            ++stats.accepted;
        }
    }
    return stats;
}

// One heat-bath sweep under the inhomogeneous hammock measure with edge
// half-widths t_e: each non-boundary height is redrawn uniformly from the
// intersection of its neighbor windows. Avoids building a model per draw.
inline void sweep_hammock_radii(const Graph& g, const HammockRadii& radii, SurfaceConfig& phi,
                                Rng& rng) {
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        if (g.in_boundary(v)) continue;
        double lo = -kInf, hi = kInf;
        for (const auto& [u, e] : g.neighbors(v)) {
            lo = std::max(lo, phi[u] - radii[e]);
            hi = std::min(hi, phi[u] + radii[e]);
        }
        if (!(hi > lo)) throw std::logic_error("hammock radii sweep: empty conditional support");
        phi[v] = runif(rng, lo, hi);
    }
}

// Product measure factorizes over coordinates, so a sweep is one base sweep
// per coordinate.
template <class M>
SweepStats single_site_sweep(const ProductModel<M>& m,
                             std::vector<PairState<typename M::state_type>>& phi, Rng& rng,
                             const SweepParams& params = {}) {
    std::vector<typename M::state_type> a(phi.size()), b(phi.size());
    for (std::size_t v = 0; v < phi.size(); ++v) {
        a[v] = phi[v].first;
        b[v] = phi[v].second;
    }
    SweepStats stats = single_site_sweep(m.first, a, rng, params);
    stats += single_site_sweep(m.second, b, rng, params);
    for (std::size_t v = 0; v < phi.size(); ++v) phi[v] = {a[v], b[v]};
    return stats;
}

// --- Reflection parameter laws ----------------------------------------------

// Reflection parameters are drawn before the configuration is read; the
// joint-law invariance licenses bond-measurable seed choices but not
// configuration-dependent reflection choices.
inline SurfaceReflection draw_reflection(const SurfaceModel&, const ChainSettings& s, Rng& rng) {
    return surface_reflection(runif(rng, -s.surface_window, s.surface_window));
}

inline SpinReflection draw_reflection(const SpinModel& m, const ChainSettings&, Rng& rng) {
    return SpinReflection{sphere_uniform(rng, m.n)};
}

inline DiscreteReflection draw_reflection(const DiscreteModel&, const ChainSettings& s, Rng& rng) {
    const auto& law = s.discrete_law;
    if (law.reflections.empty())
        throw std::invalid_argument("discrete cluster move: no involutions configured");
    double total = 0.0;
    for (double w : law.weights) total += w;
    double target = runif01(rng) * total;
    std::size_t chosen = law.reflections.size() - 1;
    for (std::size_t i = 0; i < law.weights.size(); ++i) {
        target -= law.weights[i];
        if (target < 0.0) {
            chosen = i;
            break;
        }
    }
    return law.reflections[chosen];
}

template <class M>
SwapReflection draw_reflection(const ProductModel<M>&, const ChainSettings&, Rng&) {
    return SwapReflection{};
}

// --- Cluster moves -----------------------------------------------------------

template <class M>
std::vector<typename M::state_type> wolff_step(const M& m,
                                               std::vector<typename M::state_type> phi,
                                               const ChainSettings& s, Rng& rng) {
    const auto tau = draw_reflection(m, s, rng);
    const Vertex x = static_cast<Vertex>(rindex(rng, m.graph().vertex_count()));
    const BondConfig bonds = sample_bonds(m, tau, phi, rng);
    return flip_component(m.graph(), std::move(phi), bonds, tau, x);
}

template <class M>
std::vector<typename M::state_type> sw_step(const M& m, std::vector<typename M::state_type> phi,
                                            const ChainSettings& s, Rng& rng) {
    const auto tau = draw_reflection(m, s, rng);
    const BondConfig bonds = sample_bonds(m, tau, phi, rng);
    return swendsen_wang_flip(m.graph(), std::move(phi), bonds, tau, rng);
}

// --- Chains ------------------------------------------------------------------

template <class M>
struct SampleBatch {
    using config_type = std::vector<typename M::state_type>;

    std::vector<config_type> configs;
    std::uint64_t seed = 0;
    std::size_t replica = 0;
    SweepStats sweep_stats;
};

// Run one chain and hand every retained sample to the sink. Deterministic
// under a fixed seed. Clusters and sweeps are mixed according to move_mix;
// one "sweep" unit is one move drawn from the mix.
template <class M, class F>
SweepStats stream_chain(const M& model, const ChainSettings& settings, F&& per_sample) {
    settings.validate();
    Rng rng = make_rng(settings.seed);
    auto phi = initial_config(model);
    assert_valid(model, phi);
    SweepStats stats;

    double total_weight = 0.0;
    for (const auto& mv : settings.move_mix) total_weight += mv.weight;

    auto step = [&]() {
        if (settings.move_mix.empty()) return;
        double target = runif01(rng) * total_weight;
        MoveKind kind = settings.move_mix.back().kind;
        for (const auto& mv : settings.move_mix) {
            target -= mv.weight;
            if (target < 0.0) {
                kind = mv.kind;
                break;
            }
        }
        switch (kind) {
            case MoveKind::single_site:
                stats += single_site_sweep(model, phi, rng, settings.sweep);
                break;
            case MoveKind::wolff_cluster:
                phi = wolff_step(model, std::move(phi), settings, rng);
                break;
            case MoveKind::swendsen_wang:
                phi = sw_step(model, std::move(phi), settings, rng);
                break;
        }
        assert_valid(model, phi);
    };

    for (std::size_t i = 0; i < settings.burn_in_sweeps; ++i) step();
    for (std::size_t n = 0; n < settings.n_samples; ++n) {
        if (n > 0) {
            for (std::size_t t = 0; t < settings.thinning; ++t) step();
        }
        per_sample(phi, n);
    }
    return stats;
}

template <class M>
SampleBatch<M> run_chain(const M& model, const ChainSettings& settings) {
    SampleBatch<M> batch;
    batch.seed = settings.seed;
    batch.configs.reserve(settings.n_samples);
    batch.sweep_stats = stream_chain(
        model, settings,
        [&](const typename SampleBatch<M>::config_type& phi, std::size_t) {
            batch.configs.push_back(phi);
        });
    return batch;
}

// Independent replicas with seeds derived by the documented splitting rule
// hash64(master_seed, replica). Executed in waves of at most `threads`.
template <class M>
std::vector<SampleBatch<M>> run_replicas(const M& model, const ChainSettings& settings,
                                         std::size_t n_replicas, std::size_t threads = 0) {
    if (n_replicas < 1) throw std::invalid_argument("run_replicas: need n_replicas >= 1");
    if (threads == 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        threads = hc == 0 ? 1 : hc;
    }
    std::vector<SampleBatch<M>> batches(n_replicas);
    std::size_t next = 0;
    while (next < n_replicas) {
        const std::size_t wave = std::min(threads, n_replicas - next);
        std::vector<std::future<SampleBatch<M>>> futs;
        futs.reserve(wave);
        for (std::size_t i = 0; i < wave; ++i) {
            ChainSettings rs = settings;
            rs.seed = hash64(settings.seed, next + i);
            futs.push_back(std::async(std::launch::async,
                                      [&model, rs]() { return run_chain(model, rs); }));
        }
        for (std::size_t i = 0; i < wave; ++i) {
            batches[next + i] = futs[i].get();
            batches[next + i].replica = next + i;
        }
        next += wave;
    }
    return batches;
}

// Streaming variant of run_replicas: per-replica sinks, merged by index.
template <class M, class F>
void stream_replicas(const M& model, const ChainSettings& settings, std::size_t n_replicas,
                     std::size_t threads, F&& per_replica_sample) {
    if (threads == 0) {
        const unsigned hc = std::thread::hardware_concurrency();
        threads = hc == 0 ? 1 : hc;
    }
    std::size_t next = 0;
    while (next < n_replicas) {
        const std::size_t wave = std::min(threads, n_replicas - next);
        std::vector<std::future<void>> futs;
        futs.reserve(wave);
        for (std::size_t i = 0; i < wave; ++i) {
            const std::size_t r = next + i;
            ChainSettings rs = settings;
            rs.seed = hash64(settings.seed, r);
            futs.push_back(std::async(std::launch::async, [&model, rs, r, &per_replica_sample]() {
                stream_chain(model, rs,
                             [&](const auto& phi, std::size_t n) { per_replica_sample(r, phi, n); });
            }));
        }
        for (auto& f : futs) f.get();
        next += wave;
    }
}

// Doubles the burn-in until two independent replicas agree on the mean
// observable within three pooled standard errors.
template <class M, class F>
std::size_t calibrate_burn_in(const M& model, ChainSettings settings, F&& observable,
                              std::size_t probe_samples = 400, std::size_t max_doublings = 8) {
    settings.n_samples = probe_samples;
    struct ProbeStat {
        double mean = 0.0;
        double se = 0.0;
    };
    for (std::size_t round = 0; round <= max_doublings; ++round) {
        ProbeStat agg[2];
        for (int r = 0; r < 2; ++r) {
            ChainSettings rs = settings;
            rs.seed = hash64(settings.seed, 1000 + r);
            double sum = 0.0, sumsq = 0.0;
            std::size_t count = 0;
            stream_chain(model, rs, [&](const auto& phi, std::size_t) {
                const double x = observable(phi);
                sum += x;
                sumsq += x * x;
                ++count;
            });
            agg[r].mean = sum / static_cast<double>(count);
            const double var =
                std::max(0.0, sumsq / count - agg[r].mean * agg[r].mean);
            agg[r].se = std::sqrt(var / static_cast<double>(count));
        }
        const double gap = std::abs(agg[0].mean - agg[1].mean);
        const double pooled = std::sqrt(agg[0].se * agg[0].se + agg[1].se * agg[1].se);
        if (gap <= 3.0 * pooled) return settings.burn_in_sweeps;
        settings.burn_in_sweeps *= 2;
    }
    return settings.burn_in_sweeps;
}

}  // namespace clusterflip
