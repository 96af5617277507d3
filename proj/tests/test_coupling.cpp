#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "clusterflip/coupling.hpp"
#include "clusterflip/oracle.hpp"

using namespace clusterflip;

TEST_CASE("surface reflection") {
    const SurfaceReflection t0 = surface_reflection(0.0);
    CHECK(t0(1.5) == -1.5);
    const SurfaceReflection tm = surface_reflection(0.7);
    CHECK(tm(0.7) == Catch::Approx(0.7));  // fixed point
    CHECK(surface_reflection(1.0)(0.25) == 1.75);
    CHECK_THROWS_AS(surface_reflection(kInf), std::invalid_argument);
    // Involution within rounding.
    for (double a : {-2.3, 0.0, 0.41, 5.0}) {
        CHECK(tm(tm(a)) == Catch::Approx(a).margin(1e-12));
    }
}

TEST_CASE("spin reflection") {
    SpinVec a(2);
    a.c = {0.0, 1.0};
    const SpinReflection tau = spin_reflection(a);
    SpinVec b(2);
    b.c = {0.6, 0.8};
    const SpinVec r = tau(b);
    CHECK(r.c[0] == Catch::Approx(0.6));
    CHECK(r.c[1] == Catch::Approx(-0.8));

    SECTION("tau(a) = -a and fixed hyperplane") {
        const SpinVec ra = tau(a);
        CHECK(ra.c[1] == Catch::Approx(-1.0));
        SpinVec orth(2);
        orth.c = {1.0, 0.0};
        const SpinVec ro = tau(orth);
        CHECK(ro.c[0] == Catch::Approx(1.0));
        CHECK(ro.c[1] == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("non-unit axis is rejected") {
        SpinVec bad(2);
        bad.c = {0.5, 0.5};
        CHECK_THROWS_AS(spin_reflection(bad), std::invalid_argument);
    }
    SECTION("norm preservation over random vectors") {
        Rng rng = make_rng(17);
        for (int i = 0; i < 10000; ++i) {
            const SpinVec axis = sphere_uniform(rng, 3);
            const SpinVec v = sphere_uniform(rng, 3);
            const SpinVec w = spin_reflection(axis)(v);
            CHECK(std::abs(w.norm() - v.norm()) < 1e-12);
        }
    }
    SECTION("involution over random vectors") {
        Rng rng = make_rng(18);
        for (int i = 0; i < 1000; ++i) {
            const SpinVec axis = sphere_uniform(rng, 3);
            const SpinVec v = sphere_uniform(rng, 3);
            const SpinVec w = spin_reflection(axis)(spin_reflection(axis)(v));
            for (int k = 0; k < 3; ++k) CHECK(std::abs(w.c[k] - v.c[k]) < 1e-12);
        }
    }
}

TEST_CASE("discrete involution and swap") {
    CHECK_THROWS_AS(discrete_involution({1, 2, 0}), std::invalid_argument);
    const DiscreteReflection r = discrete_involution({0, 2, 1});
    CHECK(r(0) == 0);
    CHECK(r(1) == 2);

    const SwapReflection s = swap_reflection();
    const PairState<int> p{3, 7};
    CHECK(s(p) == PairState<int>{7, 3});
    CHECK(s(s(p)) == p);
}

TEST_CASE("bond probabilities") {
    SECTION("ferromagnetic potts: p = 1 - exp(-beta) on aligned movable spins") {
        const double beta = 0.9;
        const DiscreteModel m = potts_model(complete_graph(3), 3, beta);
        const DiscreteReflection tau = swap_involution(3, 0, 1);
        const DiscreteConfig phi{0, 0, 2};
        // Edge (0,1): phi equal, tau moves the value.
        CHECK(bond_probability(m, tau, 0, phi) == Catch::Approx(1.0 - std::exp(-beta)));
        // Edge (0,2): phi differs and tau(0) = 1 != 2.
        CHECK(bond_probability(m, tau, 1, phi) == 0.0);
        // Fixed value: tau(2) = 2, p = 0 on every incident edge.
        const DiscreteConfig fixed{2, 2, 0};
        CHECK(bond_probability(m, tau, 0, fixed) == 0.0);
    }
    SECTION("antiferromagnetic potts: p = 1 - exp(beta) on tau-matched pairs") {
        const double beta = -0.8;
        const DiscreteModel m = potts_model(complete_graph(3), 3, beta);
        const DiscreteReflection tau = swap_involution(3, 0, 1);
        const DiscreteConfig phi{0, 1, 2};  // tau(phi_0) = 1 = phi_1
        CHECK(bond_probability(m, tau, 0, phi) == Catch::Approx(1.0 - std::exp(beta)));
        CHECK(bond_probability(m, tau, 1, phi) == 0.0);
    }
    SECTION("hammock surface bonds are deterministic") {
        const SurfaceModel m = surface_model(path_graph(2, {0}), Potential::hammock());
        const SurfaceReflection tau = surface_reflection(0.0);
        // Reflected gradient |-0.6 - 0.5| = 1.1 > 1 while |0.6 - 0.5| <= 1.
        const SurfaceConfig phi{0.6, 0.5};
        CHECK(bond_probability(m, tau, 0, phi) == 1.0);
        // Both gradients inside the support: p = 0 for the flat potential.
        const SurfaceConfig low{0.2, -0.1};
        CHECK(bond_probability(m, tau, 0, low) == 0.0);
        Rng rng = make_rng(4);
        const BondConfig bonds = sample_bonds(m, tau, phi, rng);
        CHECK(bonds[0] == 1);
    }
    SECTION("identity involution opens nothing") {
        const DiscreteModel m = potts_model(complete_graph(3), 2, 1.2);
        const DiscreteReflection id = identity_involution(2);
        Rng rng = make_rng(5);
        const DiscreteConfig phi{0, 1, 0};
        const BondConfig bonds = sample_bonds(m, id, phi, rng);
        for (auto b : bonds) CHECK(b == 0);
    }
    SECTION("probability stays in [0, 1] over random probes") {
        const SpinModel m = spin_on_model(complete_graph(4), 3, SpinPotential::linear(1.3));
        Rng rng = make_rng(6);
        for (int i = 0; i < 2000; ++i) {
            SpinConfig phi;
            for (int v = 0; v < 4; ++v) phi.push_back(sphere_uniform(rng, 3));
            const SpinReflection tau = spin_reflection(sphere_uniform(rng, 3));
            for (std::uint32_t e = 0; e < m.g.edge_count(); ++e) {
                const double p = bond_probability(m, tau, e, phi);
                CHECK(p >= 0.0);
                CHECK(p <= 1.0);
            }
        }
    }
}

TEST_CASE("flip_component") {
    const Graph p3 = path_graph(3, {0});
    const SurfaceReflection tau = surface_reflection(1.0);
    const SurfaceConfig phi{0.0, 0.5, 0.8};
    SECTION("no bonds: only the seed flips") {
        const BondConfig bonds{0, 0};
        const SurfaceConfig out = flip_component(p3, phi, bonds, tau, 1);
        CHECK(out[0] == 0.0);
        CHECK(out[1] == 1.5);
        CHECK(out[2] == 0.8);
    }
    SECTION("seed in the boundary: identity") {
        const BondConfig bonds{0, 0};
        CHECK(flip_component(p3, phi, bonds, tau, 0) == phi);
    }
    SECTION("component reaching the boundary: identity") {
        const BondConfig bonds{1, 0};
        CHECK(flip_component(p3, phi, bonds, tau, 1) == phi);
    }
    SECTION("interior component flips together") {
        const BondConfig bonds{0, 1};
        const SurfaceConfig out = flip_component(p3, phi, bonds, tau, 1);
        CHECK(out[0] == 0.0);
        CHECK(out[1] == 1.5);
        CHECK(out[2] == Catch::Approx(1.2));
    }
}

TEST_CASE("flip_component_or_complement") {
    const Graph p3 = path_graph(3, {0});
    const DiscreteReflection tau = swap_involution(2, 0, 1);
    const DiscreteConfig phi{0, 0, 1};
    const BondConfig none{0, 0};
    SECTION("empty W: identity") {
        CHECK(flip_component_or_complement(p3, phi, none, tau, {}) == phi);
    }
    SECTION("W = one interior vertex, disconnected from the boundary") {
        const DiscreteConfig out = flip_component_or_complement(p3, phi, none, tau, {1});
        CHECK(out == DiscreteConfig{0, 1, 1});
    }
    SECTION("W = boundary vertex: complement flips") {
        const DiscreteConfig out = flip_component_or_complement(p3, phi, none, tau, {0});
        CHECK(out == DiscreteConfig{0, 1, 0});
    }
    SECTION("non-singleton boundary is rejected") {
        const Graph bad = path_graph(3, {0, 2});
        CHECK_THROWS_AS(flip_component_or_complement(bad, phi, none, tau, {1}),
                        std::invalid_argument);
    }
}

TEST_CASE("swendsen_wang_flip") {
    SECTION("all components protected by the boundary: identity") {
        const Graph p3 = path_graph(3, {0});
        const BondConfig all{1, 1};
        const DiscreteConfig phi{0, 1, 0};
        Rng rng = make_rng(7);
        CHECK(swendsen_wang_flip(p3, phi, all, swap_involution(2, 0, 1), rng) == phi);
    }
    SECTION("free boundary, no bonds: independent coin per vertex") {
        const Graph p3 = path_graph(3, {});
        const BondConfig none{0, 0};
        const DiscreteConfig phi{0, 0, 0};
        Rng rng = make_rng(8);
        int flips = 0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) {
            const DiscreteConfig out =
                swendsen_wang_flip(p3, phi, none, swap_involution(2, 0, 1), rng);
            for (int v = 0; v < 3; ++v) flips += out[v] == 1;
        }
        const double rate = static_cast<double>(flips) / (3.0 * n);
        CHECK(std::abs(rate - 0.5) < 0.01);
    }
}

TEST_CASE("cluster_side_check reports mixed-sign components") {
    const Graph p3 = path_graph(3, {0});
    const SurfaceModel m = surface_model(p3, Potential::hammock());
    SECTION("singletons never violate") {
        const SurfaceConfig phi{0.0, 0.5, 0.2};
        const BondConfig none{0, 0};
        const SideReport r = cluster_side_check(m, surface_reflection(0.3), phi, none);
        CHECK(r.ok());
        CHECK(r.component_count == 3);
    }
    SECTION("a straddling bonded pair violates") {
        const SurfaceConfig phi{0.0, 0.5, 0.2};
        const BondConfig bond12{0, 1};
        const SideReport r = cluster_side_check(m, surface_reflection(0.3), phi, bond12);
        CHECK_FALSE(r.ok());
        CHECK(r.violating_components.size() == 1);
    }
}

TEST_CASE("preserves_measures flags non-invariant site weights") {
    const Graph k3 = complete_graph(3);
    const DiscreteModel uniform = potts_model(k3, 3, 0.7);
    CHECK(preserves_measures(uniform, swap_involution(3, 0, 1)));

    DiscreteModel skewed = uniform;
    skewed.site_weight[1] = {1.0, 2.0, 4.0};
    CHECK_FALSE(preserves_measures(skewed, swap_involution(3, 0, 1)));
    CHECK(preserves_measures(skewed, identity_involution(3)));
}
