// Acceptance suite: runs every headline check at full size and prints one
// pass/fail line per criterion, with its runtime budget enforced.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "clusterflip/suites.hpp"
#include "clusterflip/verify.hpp"

using namespace clusterflip;

namespace {

constexpr std::uint64_t kSeed = 20240613;

struct CriterionOutcome {
    bool pass = false;
    std::string detail;
};

bool all_pass_or_inconclusive(const std::vector<TestVerdict>& verdicts) {
    for (const auto& v : verdicts) {
        if (!v.pass && !v.inconclusive) return false;
    }
    return true;
}

std::string failing_names(const std::vector<TestVerdict>& verdicts, bool count_inconclusive) {
    std::string out;
    for (const auto& v : verdicts) {
        if (!v.pass && (count_inconclusive || !v.inconclusive)) {
            if (!out.empty()) out += ", ";
            out += v.name;
        }
    }
    return out;
}

// Criterion 1: exact joint-law invariance of all three flip variants on
// small discrete models, sup-norm < 1e-12.
CriterionOutcome criterion1() {
    const auto verdicts = suites::lemma1_exact(kSeed, 2);
    double worst = 0.0;
    for (const auto& v : verdicts) worst = std::max(worst, v.estimate);
    return {all_pass(verdicts), "max pushforward distance " + std::to_string(worst) + " over " +
                                    std::to_string(verdicts.size()) + " checks"};
}

// Criterion 2: tree exactness of the extremal-gradient probability plus the
// grid substitutes (reported bound, decay in k, monotone in epsilon).
CriterionOutcome criterion2() {
    const auto verdicts = suites::theorem1_tree(kSeed, 2);
    bool tree_exact_ok = true;
    for (const auto& v : verdicts) {
        if (v.name.find("ext-tree-exact") != std::string::npos && !v.pass) tree_exact_ok = false;
    }
    const bool rest_ok = all_pass_or_inconclusive(verdicts);
    std::string detail;
    if (!tree_exact_ok) detail = "tree exactness failed: " + failing_names(verdicts, true);
    else if (!rest_ok) detail = "failed: " + failing_names(verdicts, false);
    else detail = std::to_string(verdicts.size()) + " checks";
    return {tree_exact_ok && rest_ok, detail};
}

// Criterion 3: barrier probabilities on the two-edge path against the
// quadrature oracle, inequalities at the point estimates; grid sandwich
// holds or is inconclusive, never violated beyond noise.
CriterionOutcome criterion3() {
    const auto path = suites::theorem2_path(kSeed, 2);
    if (!all_pass(path)) return {false, "path checks failed: " + failing_names(path, true)};
    const auto grid = suites::theorem2_grid(kSeed, 2);
    if (!all_pass_or_inconclusive(grid))
        return {false, "grid sandwich violated: " + failing_names(grid, false)};
    std::string detail = std::to_string(path.size()) + " path + " + std::to_string(grid.size()) +
                         " grid checks";
    if (any_inconclusive(grid)) detail += " (grid partially inconclusive)";
    return {true, detail};
}

// Criterion 4: spin density monotonicity, exact on the two-state model and
// calibrated-isotonic on the three-component model.
CriterionOutcome criterion4() {
    const auto verdicts = suites::theorem3_spin(kSeed, 2);
    return {all_pass(verdicts),
            all_pass(verdicts) ? std::to_string(verdicts.size()) + " checks"
                               : "failed: " + failing_names(verdicts, true)};
}

// Criterion 5: zero one-sidedness violations over 1e5 sampled pairs for both
// reflection families.
CriterionOutcome criterion5() {
    const auto verdicts = suites::cluster_sides(kSeed, 2);
    double violations = 0.0;
    for (const auto& v : verdicts) violations += v.estimate;
    return {all_pass(verdicts), std::to_string(static_cast<long long>(violations)) +
                                    " violating components"};
}

// Criterion 6: one cluster step on 1e5 equilibrium samples leaves all four
// observables KS-indistinguishable at alpha = 1e-3 (Bonferroni), for the
// uniform-surface grid and the two-component spin model.
CriterionOutcome criterion6() {
    const auto verdicts = suites::lemma1_continuous(kSeed, 2);
    return {all_pass(verdicts),
            all_pass(verdicts) ? std::to_string(verdicts.size()) + " KS checks"
                               : "rejected: " + failing_names(verdicts, true)};
}

// Criterion 7: the width-mixture alternation leaves marginals in place (KS)
// and matches the quadrature oracle at three points.
CriterionOutcome criterion7() {
    const auto verdicts = suites::mixture(kSeed, 2);
    return {all_pass(verdicts),
            all_pass(verdicts) ? std::to_string(verdicts.size()) + " checks"
                               : "failed: " + failing_names(verdicts, true)};
}

// Criterion 8: reversible-chain involution conditions hold exactly and the
// path-graph joint law is flip-invariant below 1e-12.
CriterionOutcome criterion8() {
    const auto verdicts = suites::markov_reflection(kSeed, 2);
    return {all_pass(verdicts), "pushforward distance " + std::to_string(verdicts.back().estimate)};
}

// Criterion 9a: a reflection that fails to preserve a skewed site measure
// must be caught by the exact pushforward check.
CriterionOutcome criterion9a() {
    std::vector<double> h(9, 0.0);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            if (std::abs(a - b) <= 1) h[a * 3 + b] = 1.0;
        }
    }
    auto kern = std::make_shared<const DiscreteKernel>(3, h);
    const Graph p3 = path_graph(3, {0});
    const std::vector<double> skewed{1.0, 1.5, 2.25};
    const DiscreteModel model =
        make_discrete_model(p3, 3, {{0.0, 1.0, 0.0}, skewed, skewed}, {kern, kern});
    const DiscreteReflection tau = discrete_involution({2, 1, 0});
    const JointLaw joint = enumerate_joint_es(model, tau);
    double diff = 0.0;
    for (Vertex x = 0; x < 3; ++x) {
        diff = std::max(diff,
                        joint_pushforward_max_diff(joint, flip_component_kernel(model.g, tau, x)));
    }
    return {diff > 1e-6, "pushforward distance " + std::to_string(diff) +
                             " (must be loudly nonzero)"};
}

// Criterion 9b: a non-monotone potential must produce straddling clusters.
CriterionOutcome criterion9b() {
    const Potential dip("dip",
                        [](double x) {
                            if (x > 1.0) return kInf;
                            return x >= 0.5 ? -2.0 : 0.0;
                        },
                        {.lipschitz_support = true}, 1.0, false);
    const SurfaceModel m = surface_model(grid_graph(4, 4), dip);
    ChainSettings s;
    s.seed = hash64(kSeed, 91);
    s.burn_in_sweeps = 300;
    s.thinning = 1;
    const TestVerdict v = check_cluster_sides(m, 20000, s, {4, 2});
    return {!v.pass && v.estimate > 0.0,
            std::to_string(static_cast<long long>(v.estimate)) + " violations detected"};
}

struct Criterion {
    std::string name;
    double budget_seconds;
    std::function<CriterionOutcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"criterion-1 exact flip invariance (discrete, all variants)", 10.0, criterion1},
        {"criterion-2 extremal gradients: tree exactness + grid decay", 120.0, criterion2},
        {"criterion-3 barrier sandwich: path oracle + grid", 120.0, criterion3},
        {"criterion-4 spin density monotonicity", 180.0, criterion4},
        {"criterion-5 cluster one-sidedness", 60.0, criterion5},
        {"criterion-6 continuous flip invariance (KS)", 180.0, criterion6},
        {"criterion-7 width-mixture consistency", 120.0, criterion7},
        {"criterion-8 reversible-chain reflection", 1.0, criterion8},
        {"criterion-9a negative control: skewed site measure detected", 10.0, criterion9a},
        {"criterion-9b negative control: non-monotone potential detected", 60.0, criterion9b},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        CriterionOutcome outcome;
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_budget = seconds <= c.budget_seconds;
        const bool pass = outcome.pass && in_budget;
        if (!pass) ++failures;
        std::cout << (pass ? "PASS  " : "FAIL  ") << c.name << "  [" << outcome.detail << "; "
                  << seconds << " s" << (in_budget ? "" : " OVER BUDGET") << "]\n"
                  << std::flush;
    }
    if (failures) {
        std::cout << failures << " criteria failed\n";
        return 1;
    }
    std::cout << "all criteria passed\n";
    return 0;
}
