#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace clusterflip {

enum class Relation { le, ge, approx };

inline const char* relation_name(Relation r) {
    switch (r) {
        case Relation::le: return "<=";
        case Relation::ge: return ">=";
        case Relation::approx: return "~";
    }
    return "?";
}

// One check outcome. The tolerance policy is global and pre-registered:
// equality targets pass at |z| <= 4; inequality targets pass when the point
// estimate satisfies the relation, and a violation smaller than four
// standard errors is flagged inconclusive rather than failed or passed.
struct TestVerdict {
    std::string name;
    std::string claim;  // stable tag for the tested statement
    double estimate = std::numeric_limits<double>::quiet_NaN();
    double std_error = 0.0;
    double target = std::numeric_limits<double>::quiet_NaN();
    Relation relation = Relation::approx;
    double z = 0.0;
    bool pass = false;
    bool inconclusive = false;
    bool vacuous = false;
    std::string note;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
};

inline TestVerdict approx_verdict(std::string name, std::string claim, double estimate,
                                  double std_error, double target, std::size_t n_samples,
                                  std::uint64_t seed) {
    TestVerdict v;
    v.name = std::move(name);
    v.claim = std::move(claim);
    v.estimate = estimate;
    v.std_error = std_error;
    v.target = target;
    v.relation = Relation::approx;
    v.z = std_error > 0.0 ? (estimate - target) / std_error
                          : (estimate == target ? 0.0 : std::numeric_limits<double>::infinity());
    v.pass = std::abs(v.z) <= 4.0;
    v.n_samples = n_samples;
    v.seed = seed;
    return v;
}

inline TestVerdict bound_verdict(std::string name, std::string claim, double estimate,
                                 double std_error, Relation relation, double bound,
                                 std::size_t n_samples, std::uint64_t seed) {
    TestVerdict v;
    v.name = std::move(name);
    v.claim = std::move(claim);
    v.estimate = estimate;
    v.std_error = std_error;
    v.target = bound;
    v.relation = relation;
    v.z = std_error > 0.0 ? (estimate - bound) / std_error : 0.0;
    const bool satisfied = relation == Relation::le ? estimate <= bound : estimate >= bound;
    if (satisfied) {
        v.pass = true;
    } else if (std::abs(estimate - bound) < 4.0 * std_error) {
        v.inconclusive = true;  // violated within noise: flagged, never passed silently
    }
    v.n_samples = n_samples;
    v.seed = seed;
    return v;
}

// Exact (oracle) checks: a computed discrepancy against a hard tolerance.
inline TestVerdict exact_verdict(std::string name, std::string claim, double discrepancy,
                                 double tolerance, std::uint64_t seed = 0) {
    TestVerdict v;
    v.name = std::move(name);
    v.claim = std::move(claim);
    v.estimate = discrepancy;
    v.target = tolerance;
    v.relation = Relation::le;
    v.pass = discrepancy <= tolerance;
    v.seed = seed;
    return v;
}

inline bool all_pass(const std::vector<TestVerdict>& vs) {
    for (const auto& v : vs)
        if (!v.pass) return false;
    return true;
}

inline bool any_failed(const std::vector<TestVerdict>& vs) {
    for (const auto& v : vs)
        if (!v.pass && !v.inconclusive) return true;
    return false;
}

inline bool any_inconclusive(const std::vector<TestVerdict>& vs) {
    for (const auto& v : vs)
        if (v.inconclusive) return true;
    return false;
}

}  // namespace clusterflip
