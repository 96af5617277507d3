#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace clusterflip {

// Neumaier compensated summation; keeps enumeration normalizers accurate.
class NeumaierSum {
  public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

inline MeanStderr mean_stderr(const std::vector<double>& xs) {
    MeanStderr r;
    r.n = xs.size();
    if (xs.empty()) return r;
    NeumaierSum s;
    for (double x : xs) s.add(x);
    r.mean = s.value() / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        NeumaierSum v;
        for (double x : xs) v.add((x - r.mean) * (x - r.mean));
        r.stderr_ = std::sqrt(v.value() / (static_cast<double>(xs.size()) *
                                           static_cast<double>(xs.size() - 1)));
    }
    return r;
}

// Standard error of a suite estimate from per-replica means (batch means).
inline MeanStderr replica_mean_stderr(const std::vector<double>& replica_means) {
    return mean_stderr(replica_means);
}

inline double binomial_stderr(double p_hat, std::size_t n) {
    if (n == 0) return 0.0;
    return std::sqrt(std::max(p_hat * (1.0 - p_hat), 0.0) / static_cast<double>(n));
}

// Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} e^{-2 j^2 lambda^2}.
inline double kolmogorov_q(double lambda) {
    if (lambda < 1e-8) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 200; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
    double statistic = 0.0;  // sup |F1 - F2|
    double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov with the usual asymptotic p-value
// (Stephens' small-sample correction).
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    KsResult r;
    r.statistic = d;
    r.p_value = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
    return r;
}

// Weighted least-squares isotonic (non-decreasing) fit via pool adjacent
// violators.
inline std::vector<double> pava_non_decreasing(const std::vector<double>& y,
                                               const std::vector<double>& w) {
    if (y.size() != w.size()) throw std::invalid_argument("pava: size mismatch");
    struct Block {
        double value, weight;
        std::size_t count;
    };
    std::vector<Block> blocks;
    blocks.reserve(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        blocks.push_back({y[i], w[i], 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].value >= blocks.back().value) {
            const Block b = blocks.back();
            blocks.pop_back();
            Block& a = blocks.back();
            const double tw = a.weight + b.weight;
            a.value = tw > 0.0 ? (a.value * a.weight + b.value * b.weight) / tw : a.value;
            a.weight = tw;
            a.count += b.count;
        }
    }
    std::vector<double> fit;
    fit.reserve(y.size());
    for (const Block& b : blocks) fit.insert(fit.end(), b.count, b.value);
    return fit;
}

enum class Monotonicity { non_decreasing, non_increasing };

// Weighted L1 distance from a histogram-density estimate to its isotonic
// fit; the monotone fit itself is the weighted least-squares projection.
inline double isotonic_l1_distance(const std::vector<double>& density,
                                   const std::vector<double>& weights, Monotonicity direction) {
    std::vector<double> y = density;
    if (direction == Monotonicity::non_increasing) {
        for (double& v : y) v = -v;
    }
    const std::vector<double> fit = pava_non_decreasing(y, weights);
    double dist = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) dist += weights[i] * std::abs(y[i] - fit[i]);
    return dist;
}

// Normalized surface measure of the band {b : <b, e1> in [t0, t1]} on
// S^{n-1}: proportional to the integral of (1 - t^2)^{(n-3)/2}. Exact in
// closed form for n = 2, 3; Simpson quadrature on the half-angle
// substitution otherwise.
inline double sphere_band_mass(int n, double t0, double t1) {
    if (n < 2) throw std::invalid_argument("sphere_band_mass: need n >= 2");
    t0 = std::clamp(t0, -1.0, 1.0);
    t1 = std::clamp(t1, -1.0, 1.0);
    if (t1 <= t0) return 0.0;
    if (n == 2) return (std::asin(t1) - std::asin(t0)) / M_PI;
    if (n == 3) return 0.5 * (t1 - t0);
    // t = cos(theta): integral of sin(theta)^{n-2} dtheta, theta in
    // [acos(t1), acos(t0)], normalized by the full integral.
    auto integrand = [n](double theta) { return std::pow(std::sin(theta), n - 2); };
    auto simpson = [&](double a, double b) {
        const int steps = 2000;
        const double h = (b - a) / steps;
        double s = integrand(a) + integrand(b);
        for (int i = 1; i < steps; ++i) s += integrand(a + i * h) * (i % 2 ? 4.0 : 2.0);
        return s * h / 3.0;
    };
    return simpson(std::acos(t1), std::acos(t0)) / simpson(0.0, M_PI);
}

}  // namespace clusterflip
