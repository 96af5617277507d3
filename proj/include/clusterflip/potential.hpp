#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clusterflip {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Symmetric gradient potential U: R -> (-inf, +inf]. The function is stored
// on [0, inf) and evaluated at |x|, which makes U(x) = U(-x) literal rather
// than probed. Declared flags are spot-verified on a grid at construction;
// full verification of a black-box callable is impossible, so the grid check
// is the trust boundary.
class Potential {
  public:
    struct Traits {
        bool monotone = false;          // U(x) <= U(y) for 0 <= x <= y
        bool lipschitz_support = false; // U = +inf beyond support_radius = 1
        bool convex = false;
        bool finiteness_attested = false; // caller vouches for a finite normalizer
    };

    Potential() = default;

    Potential(std::string name, std::function<double(double)> on_half_line, Traits traits,
              double support_radius = kInf, bool flat_on_support = false)
        : name_(std::move(name)),
          f_(std::move(on_half_line)),
          traits_(traits),
          support_radius_(support_radius),
          flat_(flat_on_support) {
        validate();
    }

    double operator()(double x) const { return f_(std::abs(x)); }

    const std::string& name() const { return name_; }
    bool is_monotone() const { return traits_.monotone; }
    bool is_lipschitz_support() const { return traits_.lipschitz_support; }
    bool is_convex() const { return traits_.convex; }
    bool finiteness_attested() const { return traits_.finiteness_attested; }

    // sup{x >= 0 : U(x) < inf}; +inf when the support is unbounded.
    double support_radius() const { return support_radius_; }
    // U constant on [0, support_radius): uniform ("hammock") interaction.
    bool flat_on_support() const { return flat_; }
    double at_zero() const { return at_zero_; }
    // Grid minimum over the support; used for rejection-sampling envelopes.
    double min_on_support() const { return min_on_support_; }

    static Potential hammock() {
        return Potential("hammock", [](double x) { return x <= 1.0 ? 0.0 : kInf; },
                         {.monotone = true, .lipschitz_support = true, .convex = true}, 1.0, true);
    }

    // Hammock with edge-specific half-width t: U = 0 on [-t, t], +inf beyond.
    static Potential hammock_radius(double t) {
        if (!(t > 0.0)) throw std::invalid_argument("hammock_radius: need t > 0");
        return Potential("hammock_radius", [t](double x) { return x <= t ? 0.0 : kInf; },
                         {.monotone = true, .lipschitz_support = t <= 1.0, .convex = true}, t,
                         true);
    }

    static Potential quadratic_lipschitz() {
        return Potential("quadratic_lipschitz",
                         [](double x) { return x <= 1.0 ? x * x : kInf; },
                         {.monotone = true, .lipschitz_support = true, .convex = true}, 1.0, false);
    }

    // Unbounded-support x^2; usable only because its normalizer is known
    // finite (Gaussian tails), which the caller attests by choosing it.
    static Potential quadratic() {
        return Potential("quadratic", [](double x) { return x * x; },
                         {.monotone = true, .convex = true, .finiteness_attested = true});
    }

    // Two-column (x, U) table with linear interpolation. Values are clamped
    // to be non-decreasing in |x| (sorted clamp), and the potential is +inf
    // beyond the last tabulated |x|.
    static Potential from_table(std::vector<std::pair<double, double>> table,
                                std::string name = "tabulated") {
        if (table.empty()) throw std::invalid_argument("tabulated potential: empty table");
        for (auto& [x, u] : table) x = std::abs(x);
        std::sort(table.begin(), table.end());
        std::vector<double> xs, us;
        for (const auto& [x, u] : table) {
            if (!xs.empty() && x == xs.back()) continue;
            xs.push_back(x);
            us.push_back(u);
        }
        if (xs.front() > 0.0) {
            xs.insert(xs.begin(), 0.0);
            us.insert(us.begin(), us.front());
        }
        for (std::size_t i = 1; i < us.size(); ++i) us[i] = std::max(us[i], us[i - 1]);
        const double radius = xs.back();
        auto eval = [xs = std::move(xs), us = std::move(us)](double x) {
            if (x > xs.back()) return kInf;
            auto it = std::lower_bound(xs.begin(), xs.end(), x);
            const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
            if (hi == 0 || xs[hi] == x) return us[hi];
            const std::size_t lo = hi - 1;
            const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
            return us[lo] + w * (us[hi] - us[lo]);
        };
        return Potential(std::move(name), std::move(eval),
                         {.monotone = true, .lipschitz_support = radius <= 1.0}, radius, false);
    }

    static Potential from_csv(const std::string& path, std::string name = "") {
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("tabulated potential: cannot open " + path);
        std::vector<std::pair<double, double>> table;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line[0] == '#') continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ss(line);
            double x, u;
            if (ss >> x >> u) table.push_back({x, u});
        }
        return from_table(std::move(table), name.empty() ? "csv:" + path : std::move(name));
    }

  private:
    void validate() const {
        constexpr double step = 1e-3;
        if (!std::isfinite(at_zero_even_probe()))
            throw std::invalid_argument("potential '" + name_ + "': U(0) must be finite");
        double prev = f_(0.0);
        double minv = prev;
        bool finite_somewhere = std::isfinite(prev);
        for (double x = step; x <= 3.0 + step / 2; x += step) {
            const double u = f_(x);
            if (u < prev - 1e-12 && traits_.monotone)
                throw std::invalid_argument("potential '" + name_ +
                                            "': declared monotone but decreases near x=" +
                                            std::to_string(x));
            if (traits_.lipschitz_support && x > 1.0 && std::isfinite(u))
                throw std::invalid_argument("potential '" + name_ +
                                            "': declared Lipschitz-support but finite at x=" +
                                            std::to_string(x));
            finite_somewhere = finite_somewhere || std::isfinite(u);
            if (x <= support_radius_) minv = std::min(minv, u);
            prev = std::max(prev, u);
        }
        if (!finite_somewhere)
            throw std::invalid_argument("potential '" + name_ + "': infinite on the probe grid");
        if (minv == -kInf)
            throw std::invalid_argument("potential '" + name_ +
                                        "': unbounded below (edge weights must stay finite)");
        at_zero_ = f_(0.0);
        min_on_support_ = minv;
        if (!std::isfinite(support_radius_) && !traits_.finiteness_attested)
            throw std::invalid_argument("potential '" + name_ +
                                        "': unbounded support requires finiteness attestation");
    }

    double at_zero_even_probe() const { return f_(0.0); }

    std::string name_;
    std::function<double(double)> f_;
    Traits traits_;
    double support_radius_ = kInf;
    bool flat_ = false;
    mutable double at_zero_ = 0.0;
    mutable double min_on_support_ = 0.0;
};

// Spin interaction potential U: [-1, 1] -> (-inf, +inf], applied to the
// inner product of neighboring unit vectors.
class SpinPotential {
  public:
    SpinPotential() = default;

    SpinPotential(std::string name, std::function<double(double)> f, bool non_increasing)
        : name_(std::move(name)), f_(std::move(f)), non_increasing_(non_increasing) {
        validate();
    }

    double operator()(double r) const { return f_(r); }
    const std::string& name() const { return name_; }
    bool is_non_increasing() const { return non_increasing_; }
    double min_value() const { return min_value_; }

    // The standard model: U(r) = -beta * r.
    static SpinPotential linear(double beta) {
        if (!std::isfinite(beta)) throw std::invalid_argument("linear spin potential: bad beta");
        return SpinPotential("linear_spin(" + std::to_string(beta) + ")",
                             [beta](double r) { return -beta * r; }, beta >= 0.0);
    }

  private:
    void validate() const {
        constexpr double step = 1e-3;
        double prev = f_(-1.0);
        double minv = prev;
        bool finite_somewhere = std::isfinite(prev);
        for (double r = -1.0 + step; r <= 1.0 + step / 2; r += step) {
            const double u = f_(std::min(r, 1.0));
            if (non_increasing_ && u > prev + 1e-12)
                throw std::invalid_argument("spin potential '" + name_ +
                                            "': declared non-increasing but increases");
            finite_somewhere = finite_somewhere || std::isfinite(u);
            minv = std::min(minv, u);
            prev = std::min(prev, u);
        }
        if (!finite_somewhere)
            throw std::invalid_argument("spin potential '" + name_ + "': infinite on [-1,1]");
        if (!std::isfinite(minv))
            throw std::invalid_argument("spin potential '" + name_ + "': unbounded below");
        min_value_ = minv;
    }

    std::string name_;
    std::function<double(double)> f_;
    bool non_increasing_ = false;
    mutable double min_value_ = 0.0;
};

}  // namespace clusterflip
