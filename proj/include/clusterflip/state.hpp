#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "clusterflip/rng.hpp"

namespace clusterflip {

// Unit vector on the sphere S^{n-1}, n <= 8. Fixed inline storage keeps
// configurations contiguous and copyable without allocation.
struct SpinVec {
    static constexpr int max_dim = 8;

    std::array<double, max_dim> c{};
    std::uint8_t dim = 0;

    SpinVec() = default;
    explicit SpinVec(int n) : dim(static_cast<std::uint8_t>(n)) {
        if (n < 1 || n > max_dim) throw std::invalid_argument("SpinVec: dimension out of range");
    }

    static SpinVec e1(int n) {
        SpinVec v(n);
        v.c[0] = 1.0;
        return v;
    }

    double dot(const SpinVec& o) const {
        double s = 0.0;
        for (int i = 0; i < dim; ++i) s += c[i] * o.c[i];
        return s;
    }

    double norm() const { return std::sqrt(dot(*this)); }

    void normalize() {
        const double r = norm();
        for (int i = 0; i < dim; ++i) c[i] /= r;
    }

    bool operator==(const SpinVec& o) const {
        if (dim != o.dim) return false;
        for (int i = 0; i < dim; ++i)
            if (c[i] != o.c[i]) return false;
        return true;
    }
};

inline SpinVec sphere_uniform(Rng& rng, int n) {
    SpinVec v(n);
    for (;;) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            v.c[i] = rnorm(rng);
            s += v.c[i] * v.c[i];
        }
        if (s > 1e-12) {
            v.normalize();
            return v;
        }
    }
}

using DiscreteConfig = std::vector<int>;
using SurfaceConfig = std::vector<double>;
using SpinConfig = std::vector<SpinVec>;

template <class S>
using PairState = std::pair<S, S>;

}  // namespace clusterflip
