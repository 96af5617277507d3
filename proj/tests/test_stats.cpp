#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "clusterflip/rng.hpp"
#include "clusterflip/stats.hpp"

using namespace clusterflip;

TEST_CASE("compensated summation") {
    NeumaierSum s;
    s.add(1.0);
    for (int i = 0; i < 1000000; ++i) s.add(1e-16);
    CHECK(s.value() == Catch::Approx(1.0 + 1e-10).epsilon(1e-12));
}

TEST_CASE("mean and standard error") {
    const MeanStderr r = mean_stderr({1.0, 2.0, 3.0, 4.0});
    CHECK(r.mean == Catch::Approx(2.5));
    // sample sd = sqrt(5/3); se = sd / 2
    CHECK(r.stderr_ == Catch::Approx(std::sqrt(5.0 / 3.0) / 2.0));
}

TEST_CASE("two-sample KS test") {
    Rng rng = make_rng(12);
    SECTION("identical samples give statistic zero") {
        std::vector<double> a(1000);
        for (auto& x : a) x = runif01(rng);
        const KsResult r = ks_two_sample(a, a);
        CHECK(r.statistic == 0.0);
        CHECK(r.p_value == 1.0);
    }
    SECTION("same distribution: rarely rejects at alpha = 1e-3") {
        int rejections = 0;
        for (int rep = 0; rep < 100; ++rep) {
            std::vector<double> a(2000), b(2000);
            for (auto& x : a) x = rnorm(rng);
            for (auto& x : b) x = rnorm(rng);
            if (ks_two_sample(a, b).p_value < 1e-3) ++rejections;
        }
        CHECK(rejections <= 1);
    }
    SECTION("shifted distribution: rejects decisively") {
        std::vector<double> a(5000), b(5000);
        for (auto& x : a) x = rnorm(rng);
        for (auto& x : b) x = rnorm(rng) + 0.5;
        CHECK(ks_two_sample(a, b).p_value < 1e-6);
    }
}

TEST_CASE("isotonic regression") {
    SECTION("monotone input has zero distance") {
        const std::vector<double> y{1.0, 2.0, 2.0, 3.5};
        const std::vector<double> w{1.0, 1.0, 1.0, 1.0};
        CHECK(isotonic_l1_distance(y, w, Monotonicity::non_decreasing) == 0.0);
        const std::vector<double> dec{3.0, 2.0, 1.0, 0.5};
        CHECK(isotonic_l1_distance(dec, w, Monotonicity::non_increasing) == 0.0);
    }
    SECTION("pava pools violators to the weighted mean") {
        const std::vector<double> fit = pava_non_decreasing({3.0, 1.0}, {1.0, 1.0});
        CHECK(fit[0] == Catch::Approx(2.0));
        CHECK(fit[1] == Catch::Approx(2.0));
    }
    SECTION("a clear dip is detected") {
        const std::vector<double> y{1.0, 4.0, 0.5, 5.0};
        const std::vector<double> w{1.0, 1.0, 1.0, 1.0};
        CHECK(isotonic_l1_distance(y, w, Monotonicity::non_decreasing) > 1.0);
    }
}

TEST_CASE("sphere band masses") {
    SECTION("n = 3 is uniform in the first coordinate") {
        CHECK(sphere_band_mass(3, -1.0, 1.0) == Catch::Approx(1.0));
        CHECK(sphere_band_mass(3, 0.0, 0.5) == Catch::Approx(0.25));
    }
    SECTION("n = 2 uses arc length") {
        CHECK(sphere_band_mass(2, -1.0, 1.0) == Catch::Approx(1.0));
        CHECK(sphere_band_mass(2, 0.0, 1.0) == Catch::Approx(0.5));
        CHECK(sphere_band_mass(2, 0.0, std::sin(M_PI / 6)) == Catch::Approx(1.0 / 6.0));
    }
    SECTION("general n integrates numerically and sums to one") {
        double total = 0.0;
        for (int i = 0; i < 10; ++i) {
            total += sphere_band_mass(5, -1.0 + 0.2 * i, -1.0 + 0.2 * (i + 1));
        }
        CHECK(total == Catch::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("seed splitting is stable and spreads") {
    CHECK(hash64(1, 0) != hash64(1, 1));
    CHECK(hash64(1, 0) != hash64(2, 0));
    CHECK(hash64(123, 7) == hash64(123, 7));
}
