#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bsq/errors.hpp"
#include "bsq/generators.hpp"

using namespace bsq;

namespace {

std::vector<BregmanGenerator> builtin_generators() {
    std::vector<BregmanGenerator> gs;
    gs.push_back(euclidean_generator());
    gs.push_back(geometric_generator());
    gs.push_back(harmonic_generator());
    gs.push_back(power_generator(0.5));
    gs.push_back(power_generator(-0.5));
    gs.push_back(exp_generator());
    gs.push_back(identity_generator());
    return gs;
}

// Random point strictly inside the generator domain, clipped to a range where
// every built-in family is well behaved.
double random_domain_point(const BregmanGenerator& g, std::mt19937_64& eng) {
    double lo = std::max(g.domain().lo, -20.0);
    double hi = std::min(g.domain().hi, 20.0);
    std::uniform_real_distribution<double> u(lo + 1e-3, hi - 1e-3);
    return u(eng);
}

} // namespace

TEST_SUITE("generators") {

TEST_CASE("divergence closed forms") {
    // euclidean: (x - x0)^2
    CHECK(divergence(euclidean_generator(), 3.0, 1.0) == doctest::Approx(4.0).epsilon(1e-14));
    // identity of indiscernibles, exactly zero in floating point
    for (const auto& g : builtin_generators()) {
        double x = g.domain().contains(2.0) ? 2.0 : 0.5;
        CHECK(divergence(g, x, x) == 0.0);
    }
    // geometric at (2,1): 2 ln 2 - 1
    CHECK(divergence(geometric_generator(), 2.0, 1.0) ==
          doctest::Approx(0.38629436111989062).epsilon(1e-14));
    // cross-check against the x ln(x/x0) + x0 - x form
    double direct = 2.0 * std::log(2.0 / 1.0) + 1.0 - 2.0;
    CHECK(divergence(geometric_generator(), 2.0, 1.0) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("divergence domain errors name the argument") {
    auto geo = geometric_generator();
    CHECK_THROWS_WITH_AS(divergence(geo, -1.0, 1.0), doctest::Contains("argument x"), DomainError);
    CHECK_THROWS_WITH_AS(divergence(geo, 1.0, -1.0), doctest::Contains("argument x0"),
                         DomainError);
}

TEST_CASE("divergence positive for distinct arguments") {
    std::mt19937_64 eng(42);
    for (const auto& g : builtin_generators()) {
        int bad = 0;
        for (int i = 0; i < 10000; ++i) {
            double x = random_domain_point(g, eng);
            double x0 = random_domain_point(g, eng);
            if (x == x0) continue;
            if (!(divergence(g, x, x0) > 0.0)) ++bad;
        }
        CHECK(bad == 0);
    }
}

TEST_CASE("bregman mean closed forms") {
    std::vector<WeightedPoint> ab = {{0.5, 1.0}, {0.5, 3.0}};
    CHECK(bregman_mean(euclidean_generator(), ab) == doctest::Approx(2.0).epsilon(1e-14));
    // geometric mean sqrt(1*4) = 2 (oracle: exp of the mean log)
    std::vector<WeightedPoint> geo = {{0.5, 1.0}, {0.5, 4.0}};
    double log_mean = std::exp(0.5 * std::log(1.0) + 0.5 * std::log(4.0));
    CHECK(bregman_mean(geometric_generator(), geo) == doctest::Approx(log_mean).epsilon(1e-14));
    CHECK(bregman_mean(geometric_generator(), geo) == doctest::Approx(2.0).epsilon(1e-14));
    // harmonic mean 2/(1 + 1/3) = 1.5 (oracle: reciprocal of mean reciprocal)
    double rec_mean = 1.0 / (0.5 * (1.0 / 1.0) + 0.5 * (1.0 / 3.0));
    CHECK(bregman_mean(harmonic_generator(), ab) == doctest::Approx(rec_mean).epsilon(1e-14));
    CHECK(bregman_mean(harmonic_generator(), ab) == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("bregman mean input guards") {
    CHECK_THROWS_AS(bregman_mean(euclidean_generator(), {}), EmptyInput);
    std::vector<WeightedPoint> bad = {{0.4, 1.0}, {0.5, 3.0}};
    CHECK_THROWS_AS(bregman_mean(euclidean_generator(), bad), InvalidWeights);
    std::vector<WeightedPoint> neg = {{0.5, -1.0}, {0.5, 3.0}};
    CHECK_THROWS_AS(bregman_mean(geometric_generator(), neg), DomainError);
}

TEST_CASE("bregman mean stays between the extremes") {
    std::mt19937_64 eng(7);
    std::uniform_real_distribution<double> uw(0.01, 1.0);
    for (const auto& g : builtin_generators()) {
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<WeightedPoint> pts(5);
            double wsum = 0.0;
            double lo = 1e300, hi = -1e300;
            for (auto& wp : pts) {
                wp.weight = uw(eng);
                wsum += wp.weight;
                wp.point = random_domain_point(g, eng);
                lo = std::min(lo, wp.point);
                hi = std::max(hi, wp.point);
            }
            for (auto& wp : pts) wp.weight /= wsum;
            double total = 0.0;
            for (const auto& wp : pts) total += wp.weight;
            pts.back().weight += 1.0 - total; // kill the renormalization ulp
            double b = bregman_mean(g, pts);
            CHECK(b >= lo);
            CHECK(b <= hi);
        }
    }
}

TEST_CASE("power(0) reproduces the arithmetic mean") {
    // gamma''(x) = x^0: gamma' is affine, so the mean map is the plain mean.
    auto p0 = power_generator(0.0);
    std::mt19937_64 eng(11);
    std::uniform_real_distribution<double> ux(0.1, 10.0);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<WeightedPoint> pts(4);
        double wsum = 0.0;
        for (auto& wp : pts) {
            wp.weight = 0.25;
            wp.point = ux(eng);
            wsum += wp.weight * wp.point;
        }
        CHECK(bregman_mean(p0, pts) == doctest::Approx(wsum).epsilon(1e-12));
    }
}

TEST_CASE("affine rescaling of gamma' leaves the mean unchanged") {
    // replace gamma' by a*gamma' + b with a > 0: the mean map is invariant
    const double a = 2.5, b = -0.7;
    auto base = geometric_generator();
    auto affine = make_generator(
        "geometric-affine", base.domain(),
        [=](double x) { return a * (x * std::log(x) - x + 1.0) + b * x; },
        [=](double x) { return a * std::log(x) + b; },
        [=](double x) { return a / x; }, nullptr,
        [=](double y) { return std::exp((y - b) / a); });
    std::vector<WeightedPoint> pts = {{0.3, 0.5}, {0.25, 2.0}, {0.45, 7.0}};
    CHECK(bregman_mean(affine, pts) == doctest::Approx(bregman_mean(base, pts)).epsilon(1e-12));
}

TEST_CASE("built-in generators pass the validation grid") {
    for (const auto& g : builtin_generators()) CHECK_NOTHROW(validate_generator(g));
}

TEST_CASE("inverse of gamma' round-trips on a domain grid") {
    for (const auto& g : builtin_generators()) {
        double lo = std::max(g.domain().lo, -30.0);
        double hi = std::min(g.domain().hi, 30.0);
        for (int i = 1; i < 100; ++i) {
            double x = lo + (hi - lo) * i / 100.0;
            if (!g.domain().contains(x)) continue;
            CHECK(g.gamma_p_inv(g.gamma_p(x)) == doctest::Approx(x).epsilon(1e-12));
        }
    }
}

TEST_CASE("power(-1) and power(-2) degenerate to geometric and harmonic") {
    CHECK(power_generator(-1.0).name() == "geometric");
    CHECK(power_generator(-2.0).name() == "harmonic");
    CHECK(power_generator(-2.0).gamma_p(3.0) ==
          doctest::Approx(harmonic_generator().gamma_p(3.0)).epsilon(1e-15));
}

TEST_CASE("power family has gamma''(x) = x^beta") {
    for (double beta : {-0.5, 0.0, 0.5, 1.0, 2.0}) {
        auto g = power_generator(beta);
        for (double x : {0.3, 1.0, 2.5, 9.0})
            CHECK(g.gamma_pp(x) == doctest::Approx(std::pow(x, beta)).epsilon(1e-14));
    }
}

TEST_CASE("bisection inverse for a user generator without closed form") {
    // gamma(x) = x^4/4 on R: gamma'(x) = x^3, true inverse cbrt
    auto quartic = make_generator(
        "quartic", Interval{}, [](double x) { return 0.25 * x * x * x * x; },
        [](double x) { return x * x * x; }, [](double x) { return 3.0 * x * x; });
    for (double y : {-27.0, -1.0, -0.125, 0.125, 1.0, 8.0, 1000.0}) {
        CHECK(quartic.gamma_p_inv(y) == doctest::Approx(std::cbrt(y)).epsilon(1e-10));
    }
}

TEST_CASE("inversion range errors") {
    CHECK_THROWS_AS(harmonic_generator().gamma_p_inv(1.5), InversionError);
    CHECK_THROWS_AS(exp_generator().gamma_p_inv(-0.5), InversionError);
    CHECK_THROWS_AS(power_generator(0.5).gamma_p_inv(-10.0), InversionError);
}

TEST_CASE("gamma''' is optional and fails loudly when missing") {
    auto nothird = make_generator(
        "nothird", Interval{0.0, std::numeric_limits<double>::infinity()},
        [](double x) { return x * std::log(x) - x + 1.0; },
        [](double x) { return std::log(x); }, [](double x) { return 1.0 / x; });
    CHECK(!nothird.has_gamma_ppp());
    CHECK_THROWS_AS(nothird.gamma_ppp(2.0), CapabilityError);
    CHECK(geometric_generator().has_gamma_ppp());
}

TEST_CASE("domain endpoints are exclusive") {
    CHECK_THROWS_AS(geometric_generator().gamma_p(0.0), DomainError);
    CHECK_THROWS_AS(harmonic_generator().gamma(0.0), DomainError);
}

TEST_CASE("generator name parsing") {
    CHECK(generator_from_name("euclidean").name() == "euclidean");
    CHECK(generator_from_name("power:0.5").name() == "power:0.5");
    CHECK(generator_from_name("power:-0.5").gamma_pp(4.0) == doctest::Approx(0.5));
    CHECK(generator_from_name("identity").gamma_p(3.25) == 3.25);
    CHECK_THROWS_AS(generator_from_name("powerhouse"), ParseError);
    CHECK_THROWS_AS(generator_from_name("power:abc"), ParseError);
}

} // TEST_SUITE
