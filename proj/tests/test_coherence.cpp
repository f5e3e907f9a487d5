#include <doctest.h>
#include <random>

#include <cmath>

#include "bsq/coherence.hpp"
#include "bsq/distributions.hpp"
#include "bsq/errors.hpp"
#include "bsq/generators.hpp"
#include "bsq/oracle.hpp"

using namespace bsq;

TEST_SUITE("coherence") {

TEST_CASE("constant invariance across generators") {
    CHECK(check_constant_invariance(geometric_generator(), 7.0, 0.95).verdict ==
          AxiomVerdict::Holds);
    CHECK(check_constant_invariance(harmonic_generator(), 0.5, 0.95).verdict ==
          AxiomVerdict::Holds);
    CHECK(check_constant_invariance(exp_generator(), 2.0, 0.95).verdict == AxiomVerdict::Holds);
    AxiomReport bad = check_constant_invariance(geometric_generator(), -1.0, 0.95);
    CHECK(bad.verdict == AxiomVerdict::Inconclusive);
    CHECK(!bad.note.empty());
}

TEST_CASE("constant invariance for many random constants") {
    std::mt19937_64 eng(2024);
    for (const char* gn : {"euclidean", "geometric", "harmonic", "power:0.5", "exp"}) {
        auto g = generator_from_name(gn);
        std::uniform_real_distribution<double> u(std::max(g.domain().lo + 0.05, -20.0),
                                                 std::min(g.domain().hi - 0.05, 20.0));
        for (int i = 0; i < 100; ++i) {
            AxiomReport r = check_constant_invariance(g, u(eng), 0.95);
            CHECK(r.verdict == AxiomVerdict::Holds);
        }
    }
}

TEST_CASE("homogeneity holds for power-curvature generators") {
    const double lambdas[] = {0.5, 2.0, 10.0};
    AxiomReport geo = check_homogeneity(geometric_generator(), pareto_distribution(1.5), 0.95,
                                        lambdas);
    CHECK(geo.verdict == AxiomVerdict::Holds);
    CHECK(geo.margin < 1e-8);

    AxiomReport pw = check_homogeneity(power_generator(-0.5), uniform01_distribution(), 0.95,
                                       lambdas);
    CHECK(pw.verdict == AxiomVerdict::Holds);

    AxiomReport euc = check_homogeneity(euclidean_generator(), exponential_distribution(), 0.95,
                                        lambdas);
    CHECK(euc.verdict == AxiomVerdict::Holds);
}

TEST_CASE("homogeneity fails for the exp generator with the published ratio") {
    const double lambdas[] = {4.0};
    AxiomReport r =
        check_homogeneity(exp_generator(), uniform01_distribution(), 0.95, lambdas);
    CHECK(r.verdict == AxiomVerdict::Fails);
    // quadrature value of R(4X)/(4R(X)); frozen from the closed form
    CHECK(r.witness.at("ratio") == doctest::Approx(1.0003203384629605).epsilon(1e-9));
}

TEST_CASE("failing homogeneity witnesses replay to a violation") {
    const double lambdas[] = {4.0};
    AxiomReport r =
        check_homogeneity(exp_generator(), uniform01_distribution(), 0.95, lambdas);
    REQUIRE(r.verdict == AxiomVerdict::Fails);
    double lam = r.witness.at("lambda");
    double lhs = oracle::true_bregman_superquantile(scaled(uniform01_distribution(), lam),
                                                    exp_generator(), 0.95);
    double rhs =
        lam * oracle::true_bregman_superquantile(uniform01_distribution(), exp_generator(), 0.95);
    CHECK(lhs == doctest::Approx(r.witness.at("lhs")).epsilon(1e-12));
    CHECK(rhs == doctest::Approx(r.witness.at("rhs")).epsilon(1e-12));
    CHECK(std::abs(lhs - rhs) / std::abs(rhs) > 1e-8);
}

TEST_CASE("subadditivity counter-example via exact comonotone reduction") {
    AxiomReport r = check_subadditivity(exp_generator(), comonotone_pair(uniform01_distribution()),
                                        0.95, 0, 1);
    CHECK(r.mode == CheckMode::Oracle);
    CHECK(r.verdict == AxiomVerdict::Fails);
    // gap R(2X) - 2R(X); frozen from the closed form e - e^alpha integrals
    CHECK(r.witness.at("gap") == doctest::Approx(0.00020830295672709437).epsilon(1e-8));
}

TEST_CASE("classical superquantile is subadditive for independent pairs") {
    AxiomReport r = check_subadditivity(
        euclidean_generator(),
        independent_pair(exponential_distribution(), exponential_distribution()), 0.95, 200000,
        77);
    CHECK(r.mode == CheckMode::MonteCarlo);
    CHECK(r.verdict == AxiomVerdict::Holds);
}

TEST_CASE("geometric generator is subadditive above the unit threshold") {
    AxiomReport r = check_subadditivity(
        geometric_generator(), independent_pair(pareto_distribution(2.5), pareto_distribution(1.5)),
        0.95, 200000, 78);
    CHECK(r.verdict == AxiomVerdict::Holds);
    CHECK(r.witness.at("min_alpha_quantile") > 1.0);
}

TEST_CASE("unit-threshold precondition is reported, not assumed") {
    // uniform data sits below 1: the geometric claim does not apply
    AxiomReport r = check_subadditivity(geometric_generator(),
                                        comonotone_pair(uniform01_distribution()), 0.95, 0, 79);
    CHECK(r.verdict == AxiomVerdict::Inconclusive);
    CHECK(r.witness.at("min_alpha_quantile") <= 1.0);
}

TEST_CASE("negative values push positive-domain generators to inconclusive") {
    // -X for an exponential X: support on the negative axis
    AnalyticDistribution neg(
        "neg-exp", Interval{-std::numeric_limits<double>::infinity(), 0.0},
        [](double x) { return std::exp(x); },
        [](double u) { return std::log1p(-u); },
        [](double x) { return std::exp(x); }, nullptr);
    AxiomReport r = check_subadditivity(geometric_generator(),
                                        independent_pair(exponential_distribution(), neg), 0.95,
                                        2000, 80);
    CHECK(r.verdict == AxiomVerdict::Inconclusive);
}

TEST_CASE("comonotone duplication is exactly additive for homogeneous generators") {
    AxiomReport r = check_subadditivity(harmonic_generator(),
                                        comonotone_pair(exponential_distribution()), 0.95, 0, 81);
    CHECK(r.mode == CheckMode::Oracle);
    CHECK(r.verdict == AxiomVerdict::Holds);
    CHECK(std::abs(r.witness.at("gap")) < 1e-10);
}

TEST_CASE("monotonicity through quantile dominance") {
    // pareto tails get heavier as a decreases
    AxiomReport r = check_monotonicity(geometric_generator(), pareto_distribution(2.5),
                                       pareto_distribution(1.5), 0.95);
    CHECK(r.verdict == AxiomVerdict::Holds);

    AxiomReport eq = check_monotonicity(geometric_generator(), pareto_distribution(1.5),
                                        pareto_distribution(1.5), 0.95);
    CHECK(eq.verdict == AxiomVerdict::Holds);
    CHECK(std::abs(eq.witness.at("gap")) < 1e-12);

    AxiomReport sh = check_monotonicity(euclidean_generator(), exponential_distribution(),
                                        shifted(exponential_distribution(), 1.0), 0.95);
    CHECK(sh.verdict == AxiomVerdict::Holds);
    CHECK(sh.witness.at("gap") == doctest::Approx(-1.0).epsilon(1e-9));

    // dominance precondition violated: inconclusive
    AxiomReport pre = check_monotonicity(euclidean_generator(),
                                         shifted(exponential_distribution(), 1.0),
                                         exponential_distribution(), 0.95);
    CHECK(pre.verdict == AxiomVerdict::Inconclusive);
}

TEST_CASE("closeness: shifts, scalings, and bounded noise") {
    AxiomReport sh = check_closeness(euclidean_generator(), exponential_distribution(), {}, 0.95);
    CHECK(sh.verdict == AxiomVerdict::Holds);
    // euclidean + shift: the gap equals h itself
    CHECK(sh.witness.at("gap_h=2^-0") == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sh.witness.at("gap_h=2^-6") == doctest::Approx(1.0 / 64).epsilon(1e-8));

    PerturbationFamily scale_family;
    scale_family.kind = PerturbationFamily::Kind::Scale;
    AxiomReport sc =
        check_closeness(geometric_generator(), pareto_distribution(1.5), scale_family, 0.95);
    CHECK(sc.verdict == AxiomVerdict::Holds);

    PerturbationFamily noise_family;
    noise_family.kind = PerturbationFamily::Kind::Noise;
    noise_family.mc_n = 100000;
    AxiomReport nz = check_closeness(harmonic_generator(), shifted(exponential_distribution(), 1.0),
                                     noise_family, 0.95);
    CHECK(nz.verdict == AxiomVerdict::Holds);
}

TEST_CASE("euclidean generator satisfies every axiom on light-tailed inputs") {
    const double lambdas[] = {0.5, 2.0, 10.0};
    for (const char* dn : {"exp", "uniform", "pareto:2.5"}) {
        auto d = distribution_from_name(dn);
        CHECK(check_constant_invariance(euclidean_generator(), 3.0, 0.95).verdict ==
              AxiomVerdict::Holds);
        CHECK(check_homogeneity(euclidean_generator(), d, 0.95, lambdas).verdict ==
              AxiomVerdict::Holds);
        CHECK(check_subadditivity(euclidean_generator(), comonotone_pair(d), 0.95, 0, 5).verdict ==
              AxiomVerdict::Holds);
        CHECK(check_subadditivity(euclidean_generator(), independent_pair(d, d), 0.95, 100000, 6)
                  .verdict == AxiomVerdict::Holds);
        CHECK(check_monotonicity(euclidean_generator(), d, shifted(d, 0.5), 0.95).verdict ==
              AxiomVerdict::Holds);
        CHECK(check_closeness(euclidean_generator(), d, {}, 0.95).verdict == AxiomVerdict::Holds);
    }
}

TEST_CASE("checks are deterministic given the seed") {
    auto run = [] {
        return check_subadditivity(
            euclidean_generator(),
            independent_pair(exponential_distribution(), exponential_distribution()), 0.95, 50000,
            123);
    };
    AxiomReport a = run(), b = run();
    CHECK(a.witness.at("mean_gap") == b.witness.at("mean_gap"));
    CHECK(a.witness.at("se") == b.witness.at("se"));
}

TEST_CASE("battery produces a report per scenario with json output") {
    auto reports = coherence_battery(0.95, 99);
    CHECK(reports.size() >= 15);
    int fails = 0;
    for (const auto& r : reports) {
        CHECK(!r.to_json().empty());
        if (r.verdict == AxiomVerdict::Fails) {
            ++fails;
            CHECK(r.generator == "exp"); // only the counter-example scenarios fail
        }
    }
    CHECK(fails == 2); // homogeneity and subadditivity of the exp generator
}

} // TEST_SUITE
