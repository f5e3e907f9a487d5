#include <doctest.h>

#include <cmath>

#include "bsq/assumptions.hpp"
#include "bsq/distributions.hpp"
#include "bsq/errors.hpp"
#include "bsq/generators.hpp"

using namespace bsq;

TEST_SUITE("assumptions") {

TEST_CASE("quantile density closed forms") {
    auto expd = exponential_distribution();
    auto id = identity_generator();
    for (double t : {0.5, 0.9, 0.99}) {
        // identity scale of the exponential: 1/(1-t)
        CHECK(l_gamma(expd, id, t) == doctest::Approx(1.0 / (1.0 - t)).epsilon(1e-13));
        // harmonic scale: 1/((1-t) ln^2(1-t))
        double lg = 1.0 / ((1.0 - t) * std::pow(std::log1p(-t), 2));
        CHECK(l_gamma(expd, harmonic_generator(), t) == doctest::Approx(lg).epsilon(1e-13));
    }
    for (double a : {0.5, 1.5, 2.5}) {
        auto par = pareto_distribution(a);
        for (double t : {0.5, 0.9, 0.99})
            // geometric scale of the pareto: 1/(a(1-t))
            CHECK(l_gamma(par, geometric_generator(), t) ==
                  doctest::Approx(1.0 / (a * (1.0 - t))).epsilon(1e-13));
    }
}

TEST_CASE("second derivative closed forms") {
    auto expd = exponential_distribution();
    auto id = identity_generator();
    for (double t : {0.5, 0.9, 0.99}) {
        // identity scale of the exponential: 1/(1-t)^2
        CHECK(big_l_gamma(expd, id, t) ==
              doctest::Approx(1.0 / std::pow(1.0 - t, 2)).epsilon(1e-13));
        // harmonic scale of the exponential: (ln^2(1-t) + 2 ln(1-t)) / ((1-t)^2 ln^4(1-t))
        double L = std::log1p(-t);
        double expect = (L * L + 2.0 * L) / (std::pow(1.0 - t, 2) * std::pow(L, 4));
        CHECK(big_l_gamma(expd, harmonic_generator(), t) ==
              doctest::Approx(expect).epsilon(1e-12));
    }
    for (double a : {0.5, 1.5, 2.5}) {
        auto par = pareto_distribution(a);
        for (double t : {0.5, 0.9, 0.99})
            // geometric scale of the pareto: 1/(a(1-t)^2)
            CHECK(big_l_gamma(par, geometric_generator(), t) ==
                  doctest::Approx(1.0 / (a * std::pow(1.0 - t, 2))).epsilon(1e-13));
    }
}

TEST_CASE("l matches the finite difference of the transformed quantile") {
    for (const char* dn : {"exp", "pareto:1.5", "uniform"}) {
        auto d = distribution_from_name(dn);
        for (const char* gn : {"identity", "geometric", "harmonic"}) {
            auto g = generator_from_name(gn);
            for (int k = 1; k <= 20; ++k) {
                double t = 1.0 - std::ldexp(1.0, -k); // 0.5 .. 1 - 2^-20
                double h = std::ldexp(1.0, -k) * 1e-4;
                double fd = (pushforward_quantile(d, g, t + h) -
                             pushforward_quantile(d, g, t - h)) /
                            (2.0 * h);
                CHECK(l_gamma(d, g, t) == doctest::Approx(fd).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("big L matches the finite difference of l") {
    for (const char* dn : {"exp", "pareto:2.5"}) {
        auto d = distribution_from_name(dn);
        for (const char* gn : {"identity", "geometric"}) {
            auto g = generator_from_name(gn);
            for (int k = 2; k <= 16; ++k) {
                double t = 1.0 - std::ldexp(1.0, -k);
                double h = std::ldexp(1.0, -k) * 1e-5;
                double fd = (l_gamma(d, g, t + h) - l_gamma(d, g, t - h)) / (2.0 * h);
                CHECK(big_l_gamma(d, g, t) == doctest::Approx(fd).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("capability errors for missing derivatives") {
    auto hc = half_cauchy_distribution(); // no density derivative
    CHECK_THROWS_AS(big_l_gamma(hc, identity_generator(), 0.9), CapabilityError);
    auto nothird = make_generator(
        "nothird", Interval{0.0, std::numeric_limits<double>::infinity()},
        [](double x) { return x * std::log(x) - x + 1.0; },
        [](double x) { return std::log(x); }, [](double x) { return 1.0 / x; });
    CHECK_THROWS_AS(big_l_gamma(exponential_distribution(), nothird, 0.9), CapabilityError);
}

TEST_CASE("tail exponent fits") {
    // exact power law
    TailFit f = fit_tail_exponent([](double t) { return 1.0 / (1.0 - t); });
    CHECK(!f.unstable);
    CHECK(f.slope == doctest::Approx(1.0).epsilon(0.01));

    // pareto(1.5) identity-scale first derivative: exponent 1 + 1/a
    auto par = pareto_distribution(1.5);
    auto id = identity_generator();
    TailFit fp = fit_tail_exponent([&](double t) { return l_gamma(par, id, t); });
    CHECK(fp.slope == doctest::Approx(1.0 + 1.0 / 1.5).epsilon(0.01));

    // exponential + harmonic: the log factor is absorbed, slope 1
    auto expd = exponential_distribution();
    TailFit fh =
        fit_tail_exponent([&](double t) { return l_gamma(expd, harmonic_generator(), t); });
    CHECK(!fh.unstable);
    CHECK(std::abs(fh.slope - 1.0) < 0.05);

    // super-polynomial growth is flagged unstable: quadratic in log scale
    TailFit fu = fit_tail_exponent(
        [](double t) { return std::exp(0.3 * std::pow(std::log1p(-t), 2)); });
    CHECK(fu.unstable);
    // growth fast enough to overflow is unstable as well, not an exception
    TailFit fo = fit_tail_exponent([](double t) { return std::exp(0.05 / (1.0 - t)); });
    CHECK(fo.unstable);
}

TEST_CASE("hypothesis table for the built-in families") {
    auto id = identity_generator();
    auto geo = geometric_generator();

    AssumptionReport e = check_assumptions(exponential_distribution(), id);
    CHECK(e.verdicts.at(Hypothesis::H3) == Verdict::Satisfied);
    CHECK(e.verdicts.at(Hypothesis::H4) == Verdict::Satisfied);
    CHECK(e.verdicts.at(Hypothesis::H1) == Verdict::Satisfied);
    CHECK(e.verdicts.at(Hypothesis::H2) == Verdict::Satisfied);

    AssumptionReport p05 = check_assumptions(pareto_distribution(0.5), id);
    CHECK(p05.verdicts.at(Hypothesis::H3) == Verdict::Violated);
    CHECK(p05.verdicts.at(Hypothesis::H4) == Verdict::Violated);

    AssumptionReport p15 = check_assumptions(pareto_distribution(1.5), id);
    CHECK(p15.verdicts.at(Hypothesis::H3) == Verdict::Satisfied);
    CHECK(p15.verdicts.at(Hypothesis::H4) == Verdict::Violated);

    AssumptionReport p25 = check_assumptions(pareto_distribution(2.5), id);
    CHECK(p25.verdicts.at(Hypothesis::H3) == Verdict::Satisfied);
    CHECK(p25.verdicts.at(Hypothesis::H4) == Verdict::Satisfied);

    for (double a : {0.5, 1.5, 2.5}) {
        AssumptionReport pg = check_assumptions(pareto_distribution(a), geo);
        CHECK(pg.verdicts.at(Hypothesis::H1) == Verdict::Satisfied);
        CHECK(pg.verdicts.at(Hypothesis::H2) == Verdict::Satisfied);
    }

    // exponential + harmonic keeps both scaled hypotheses
    AssumptionReport eh = check_assumptions(exponential_distribution(), harmonic_generator());
    CHECK(eh.verdicts.at(Hypothesis::H1) == Verdict::Satisfied);
    CHECK(eh.verdicts.at(Hypothesis::H2) == Verdict::Satisfied);
}

TEST_CASE("verdict boundaries flip at the critical tail indices") {
    auto id = identity_generator();
    // consistency (H3) flips across a = 1
    CHECK(check_assumptions(pareto_distribution(0.9), id).verdicts.at(Hypothesis::H3) ==
          Verdict::Violated);
    CHECK(check_assumptions(pareto_distribution(1.1), id).verdicts.at(Hypothesis::H3) ==
          Verdict::Satisfied);
    // normality (H4) flips across a = 2
    CHECK(check_assumptions(pareto_distribution(1.9), id).verdicts.at(Hypothesis::H4) ==
          Verdict::Violated);
    CHECK(check_assumptions(pareto_distribution(2.1), id).verdicts.at(Hypothesis::H4) ==
          Verdict::Satisfied);
    // sitting on the critical value is inconclusive, not a guess
    CHECK(check_assumptions(pareto_distribution(2.0), id).verdicts.at(Hypothesis::H4) ==
          Verdict::Inconclusive);
}

TEST_CASE("stronger hypotheses imply the weaker ones across the battery") {
    for (const char* dn : {"exp", "pareto:0.5", "pareto:1.5", "pareto:2.5", "uniform"}) {
        auto d = distribution_from_name(dn);
        for (const char* gn : {"identity", "geometric", "harmonic"}) {
            auto g = generator_from_name(gn);
            if (g.name() != "identity" && !g.domain().contains(d.support())) continue;
            AssumptionReport rep = check_assumptions(d, g);
            if (rep.verdicts.at(Hypothesis::H2) == Verdict::Satisfied)
                CHECK(rep.verdicts.at(Hypothesis::H1) == Verdict::Satisfied);
            if (rep.verdicts.at(Hypothesis::H4) == Verdict::Satisfied)
                CHECK(rep.verdicts.at(Hypothesis::H3) == Verdict::Satisfied);
        }
    }
}

TEST_CASE("missing derivatives surface as inapplicable") {
    AssumptionReport hc = check_assumptions(half_cauchy_distribution(), identity_generator());
    CHECK(hc.verdicts.at(Hypothesis::H4) == Verdict::Inapplicable); // no f'
    CHECK(hc.verdicts.at(Hypothesis::H3) != Verdict::Satisfied);   // infinite mean tail
}

} // TEST_SUITE
