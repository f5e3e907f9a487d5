#include "bsq/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <utility>

#include "bsq/errors.hpp"

namespace bsq {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

} // namespace

BregmanGenerator::BregmanGenerator(std::string name, Interval domain, Fn gamma, Fn gamma_p,
                                   Fn gamma_pp, Fn gamma_ppp, Fn gamma_p_inv)
    : name_(std::move(name)),
      domain_(domain),
      gamma_(std::move(gamma)),
      gamma_p_(std::move(gamma_p)),
      gamma_pp_(std::move(gamma_pp)),
      gamma_ppp_(std::move(gamma_ppp)),
      gamma_p_inv_(std::move(gamma_p_inv)) {}

void BregmanGenerator::require_in_domain(double x, const char* arg) const {
    if (!domain_.contains(x))
        throw DomainError("generator '" + name_ + "': argument " + arg + " = " + fmt_double(x) +
                          " outside open domain (" + fmt_double(domain_.lo) + ", " +
                          fmt_double(domain_.hi) + ")");
}

double BregmanGenerator::gamma(double x) const {
    require_in_domain(x, "x");
    return gamma_(x);
}

double BregmanGenerator::gamma_p(double x) const {
    require_in_domain(x, "x");
    return gamma_p_(x);
}

double BregmanGenerator::gamma_pp(double x) const {
    require_in_domain(x, "x");
    return gamma_pp_(x);
}

double BregmanGenerator::gamma_ppp(double x) const {
    if (!gamma_ppp_)
        throw CapabilityError("generator '" + name_ + "': gamma''' not available");
    require_in_domain(x, "x");
    return gamma_ppp_(x);
}

double BregmanGenerator::gamma_p_inv(double y) const {
    return gamma_p_inv_(y);
}

BregmanGenerator euclidean_generator() {
    return BregmanGenerator(
        "euclidean", Interval{},
        [](double x) { return x * x; },
        [](double x) { return 2.0 * x; },
        [](double) { return 2.0; },
        [](double) { return 0.0; },
        [](double y) { return 0.5 * y; });
}

BregmanGenerator geometric_generator() {
    return BregmanGenerator(
        "geometric", Interval{0.0, std::numeric_limits<double>::infinity()},
        [](double x) { return x * std::log(x) - x + 1.0; },
        [](double x) { return std::log(x); },
        [](double x) { return 1.0 / x; },
        [](double x) { return -1.0 / (x * x); },
        [](double y) { return std::exp(y); });
}

BregmanGenerator harmonic_generator() {
    return BregmanGenerator(
        "harmonic", Interval{0.0, std::numeric_limits<double>::infinity()},
        [](double x) { return -std::log(x) + x - 1.0; },
        [](double x) { return (x - 1.0) / x; },
        [](double x) { return 1.0 / (x * x); },
        [](double x) { return -2.0 / (x * x * x); },
        [](double y) {
            if (y >= 1.0)
                throw InversionError("harmonic generator: gamma' ranges over (-inf, 1), got " +
                                     fmt_double(y));
            return 1.0 / (1.0 - y);
        });
}

BregmanGenerator exp_generator() {
    return BregmanGenerator(
        "exp", Interval{},
        [](double x) { return std::exp(x); },
        [](double x) { return std::exp(x); },
        [](double x) { return std::exp(x); },
        [](double x) { return std::exp(x); },
        [](double y) {
            if (y <= 0.0)
                throw InversionError("exp generator: gamma' ranges over (0, inf), got " +
                                     fmt_double(y));
            return std::log(y);
        });
}

BregmanGenerator identity_generator() {
    return BregmanGenerator(
        "identity", Interval{},
        [](double x) { return 0.5 * x * x; },
        [](double x) { return x; },
        [](double) { return 1.0; },
        [](double) { return 0.0; },
        [](double y) { return y; });
}

BregmanGenerator power_generator(double beta) {
    if (!std::isfinite(beta))
        throw DomainError("power generator: beta must be finite");
    if (beta == -1.0) return geometric_generator(); // continuous limit of the family
    if (beta == -2.0) return harmonic_generator();  // gamma'(x) = 1 - 1/x

    std::string name = "power:" + fmt_double(beta);
    const double bp1 = beta + 1.0;
    const double bp2 = beta + 2.0;
    return BregmanGenerator(
        std::move(name), Interval{0.0, std::numeric_limits<double>::infinity()},
        [bp1, bp2](double x) {
            return (std::pow(x, bp2) - 1.0) / (bp1 * bp2) - (x - 1.0) / bp1;
        },
        [bp1](double x) { return (std::pow(x, bp1) - 1.0) / bp1; },
        [beta](double x) { return std::pow(x, beta); },
        [beta](double x) { return beta * std::pow(x, beta - 1.0); },
        [bp1](double y) {
            double t = 1.0 + bp1 * y;
            if (t <= 0.0)
                throw InversionError("power generator: value outside range of gamma'");
            return std::pow(t, 1.0 / bp1);
        });
}

BregmanGenerator make_generator(std::string name, Interval domain, BregmanGenerator::Fn gamma,
                                BregmanGenerator::Fn gamma_p, BregmanGenerator::Fn gamma_pp,
                                BregmanGenerator::Fn gamma_ppp,
                                BregmanGenerator::Fn gamma_p_inv) {
    if (!gamma || !gamma_p || !gamma_pp)
        throw ValidationError("make_generator: gamma, gamma' and gamma'' are required");
    if (!gamma_p_inv) {
        // Bisection inverse of the strictly increasing gamma'. Brackets are
        // grown geometrically from an interior point and clipped to the open
        // domain.
        BregmanGenerator::Fn gp = gamma_p;
        Interval dom = domain;
        gamma_p_inv = [gp, dom](double y) {
            const double tol = 1e-12;
            const int max_iter = 200;
            double lo_lim = dom.lo, hi_lim = dom.hi;
            double a = std::isfinite(lo_lim) ? (std::isfinite(hi_lim) ? lo_lim + 0.25 * (hi_lim - lo_lim)
                                                                      : lo_lim + 1.0)
                                             : (std::isfinite(hi_lim) ? hi_lim - 1.0 : -1.0);
            double b = std::isfinite(hi_lim) ? (std::isfinite(lo_lim) ? hi_lim - 0.25 * (hi_lim - lo_lim)
                                                                      : hi_lim - 1.0)
                                             : (std::isfinite(lo_lim) ? lo_lim + 1.0 : 1.0);
            if (a > b) std::swap(a, b);
            int grow = 0;
            while (gp(a) > y) {
                a = std::isfinite(lo_lim) ? 0.5 * (a + lo_lim) : (a < 0 ? 2.0 * a : a - std::max(1.0, -a));
                if (++grow > 200)
                    throw InversionError("bisection inverse: value below range of gamma'");
            }
            grow = 0;
            while (gp(b) < y) {
                b = std::isfinite(hi_lim) ? 0.5 * (b + hi_lim) : (b > 0 ? 2.0 * b : b + std::max(1.0, b));
                if (++grow > 200)
                    throw InversionError("bisection inverse: value above range of gamma'");
            }
            for (int i = 0; i < max_iter; ++i) {
                double m = 0.5 * (a + b);
                if (gp(m) < y)
                    a = m;
                else
                    b = m;
                if (b - a <= tol * std::max(1.0, std::abs(m))) break;
            }
            return 0.5 * (a + b);
        };
    }
    return BregmanGenerator(std::move(name), domain, std::move(gamma), std::move(gamma_p),
                            std::move(gamma_pp), std::move(gamma_ppp), std::move(gamma_p_inv));
}

BregmanGenerator generator_from_name(std::string_view spec) {
    if (spec == "euclidean") return euclidean_generator();
    if (spec == "geometric") return geometric_generator();
    if (spec == "harmonic") return harmonic_generator();
    if (spec == "exp") return exp_generator();
    if (spec == "identity") return identity_generator();
    constexpr std::string_view kPower = "power:";
    if (spec.substr(0, kPower.size()) == kPower) {
        std::string num(spec.substr(kPower.size()));
        char* end = nullptr;
        double beta = std::strtod(num.c_str(), &end);
        if (end == num.c_str() || *end != '\0')
            throw ParseError("generator_from_name: bad power exponent in '" + std::string(spec) + "'");
        return power_generator(beta);
    }
    throw ParseError("generator_from_name: unknown generator '" + std::string(spec) + "'");
}

double divergence(const BregmanGenerator& g, double x, double x0) {
    g.require_in_domain(x, "x");
    g.require_in_domain(x0, "x0");
    return g.gamma(x) - g.gamma(x0) - g.gamma_p(x0) * (x - x0);
}

double bregman_mean(const BregmanGenerator& g, std::span<const WeightedPoint> points) {
    if (points.empty()) throw EmptyInput("bregman_mean: empty weighted point list");
    double wsum = 0.0;
    for (const auto& wp : points) wsum += wp.weight;
    if (std::abs(wsum - 1.0) > 1e-12)
        throw InvalidWeights("bregman_mean: weights sum to " + fmt_double(wsum) + ", expected 1");

    double acc = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& wp : points) {
        g.require_in_domain(wp.point, "point");
        acc += wp.weight * g.gamma_p(wp.point);
        lo = std::min(lo, wp.point);
        hi = std::max(hi, wp.point);
    }
    double b = g.gamma_p_inv(acc);
    // b lies in [lo, hi] by monotonicity; rounding can push it out by an ulp.
    return std::clamp(b, lo, hi);
}

void validate_generator(const BregmanGenerator& g, int grid_points) {
    const Interval& dom = g.domain();
    double lo = std::max(dom.lo, -50.0);
    double hi = std::min(dom.hi, 50.0);
    double span = hi - lo;
    lo += 1e-4 * span;
    hi -= 1e-4 * span;
    for (int i = 0; i < grid_points; ++i) {
        double x = lo + (hi - lo) * (i + 0.5) / grid_points;
        double g2 = g.gamma_pp(x);
        if (!(g2 > 0.0))
            throw ValidationError("validate_generator('" + g.name() + "'): gamma''(" +
                                  fmt_double(x) + ") = " + fmt_double(g2) + " not positive");
        double y = g.gamma_p(x);
        double back = g.gamma_p_inv(y);
        if (std::abs(back - x) > 1e-12 * std::max(1.0, std::abs(x)))
            throw ValidationError("validate_generator('" + g.name() +
                                  "'): gamma_p_inv(gamma_p(x)) != x at x = " + fmt_double(x));
        double h = 1e-6 * std::max(1.0, std::abs(x));
        if (dom.contains(x - h) && dom.contains(x + h)) {
            double fd1 = (g.gamma(x + h) - g.gamma(x - h)) / (2.0 * h);
            if (std::abs(fd1 - y) > 1e-6 * std::max(1.0, std::abs(y)))
                throw ValidationError("validate_generator('" + g.name() +
                                      "'): gamma' inconsistent with gamma at x = " + fmt_double(x));
            double fd2 = (g.gamma_p(x + h) - g.gamma_p(x - h)) / (2.0 * h);
            if (std::abs(fd2 - g2) > 1e-6 * std::max(1.0, std::abs(g2)))
                throw ValidationError("validate_generator('" + g.name() +
                                      "'): gamma'' inconsistent with gamma' at x = " + fmt_double(x));
        }
    }
}

} // namespace bsq
