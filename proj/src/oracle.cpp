#include "bsq/oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "bsq/errors.hpp"

namespace bsq::oracle {

namespace {

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("oracle: alpha must lie in (0,1)");
}

void check_support(const AnalyticDistribution& d, const BregmanGenerator& g) {
    if (!g.domain().contains(d.support()))
        throw DomainError("oracle: support of '" + d.name() + "' not contained in domain of '" +
                          g.name() + "'");
}

std::string diag(const TailIntegral& r) {
    return "shells=" + std::to_string(r.shells) + ", last=" + std::to_string(r.last_shell);
}

// l_gamma(1-u) = gamma''(q) / f(q) at q = F^{-1}(1-u); the derivative of the
// transformed quantile t -> gamma'(F^{-1}(t)).
double quantile_density(const AnalyticDistribution& d, const BregmanGenerator& g, double u) {
    double q = d.quantile_tail(u);
    double f = d.pdf(q);
    if (!(f > 0.0))
        throw SingularDensity("oracle: density of '" + d.name() + "' vanishes at its quantile");
    return g.gamma_pp(q) / f;
}

} // namespace

double true_quantile(const AnalyticDistribution& d, double alpha) {
    check_alpha(alpha);
    return d.quantile(alpha);
}

double true_superquantile(const AnalyticDistribution& d, double alpha,
                          const QuadratureSpec& spec) {
    check_alpha(alpha);
    const double u0 = 1.0 - alpha;
    TailIntegral r = integrate_to_singularity([&](double u) { return d.quantile_tail(u); }, u0, spec);
    if (r.divergent) return std::numeric_limits<double>::infinity();
    if (!r.converged)
        throw OracleFailure("true_superquantile('" + d.name() + "'): quadrature stalled, " +
                            diag(r));
    return r.value / u0;
}

double true_bregman_superquantile(const AnalyticDistribution& d, const BregmanGenerator& g,
                                  double alpha, const QuadratureSpec& spec) {
    check_alpha(alpha);
    check_support(d, g);
    const double u0 = 1.0 - alpha;
    TailIntegral r = integrate_to_singularity(
        [&](double u) { return g.gamma_p(d.quantile_tail(u)); }, u0, spec);
    if (r.divergent) return std::numeric_limits<double>::infinity();
    if (!r.converged)
        throw OracleFailure("true_bregman_superquantile('" + d.name() + "', '" + g.name() +
                            "'): quadrature stalled, " + diag(r));
    return g.gamma_p_inv(r.value / u0);
}

double asymptotic_variance(const AnalyticDistribution& d, const BregmanGenerator& g, double alpha,
                           const QuadratureSpec& spec) {
    check_alpha(alpha);
    check_support(d, g);
    const double u0 = 1.0 - alpha;

    double q_star = true_bregman_superquantile(d, g, alpha, spec);
    if (!std::isfinite(q_star))
        throw VarianceDiverges("asymptotic_variance('" + d.name() + "', '" + g.name() +
                               "'): the risk measure itself diverges");

    QuadratureSpec inner_spec = spec;
    inner_spec.abs_tol = spec.abs_tol * 1e-3;
    inner_spec.rel_tol = spec.rel_tol * 1e-2;

    // sigma^2 = 2 * int_0^{u0} (1-v) l(1-v) B(v) dv with
    // B(v) = int_0^v u l(1-u) du, in tail coordinates u = 1-x, v = 1-y.
    auto inner = [&](double v) {
        TailIntegral b = integrate_to_singularity(
            [&](double u) { return u * quantile_density(d, g, u); }, v, inner_spec);
        if (b.divergent)
            throw VarianceDiverges("asymptotic_variance('" + d.name() + "', '" + g.name() +
                                   "'): inner integral diverges");
        if (!b.converged)
            throw OracleFailure("asymptotic_variance: inner quadrature stalled, " + diag(b));
        return b.value;
    };
    TailIntegral outer = integrate_to_singularity(
        [&](double v) { return (1.0 - v) * quantile_density(d, g, v) * inner(v); }, u0, spec);
    if (outer.divergent)
        throw VarianceDiverges("asymptotic_variance('" + d.name() + "', '" + g.name() +
                               "'): double integral diverges");
    if (!outer.converged)
        throw OracleFailure("asymptotic_variance: outer quadrature stalled, " + diag(outer));

    double sigma2 = 2.0 * outer.value;
    double gpp = g.gamma_pp(q_star);
    return sigma2 / (gpp * gpp * u0 * u0);
}

} // namespace bsq::oracle
