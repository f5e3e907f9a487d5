#include "bsq/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "bsq/errors.hpp"
#include "bsq/oracle.hpp"
#include "bsq/stats.hpp"

namespace bsq {

namespace {

// floor(n*alpha) / ceil(n*alpha) with a guard against the product landing an
// ulp on the wrong side of an integer (0.95*1300 = 1234.9999...).
std::size_t guarded_floor(double x) {
    return static_cast<std::size_t>(std::floor(x + 1e-9 + 1e-12 * x));
}

std::size_t guarded_ceil(double x) {
    return static_cast<std::size_t>(std::ceil(x - 1e-9 - 1e-12 * x));
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw DomainError("estimator: alpha must lie in (0,1)");
}

} // namespace

EmpiricalSample::EmpiricalSample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw EmptyInput("EmpiricalSample: empty sample");
    sorted_ = values_;
    std::sort(sorted_.begin(), sorted_.end());
}

double empirical_quantile(const EmpiricalSample& s, double alpha) {
    check_alpha(alpha);
    std::size_t n = s.size();
    std::size_t k = guarded_ceil(alpha * static_cast<double>(n));
    k = std::clamp<std::size_t>(k, 1, n);
    return s.order_stat(k);
}

RiskEstimate superquantile_hat(const EmpiricalSample& s, double alpha) {
    check_alpha(alpha);
    std::size_t n = s.size();
    if (n < 2) throw EmptyInput("superquantile_hat: need at least two observations");
    std::size_t lo = guarded_floor(alpha * static_cast<double>(n)) + 1;
    if (lo > n) throw TailTooSmall("superquantile_hat: no order statistics above level");
    double sum = 0.0;
    for (std::size_t i = lo; i <= n; ++i) sum += s.order_stat(i);
    RiskEstimate est;
    est.measure = "superquantile";
    est.alpha = alpha;
    est.point = sum / (static_cast<double>(n) * (1.0 - alpha));
    est.n = n;
    est.tail_count = n - (lo - 1);
    return est;
}

RiskEstimate bregman_superquantile_hat(const EmpiricalSample& s, const BregmanGenerator& g,
                                       double alpha) {
    check_alpha(alpha);
    std::size_t n = s.size();
    if (n < 2) throw EmptyInput("bregman_superquantile_hat: need at least two observations");
    std::size_t lo = guarded_floor(alpha * static_cast<double>(n)) + 1;
    if (lo > n) throw TailTooSmall("bregman_superquantile_hat: no order statistics above level");
    double sum = 0.0;
    for (std::size_t i = lo; i <= n; ++i) {
        double x = s.order_stat(i);
        if (!g.domain().contains(x))
            throw DomainError("bregman_superquantile_hat: order statistic " + std::to_string(i) +
                              " = " + std::to_string(x) + " outside domain of '" + g.name() + "'");
        sum += g.gamma_p(x);
    }
    double inner = sum / (static_cast<double>(n) * (1.0 - alpha));
    RiskEstimate est;
    est.measure = "bregman:" + g.name();
    est.alpha = alpha;
    est.point = g.gamma_p_inv(inner);
    est.n = n;
    est.tail_count = n - (lo - 1);
    return est;
}

double empirical_clt_variance(const EmpiricalSample& s, const BregmanGenerator& scale,
                              double alpha, double point) {
    std::size_t n = s.size();
    if (n < 16) throw NoInterval("empirical variance: sample too small");
    std::size_t m0 = guarded_floor(alpha * static_cast<double>(n)) + 1;
    if (m0 > n) throw TailTooSmall("empirical variance: empty tail");
    std::size_t h = std::max<std::size_t>(
        5, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)))));
    // Only ranks with a full centered window enter the sum. The extreme top
    // ranks are dropped: the rank-difference density estimate is unusable
    // there and its noise dominates everything else.
    std::size_t top = n > h ? n - h : 0;
    if (top < m0) throw NoInterval("empirical variance: tail too short for the rank window");

    // gamma'(X_(i)) on the ranks the difference windows can touch.
    std::size_t lo_rank = m0 > h ? m0 - h : 1;
    std::vector<double> z(n - lo_rank + 1);
    for (std::size_t i = lo_rank; i <= n; ++i) {
        double x = s.order_stat(i);
        if (!scale.domain().contains(x))
            throw DomainError("empirical variance: order statistic " + std::to_string(i) +
                              " outside domain of '" + scale.name() + "'");
        z[i - lo_rank] = scale.gamma_p(x);
    }
    auto zat = [&](std::size_t rank) { return z[rank - lo_rank]; };

    // Riemann double sum of (min(t_i,t_j) - t_i t_j) l(t_i) l(t_j) / n^2 with
    // l estimated by centered rank differences at spacing h.
    double nn = static_cast<double>(n);
    double prefix = 0.0; // sum of t_j * l_j for j < i
    double s2 = 0.0;
    for (std::size_t i = m0; i <= top; ++i) {
        double li = (zat(i + h) - zat(i - h)) * nn / static_cast<double>(2 * h);
        double t = static_cast<double>(i) / nn;
        s2 += (t - t * t) * li * li;
        s2 += 2.0 * (1.0 - t) * li * prefix;
        prefix += t * li;
    }
    s2 /= nn * nn;

    double gpp = scale.gamma_pp(point);
    double v = s2 / (gpp * gpp * (1.0 - alpha) * (1.0 - alpha));
    if (!std::isfinite(v) || v <= 0.0)
        throw NoInterval("empirical variance: nonpositive or non-finite estimate");
    return v;
}

RiskEstimate clt_interval(RiskEstimate est, const AnalyticDistribution* d,
                          const EmpiricalSample* s, const BregmanGenerator& scale, double level,
                          const QuadratureSpec& spec) {
    if (!(level >= 0.0 && level < 1.0))
        throw DomainError("clt_interval: level must lie in [0,1)");
    if (!std::isfinite(est.point)) throw NoInterval("clt_interval: point estimate not finite");
    if (est.measure == "quantile")
        throw NoInterval("clt_interval: no variance recipe for the raw quantile");
    if (est.n == 0) throw EmptyInput("clt_interval: estimate carries no sample size");

    double v;
    if (d != nullptr) {
        try {
            v = oracle::asymptotic_variance(*d, scale, est.alpha, spec);
        } catch (const VarianceDiverges& e) {
            throw NoInterval(std::string("clt_interval: ") + e.what());
        }
    } else {
        if (s == nullptr)
            throw EmptyInput("clt_interval: need a distribution or the sample itself");
        v = empirical_clt_variance(*s, scale, est.alpha, est.point);
    }
    if (!std::isfinite(v) || v <= 0.0)
        throw NoInterval("clt_interval: nonpositive or non-finite variance");

    double z = normal_two_sided_z(level);
    double hw = z * std::sqrt(v / static_cast<double>(est.n));
    est.clt_variance = v;
    est.ci_low = est.point - hw;
    est.ci_high = est.point + hw;
    return est;
}

} // namespace bsq
