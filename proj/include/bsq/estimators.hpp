#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bsq/distributions.hpp"
#include "bsq/generators.hpp"
#include "bsq/quadrature.hpp"

namespace bsq {

// An i.i.d. sample with its order statistics cached. Sorting happens once at
// construction; estimators never mutate the sample, so one instance can be
// shared across threads and swept over many alpha levels.
class EmpiricalSample {
public:
    explicit EmpiricalSample(std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    const std::vector<double>& sorted() const { return sorted_; }
    std::size_t size() const { return values_.size(); }

    // 1-based order statistic X_(i).
    double order_stat(std::size_t i) const { return sorted_[i - 1]; }

private:
    std::vector<double> values_;
    std::vector<double> sorted_;
};

struct RiskEstimate {
    std::string measure; // "quantile" | "superquantile" | "bregman:<generator>"
    double alpha = 0.0;
    double point = 0.0;
    std::optional<double> clt_variance; // variance of the limiting normal
    std::optional<double> ci_low, ci_high;
    std::size_t n = 0;
    std::size_t tail_count = 0; // number of summed order statistics
};

// Left-continuous inverse of the empirical CDF: X_(ceil(n*alpha)).
double empirical_quantile(const EmpiricalSample& s, double alpha);

// (1/(n(1-alpha))) * sum_{i=floor(n*alpha)+1}^{n} X_(i).
RiskEstimate superquantile_hat(const EmpiricalSample& s, double alpha);

// (gamma')^{-1}[ (1/(n(1-alpha))) * sum_{i=floor(n*alpha)+1}^{n} gamma'(X_(i)) ].
// Coincides with superquantile_hat for any affine gamma'.
RiskEstimate bregman_superquantile_hat(const EmpiricalSample& s, const BregmanGenerator& g,
                                       double alpha);

// Attaches a central-limit confidence interval at the given two-sided level:
//   point +- z_{(1+level)/2} * sqrt(V / n).
// Theoretical mode (d != nullptr): V from the closed-form asymptotic
// variance. Empirical mode (d == nullptr, s required): V from the plug-in
// double sum over order statistics, with the quantile density 1/f_Z(F_Z^{-1})
// replaced by centered rank differences of gamma'(X_(i)) at spacing
// max(5, ceil(sqrt(n))) and a delta-method division by gamma''(point)^2.
// `scale` is the generator the estimate was computed under
// (identity_generator() for the classical superquantile).
// Throws NoInterval when no variance recipe applies or the variance is
// divergent or nonpositive.
RiskEstimate clt_interval(RiskEstimate est, const AnalyticDistribution* d,
                          const EmpiricalSample* s, const BregmanGenerator& scale, double level,
                          const QuadratureSpec& spec = {});

// The empirical-mode variance itself (exposed for diagnostics and tests).
double empirical_clt_variance(const EmpiricalSample& s, const BregmanGenerator& scale,
                              double alpha, double point);

} // namespace bsq
