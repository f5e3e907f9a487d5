#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "bsq/generators.hpp"

namespace bsq {

// A closed-form distribution: CDF, quantile, density, optional density
// derivative, and an (open) support interval. The quantile is stored in tail
// form q(u) = F^{-1}(1 - u) so that evaluations arbitrarily close to the
// upper endpoint do not lose precision to cancellation; quantile(t) simply
// forwards 1 - t. Descriptors are immutable and cheap to copy.
class AnalyticDistribution {
public:
    using Fn = std::function<double(double)>;

    AnalyticDistribution(std::string name, Interval support, Fn cdf, Fn quantile_tail, Fn pdf,
                         Fn pdf_deriv = nullptr);

    const std::string& name() const { return name_; }
    const Interval& support() const { return support_; }

    double cdf(double x) const;
    double quantile(double t) const;      // t in (0,1); DomainError otherwise
    double quantile_tail(double u) const; // F^{-1}(1-u), u in (0,1)
    double pdf(double x) const;

    bool has_pdf_deriv() const { return static_cast<bool>(pdf_deriv_); }
    double pdf_deriv(double x) const; // CapabilityError when absent

private:
    std::string name_;
    Interval support_;
    Fn cdf_, quantile_tail_, pdf_, pdf_deriv_;
};

// Built-in families.
AnalyticDistribution exponential_distribution(); // rate 1: F^{-1}(t) = -ln(1-t)
AnalyticDistribution pareto_distribution(double a); // F^{-1}(t) = (1-t)^{-1/a} on (1,inf)
AnalyticDistribution uniform01_distribution();
// Density 2/(pi(1+x^2)) on x >= 0; F(x) = (2/pi) atan x, F^{-1}(t) = tan(pi t/2).
// Carries no density derivative; nothing downstream needs it.
AnalyticDistribution half_cauchy_distribution();

// lambda * X for lambda > 0 and X + c; same family machinery applied to the
// transformed quantile/density.
AnalyticDistribution scaled(const AnalyticDistribution& d, double lambda);
AnalyticDistribution shifted(const AnalyticDistribution& d, double c);

// "exp" | "pareto:<a>" | "uniform" | "halfcauchy"
AnalyticDistribution distribution_from_name(std::string_view spec);

// Inverse-CDF sampling. Deterministic given the seed: the stream is
// mt19937_64 (seeded through splitmix64) mapped to the open interval (0,1);
// value i is quantile(u_i). Concurrent sampling with distinct seeds shares no
// state.
std::vector<double> sample(const AnalyticDistribution& d, std::size_t n, std::uint64_t seed);

// F_Z^{-1}(t) = gamma'(F_X^{-1}(t)) for Z = gamma'(X).
double pushforward_quantile(const AnalyticDistribution& d, const BregmanGenerator& g, double t);
double pushforward_quantile_tail(const AnalyticDistribution& d, const BregmanGenerator& g,
                                 double u);

// f_Z(z) = f_X((gamma')^{-1}(z)) / gamma''((gamma')^{-1}(z)).
double pushforward_pdf(const AnalyticDistribution& d, const BregmanGenerator& g, double z);

// One-column CSV ingestion (header optional). Unparseable rows after the
// first numeric row are skipped with a warning; a file with no numeric rows
// is a ParseError, an unreadable file an IOError.
struct CsvSample {
    std::vector<double> values;
    std::vector<std::string> warnings;
};
CsvSample load_sample_csv(const std::string& path);

} // namespace bsq
