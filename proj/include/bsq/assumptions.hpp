#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bsq/distributions.hpp"
#include "bsq/generators.hpp"

namespace bsq {

// Tail growth hypotheses on the derivatives of t -> gamma'(F^{-1}(t)) near
// t = 1: H1/H2 for a transformed scale, H3/H4 for the identity scale.
// H1/H3 bound the first derivative by (1-t)^{-2+eps}; H2/H4 bound the second
// by (1-t)^{-5/2+eps}.
enum class Hypothesis { H1, H2, H3, H4 };

enum class Verdict { Satisfied, Violated, Inconclusive, Inapplicable };

std::string to_string(Hypothesis h);
std::string to_string(Verdict v);

// l_gamma(t) = gamma''(F^{-1}(t)) / f(F^{-1}(t)); the derivative of the
// transformed quantile. Identity scale gives the classical 1/(f o F^{-1}).
double l_gamma(const AnalyticDistribution& d, const BregmanGenerator& g, double t);

// L_gamma(t) = [gamma'''(q) f(q) - f'(q) gamma''(q)] / f(q)^3 at q = F^{-1}(t);
// the second derivative of the transformed quantile. Requires gamma''' and
// f' (CapabilityError otherwise).
double big_l_gamma(const AnalyticDistribution& d, const BregmanGenerator& g, double t);

// Least-squares fit of log|fn(t_k)| against x_k = -log(1-t_k) on the dyadic
// grid t_k = 1 - 2^{-k}, k = 4..grid_depth, using the last 12 points. The
// model carries a log x regressor so that slowly varying factors (powers of
// log(1-t)) land in `log_coeff` instead of biasing the slope. A fit whose
// residual stays large or whose slope drifts between windows is flagged
// unstable.
struct TailFit {
    double slope = 0.0;
    double log_coeff = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
    bool unstable = false;
    std::string note;
    std::vector<double> grid; // the t_k of the fitted window
};
TailFit fit_tail_exponent(const std::function<double(double)>& fn, int grid_depth = 40);

struct AssumptionReport {
    std::string distribution;
    std::string scale; // generator name; "identity" for the classical scale
    std::optional<double> fitted_exponent_l;    // requested scale, first derivative
    std::optional<double> fitted_exponent_L;    // requested scale, second derivative
    std::optional<double> fitted_exponent_l_id; // identity scale (H3)
    std::optional<double> fitted_exponent_L_id; // identity scale (H4)
    std::map<Hypothesis, Verdict> verdicts;
    std::vector<double> grid;
    std::vector<std::string> notes;
};

// Fits the relevant tail exponents and classifies each requested hypothesis.
// H1/H2 are judged on `scale`; H3/H4 always on the identity scale (they only
// concern the distribution). A fitted exponent within 0.02 of the critical
// value (2 for H1/H3, 5/2 for H2/H4) is Inconclusive; missing derivatives or
// an unstable fit give Inapplicable.
AssumptionReport check_assumptions(const AnalyticDistribution& d, const BregmanGenerator& scale,
                                   const std::set<Hypothesis>& which = {Hypothesis::H1,
                                                                        Hypothesis::H2,
                                                                        Hypothesis::H3,
                                                                        Hypothesis::H4});

} // namespace bsq
