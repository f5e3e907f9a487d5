#pragma once

#include <functional>

namespace bsq {

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    int max_subdivisions = 2000;
    // Approach the singular endpoint through geometrically shrinking (dyadic)
    // shells; equivalent to an exponential substitution. Disabling it falls
    // back to uniform panels and is only sensible for bounded integrands.
    bool endpoint_substitution = true;
};

struct TailIntegral {
    double value = 0.0; // +inf when divergent
    bool divergent = false;
    bool converged = false;
    int shells = 0;
    double last_shell = 0.0;
};

// Integral of f over (0, upper]; f may blow up as u -> 0+. The interval is
// decomposed into dyadic shells [upper 2^{-k-1}, upper 2^{-k}], each handled
// by fixed-order Gauss-Legendre. Shell sums of an integrable power-type
// singularity decay geometrically; the remainder is extrapolated from the
// observed ratio once it stabilizes. Shells that fail to decay (ratio >= 0.98
// eight times in a row) flag the integral divergent.
TailIntegral integrate_to_singularity(const std::function<double(double)>& f, double upper,
                                      const QuadratureSpec& spec = {});

// Composite Gauss-Legendre on [a,b] for smooth integrands, panel count
// doubled until two consecutive refinements agree within tolerance. Throws
// OracleFailure when max_subdivisions panels are not enough.
double integrate_smooth(const std::function<double(double)>& f, double a, double b,
                        const QuadratureSpec& spec = {});

} // namespace bsq
