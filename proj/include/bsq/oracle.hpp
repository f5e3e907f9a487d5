#pragma once

#include "bsq/distributions.hpp"
#include "bsq/generators.hpp"
#include "bsq/quadrature.hpp"

namespace bsq::oracle {

// F^{-1}(alpha).
double true_quantile(const AnalyticDistribution& d, double alpha);

// (1/(1-alpha)) * integral_alpha^1 F^{-1}(y) dy. Returns +inf when the tail
// integral diverges; throws OracleFailure when quadrature stalls on an
// integrable case.
double true_superquantile(const AnalyticDistribution& d, double alpha,
                          const QuadratureSpec& spec = {});

// (gamma')^{-1}( (1/(1-alpha)) * integral_alpha^1 gamma'(F^{-1}(u)) du ).
// Reduces to true_superquantile for any affine gamma'. Returns +inf when the
// inner integral diverges; DomainError when the support is not contained in
// the generator domain.
double true_bregman_superquantile(const AnalyticDistribution& d, const BregmanGenerator& g,
                                  double alpha, const QuadratureSpec& spec = {});

// Variance of the limiting normal for the plug-in estimator:
//   sigma_gamma^2 / ( gamma''(Q)^2 (1-alpha)^2 ),
//   sigma_gamma^2 = iint_[alpha,1]^2 (min(x,y)-xy) l(x) l(y) dx dy,
// where l = d/dt gamma'(F^{-1}(t)) = 1/f_Z(F_Z^{-1}). The double integral is
// evaluated as 2*int (1-x) l(x) int_alpha^x y l(y) dy dx with singularity-
// aware quadrature on both levels. Throws VarianceDiverges when either level
// diverges (or the superquantile itself does).
double asymptotic_variance(const AnalyticDistribution& d, const BregmanGenerator& g, double alpha,
                           const QuadratureSpec& spec = {});

} // namespace bsq::oracle
