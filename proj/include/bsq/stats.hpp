#pragma once

#include <cstddef>
#include <vector>

namespace bsq {

// Inverse standard normal CDF. Acklam's rational approximation polished with
// one Halley step on erfc, accurate to full double precision on (0,1).
double normal_quantile(double p);

// z such that P(|N(0,1)| <= z) = level; level in [0,1).
double normal_two_sided_z(double level);

double mean_of(const std::vector<double>& v);

// Sample standard deviation (n-1 denominator).
double sample_sd(const std::vector<double>& v);

double median_of(std::vector<double> v);

} // namespace bsq
