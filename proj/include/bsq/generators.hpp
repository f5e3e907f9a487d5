#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <string_view>

namespace bsq {

// Open real interval; endpoints may be infinite and are always exclusive.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x > lo && x < hi; }
    bool contains(const Interval& other) const { return other.lo >= lo && other.hi <= hi; }
};

struct WeightedPoint {
    double weight;
    double point;
};

// A strictly convex generator gamma with its first three derivatives and the
// inverse of gamma'. gamma' is strictly increasing on the (open) domain;
// gamma''' may be absent and consumers that need it must check first.
// Instances are immutable value objects; evaluation is pure and thread-safe.
class BregmanGenerator {
public:
    using Fn = std::function<double(double)>;

    BregmanGenerator(std::string name, Interval domain, Fn gamma, Fn gamma_p,
                     Fn gamma_pp, Fn gamma_ppp, Fn gamma_p_inv);

    const std::string& name() const { return name_; }
    const Interval& domain() const { return domain_; }

    double gamma(double x) const;
    double gamma_p(double x) const;
    double gamma_pp(double x) const;

    bool has_gamma_ppp() const { return static_cast<bool>(gamma_ppp_); }
    double gamma_ppp(double x) const; // CapabilityError when absent

    // Inverse of gamma' on gamma'(domain); InversionError outside that range.
    double gamma_p_inv(double y) const;

    // DomainError naming `arg` when x is not strictly inside the domain.
    void require_in_domain(double x, const char* arg) const;

private:
    std::string name_;
    Interval domain_;
    Fn gamma_, gamma_p_, gamma_pp_, gamma_ppp_, gamma_p_inv_;
};

// Built-in families.
BregmanGenerator euclidean_generator(); // gamma(x) = x^2 on R
BregmanGenerator geometric_generator(); // gamma(x) = x ln x - x + 1 on (0,inf)
BregmanGenerator harmonic_generator();  // gamma(x) = -ln x + x - 1 on (0,inf)
// gamma'(x) = (x^{beta+1} - 1)/(beta+1) on (0,inf); gamma''(x) = x^beta.
// beta = -1 degenerates to the geometric family and is returned as such.
BregmanGenerator power_generator(double beta);
BregmanGenerator exp_generator();      // gamma(x) = e^x on R; breaks homogeneity
BregmanGenerator identity_generator(); // gamma(x) = x^2/2; classical, unscaled measures

// Assembles a user generator. When `gamma_p_inv` is empty a guarded bisection
// inverse on the domain is synthesized (relative tolerance 1e-12, at most 200
// iterations).
BregmanGenerator make_generator(std::string name, Interval domain,
                                BregmanGenerator::Fn gamma,
                                BregmanGenerator::Fn gamma_p,
                                BregmanGenerator::Fn gamma_pp,
                                BregmanGenerator::Fn gamma_ppp = nullptr,
                                BregmanGenerator::Fn gamma_p_inv = nullptr);

// Name grammar shared by the CLI and config files:
//   "euclidean" | "geometric" | "harmonic" | "power:<beta>" | "exp" | "identity"
BregmanGenerator generator_from_name(std::string_view spec);

// d_gamma(x, x0) = gamma(x) - gamma(x0) - gamma'(x0)(x - x0); nonnegative,
// zero iff x == x0.
double divergence(const BregmanGenerator& g, double x, double x0);

// b = (gamma')^{-1}( sum_i w_i gamma'(x_i) ). Weights must sum to one within
// 1e-12; the result lies in [min x_i, max x_i].
double bregman_mean(const BregmanGenerator& g, std::span<const WeightedPoint> points);

// Sanity checks used by tests and by make_generator callers: strict convexity
// on a grid, gamma_p_inv(gamma_p(x)) = x to 1e-12 relative, and finite
// difference consistency of gamma'/gamma'' at 1e-6 relative. Throws on
// violation. The grid is clipped to [-50, 50] so exp-type generators do not
// overflow.
void validate_generator(const BregmanGenerator& g, int grid_points = 200);

} // namespace bsq
