#include "bsq/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <utility>

#include "bsq/errors.hpp"
#include "bsq/rng.hpp"

namespace bsq {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

constexpr double kPi = 3.14159265358979323846;

} // namespace

AnalyticDistribution::AnalyticDistribution(std::string name, Interval support, Fn cdf,
                                           Fn quantile_tail, Fn pdf, Fn pdf_deriv)
    : name_(std::move(name)),
      support_(support),
      cdf_(std::move(cdf)),
      quantile_tail_(std::move(quantile_tail)),
      pdf_(std::move(pdf)),
      pdf_deriv_(std::move(pdf_deriv)) {}

double AnalyticDistribution::cdf(double x) const {
    if (x <= support_.lo) return 0.0;
    if (x >= support_.hi) return 1.0;
    return cdf_(x);
}

double AnalyticDistribution::quantile(double t) const {
    if (!(t > 0.0 && t < 1.0))
        throw DomainError("distribution '" + name_ + "': quantile level " + fmt_double(t) +
                          " outside (0,1)");
    return quantile_tail_(1.0 - t);
}

double AnalyticDistribution::quantile_tail(double u) const {
    if (!(u > 0.0 && u < 1.0))
        throw DomainError("distribution '" + name_ + "': tail mass " + fmt_double(u) +
                          " outside (0,1)");
    return quantile_tail_(u);
}

double AnalyticDistribution::pdf(double x) const {
    if (!support_.contains(x)) return 0.0;
    return pdf_(x);
}

double AnalyticDistribution::pdf_deriv(double x) const {
    if (!pdf_deriv_)
        throw CapabilityError("distribution '" + name_ + "': density derivative not available");
    if (!support_.contains(x)) return 0.0;
    return pdf_deriv_(x);
}

AnalyticDistribution exponential_distribution() {
    return AnalyticDistribution(
        "exp", Interval{0.0, std::numeric_limits<double>::infinity()},
        [](double x) { return -std::expm1(-x); },
        [](double u) { return -std::log(u); },
        [](double x) { return std::exp(-x); },
        [](double x) { return -std::exp(-x); });
}

AnalyticDistribution pareto_distribution(double a) {
    if (!(a > 0.0) || !std::isfinite(a))
        throw DomainError("pareto: tail index must be positive, got " + fmt_double(a));
    return AnalyticDistribution(
        "pareto:" + fmt_double(a), Interval{1.0, std::numeric_limits<double>::infinity()},
        [a](double x) { return 1.0 - std::pow(x, -a); },
        [a](double u) { return std::pow(u, -1.0 / a); },
        [a](double x) { return a * std::pow(x, -a - 1.0); },
        [a](double x) { return -a * (a + 1.0) * std::pow(x, -a - 2.0); });
}

AnalyticDistribution uniform01_distribution() {
    return AnalyticDistribution(
        "uniform", Interval{0.0, 1.0},
        [](double x) { return x; },
        [](double u) { return 1.0 - u; },
        [](double) { return 1.0; },
        [](double) { return 0.0; });
}

AnalyticDistribution half_cauchy_distribution() {
    return AnalyticDistribution(
        "halfcauchy", Interval{0.0, std::numeric_limits<double>::infinity()},
        [](double x) { return (2.0 / kPi) * std::atan(x); },
        [](double u) { return 1.0 / std::tan(kPi * u / 2.0); },
        [](double x) { return 2.0 / (kPi * (1.0 + x * x)); },
        nullptr);
}

AnalyticDistribution scaled(const AnalyticDistribution& d, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw DomainError("scaled: lambda must be positive and finite");
    Interval sup{lambda * d.support().lo, lambda * d.support().hi};
    AnalyticDistribution base = d;
    AnalyticDistribution::Fn deriv = nullptr;
    if (base.has_pdf_deriv())
        deriv = [base, lambda](double x) { return base.pdf_deriv(x / lambda) / (lambda * lambda); };
    return AnalyticDistribution(
        "scale(" + d.name() + "," + fmt_double(lambda) + ")", sup,
        [base, lambda](double x) { return base.cdf(x / lambda); },
        [base, lambda](double u) { return lambda * base.quantile_tail(u); },
        [base, lambda](double x) { return base.pdf(x / lambda) / lambda; },
        std::move(deriv));
}

AnalyticDistribution shifted(const AnalyticDistribution& d, double c) {
    if (!std::isfinite(c)) throw DomainError("shifted: offset must be finite");
    Interval sup{d.support().lo + c, d.support().hi + c};
    AnalyticDistribution base = d;
    AnalyticDistribution::Fn deriv = nullptr;
    if (base.has_pdf_deriv())
        deriv = [base, c](double x) { return base.pdf_deriv(x - c); };
    return AnalyticDistribution(
        "shift(" + d.name() + "," + fmt_double(c) + ")", sup,
        [base, c](double x) { return base.cdf(x - c); },
        [base, c](double u) { return base.quantile_tail(u) + c; },
        [base, c](double x) { return base.pdf(x - c); },
        std::move(deriv));
}

AnalyticDistribution distribution_from_name(std::string_view spec) {
    if (spec == "exp") return exponential_distribution();
    if (spec == "uniform") return uniform01_distribution();
    if (spec == "halfcauchy") return half_cauchy_distribution();
    constexpr std::string_view kPareto = "pareto:";
    if (spec.substr(0, kPareto.size()) == kPareto) {
        std::string num(spec.substr(kPareto.size()));
        char* end = nullptr;
        double a = std::strtod(num.c_str(), &end);
        if (end == num.c_str() || *end != '\0')
            throw ParseError("distribution_from_name: bad pareto index in '" + std::string(spec) +
                             "'");
        return pareto_distribution(a);
    }
    throw ParseError("distribution_from_name: unknown distribution '" + std::string(spec) + "'");
}

std::vector<double> sample(const AnalyticDistribution& d, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw EmptyInput("sample: n must be at least 1");
    std::vector<double> out(n);
    UniformOpen01 next(seed);
    for (auto& v : out) v = d.quantile_tail(1.0 - next());
    return out;
}

double pushforward_quantile(const AnalyticDistribution& d, const BregmanGenerator& g, double t) {
    double x = d.quantile(t);
    g.require_in_domain(x, "F^{-1}(t)");
    return g.gamma_p(x);
}

double pushforward_quantile_tail(const AnalyticDistribution& d, const BregmanGenerator& g,
                                 double u) {
    double x = d.quantile_tail(u);
    g.require_in_domain(x, "F^{-1}(1-u)");
    return g.gamma_p(x);
}

double pushforward_pdf(const AnalyticDistribution& d, const BregmanGenerator& g, double z) {
    double x;
    try {
        x = g.gamma_p_inv(z);
    } catch (const InversionError& e) {
        throw DomainError(std::string("pushforward_pdf: ") + e.what());
    }
    if (!d.support().contains(x))
        throw DomainError("pushforward_pdf: z = " + fmt_double(z) +
                          " maps outside the support of '" + d.name() + "'");
    return d.pdf(x) / g.gamma_pp(x);
}

CsvSample load_sample_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("load_sample_csv: cannot open '" + path + "'");
    CsvSample out;
    std::string line;
    std::size_t lineno = 0;
    bool saw_numeric = false;
    bool header_allowance = true;
    while (std::getline(in, line)) {
        ++lineno;
        // strip whitespace and a trailing comma (single-column csv)
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t\r,");
        std::string tok = line.substr(b, e - b + 1);
        if (tok.empty()) continue;
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        bool parsed = end != tok.c_str() && *end == '\0' && std::isfinite(v);
        if (parsed) {
            out.values.push_back(v);
            saw_numeric = true;
        } else if (header_allowance && !saw_numeric) {
            // first non-numeric line before any data: treated as a header
        } else {
            out.warnings.push_back("line " + std::to_string(lineno) + ": not numeric: '" + tok +
                                   "'");
        }
        header_allowance = false;
    }
    if (out.values.empty()) throw ParseError("load_sample_csv: no numeric rows in '" + path + "'");
    return out;
}

} // namespace bsq
