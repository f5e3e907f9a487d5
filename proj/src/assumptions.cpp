#include "bsq/assumptions.hpp"

#include <array>
#include <cmath>

#include "bsq/errors.hpp"

namespace bsq {

namespace {

constexpr int kWindow = 12;      // points entering the fit
constexpr double kMargin = 0.02; // inconclusive band around the critical exponent
constexpr double kResidualLimit = 0.05;
constexpr double kDriftLimit = 0.2;

double limit_for(Hypothesis h) {
    return (h == Hypothesis::H1 || h == Hypothesis::H3) ? 2.0 : 2.5;
}

// Ordinary least squares for y ~ 1 + x + log x on the given points.
struct LinLogFit {
    double intercept, slope, log_coeff, residual_rms;
};

LinLogFit solve_lin_log(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double rhs[3] = {0, 0, 0};
    for (std::size_t i = 0; i < n; ++i) {
        const double r[3] = {1.0, xs[i], std::log(xs[i])};
        for (int a = 0; a < 3; ++a) {
            rhs[a] += r[a] * ys[i];
            for (int b = 0; b < 3; ++b) m[a][b] += r[a] * r[b];
        }
    }
    // Gaussian elimination with partial pivoting on the 3x3 normal equations.
    int idx[3] = {0, 1, 2};
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r2 = c + 1; r2 < 3; ++r2)
            if (std::abs(m[idx[r2]][c]) > std::abs(m[idx[piv]][c])) piv = r2;
        std::swap(idx[c], idx[piv]);
        for (int r2 = c + 1; r2 < 3; ++r2) {
            double f = m[idx[r2]][c] / m[idx[c]][c];
            for (int cc = c; cc < 3; ++cc) m[idx[r2]][cc] -= f * m[idx[c]][cc];
            rhs[idx[r2]] -= f * rhs[idx[c]];
        }
    }
    double beta[3];
    for (int c = 2; c >= 0; --c) {
        double s = rhs[idx[c]];
        for (int cc = c + 1; cc < 3; ++cc) s -= m[idx[c]][cc] * beta[cc];
        beta[c] = s / m[idx[c]][c];
    }
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double fit = beta[0] + beta[1] * xs[i] + beta[2] * std::log(xs[i]);
        ss += (ys[i] - fit) * (ys[i] - fit);
    }
    return {beta[0], beta[1], beta[2], std::sqrt(ss / static_cast<double>(n))};
}

Verdict classify(const TailFit& fit, double limit, std::vector<std::string>& notes,
                 const std::string& label) {
    if (fit.unstable) {
        notes.push_back(label + ": " + fit.note);
        return Verdict::Inapplicable;
    }
    if (fit.slope <= limit - kMargin) return Verdict::Satisfied;
    if (fit.slope >= limit + kMargin) return Verdict::Violated;
    notes.push_back(label + ": fitted exponent " + std::to_string(fit.slope) + " within " +
                    std::to_string(kMargin) + " of the critical value " + std::to_string(limit));
    return Verdict::Inconclusive;
}

} // namespace

std::string to_string(Hypothesis h) {
    switch (h) {
        case Hypothesis::H1: return "H1";
        case Hypothesis::H2: return "H2";
        case Hypothesis::H3: return "H3";
        case Hypothesis::H4: return "H4";
    }
    return "?";
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Satisfied: return "satisfied";
        case Verdict::Violated: return "violated";
        case Verdict::Inconclusive: return "inconclusive";
        case Verdict::Inapplicable: return "inapplicable";
    }
    return "?";
}

double l_gamma(const AnalyticDistribution& d, const BregmanGenerator& g, double t) {
    double q = d.quantile(t);
    double f = d.pdf(q);
    if (!(f > 0.0))
        throw SingularDensity("l_gamma: density of '" + d.name() + "' vanishes at F^{-1}(" +
                              std::to_string(t) + ")");
    g.require_in_domain(q, "F^{-1}(t)");
    return g.gamma_pp(q) / f;
}

double big_l_gamma(const AnalyticDistribution& d, const BregmanGenerator& g, double t) {
    double q = d.quantile(t);
    double f = d.pdf(q);
    if (!(f > 0.0))
        throw SingularDensity("big_l_gamma: density of '" + d.name() + "' vanishes at F^{-1}(" +
                              std::to_string(t) + ")");
    g.require_in_domain(q, "F^{-1}(t)");
    double g3 = g.gamma_ppp(q);    // CapabilityError when absent
    double fp = d.pdf_deriv(q);    // CapabilityError when absent
    double g2 = g.gamma_pp(q);
    return (g3 * f - fp * g2) / (f * f * f);
}

TailFit fit_tail_exponent(const std::function<double(double)>& fn, int grid_depth) {
    if (grid_depth < 4 + kWindow)
        throw ValidationError("fit_tail_exponent: grid_depth must be at least " +
                              std::to_string(4 + kWindow));
    if (grid_depth > 50)
        throw ValidationError("fit_tail_exponent: grid_depth beyond 50 exceeds double precision");

    const double ln2 = 0.6931471805599453;
    // Returns false when fn leaves the representable range; such growth is
    // certainly not polynomial and the fit is flagged unstable.
    auto sample_window = [&](int k_hi, std::vector<double>& xs, std::vector<double>& ys,
                             std::vector<double>& ts, std::string& why) {
        for (int k = k_hi - kWindow + 1; k <= k_hi; ++k) {
            double u = std::ldexp(1.0, -k); // 1 - t_k, exact
            double t = 1.0 - u;
            double v = fn(t);
            if (!std::isfinite(v) || v == 0.0) {
                why = "fn not finite and nonzero at t = 1 - 2^-" + std::to_string(k);
                return false;
            }
            xs.push_back(k * ln2); // -log(1 - t_k)
            ys.push_back(std::log(std::abs(v)));
            ts.push_back(t);
        }
        return true;
    };

    TailFit out;
    std::vector<double> xs, ys;
    std::string why;
    if (!sample_window(grid_depth, xs, ys, out.grid, why)) {
        out.unstable = true;
        out.note = why;
        return out;
    }
    LinLogFit fit = solve_lin_log(xs, ys);
    out.slope = fit.slope;
    out.log_coeff = fit.log_coeff;
    out.intercept = fit.intercept;
    out.residual_rms = fit.residual_rms;

    if (fit.residual_rms > kResidualLimit) {
        out.unstable = true;
        out.note = "residual rms " + std::to_string(fit.residual_rms) + " above " +
                   std::to_string(kResidualLimit) + "; growth is not polynomial";
        return out;
    }
    // Slope drift between the fitted window and the preceding one signals a
    // fit that has not settled.
    if (grid_depth - kWindow >= 4 + kWindow) {
        std::vector<double> xs2, ys2, ts2;
        if (sample_window(grid_depth - kWindow, xs2, ys2, ts2, why)) {
            LinLogFit prev = solve_lin_log(xs2, ys2);
            if (std::abs(prev.slope - fit.slope) > kDriftLimit) {
                out.unstable = true;
                out.note = "slope drift " + std::to_string(std::abs(prev.slope - fit.slope)) +
                           " between windows";
            }
        }
    }
    return out;
}

AssumptionReport check_assumptions(const AnalyticDistribution& d, const BregmanGenerator& scale,
                                   const std::set<Hypothesis>& which) {
    AssumptionReport rep;
    rep.distribution = d.name();
    rep.scale = scale.name();
    const bool scale_is_identity = scale.name() == "identity";
    BregmanGenerator id = identity_generator();

    auto fit_l = [&](const BregmanGenerator& g) {
        return fit_tail_exponent([&](double t) { return l_gamma(d, g, t); });
    };
    auto fit_L = [&](const BregmanGenerator& g) {
        return fit_tail_exponent([&](double t) { return big_l_gamma(d, g, t); });
    };

    for (Hypothesis h : which) {
        const bool identity_level = (h == Hypothesis::H3 || h == Hypothesis::H4);
        const BregmanGenerator& g = identity_level ? id : scale;
        const bool second_derivative = (h == Hypothesis::H2 || h == Hypothesis::H4);
        try {
            TailFit fit = second_derivative ? fit_L(g) : fit_l(g);
            rep.verdicts[h] = classify(fit, limit_for(h), rep.notes, to_string(h));
            if (rep.grid.empty()) rep.grid = fit.grid;
            if (identity_level || scale_is_identity) {
                (second_derivative ? rep.fitted_exponent_L_id : rep.fitted_exponent_l_id) =
                    fit.slope;
            }
            if (!identity_level) {
                (second_derivative ? rep.fitted_exponent_L : rep.fitted_exponent_l) = fit.slope;
            }
        } catch (const CapabilityError& e) {
            rep.verdicts[h] = Verdict::Inapplicable;
            rep.notes.push_back(to_string(h) + ": " + e.what());
        } catch (const OracleFailure& e) {
            rep.verdicts[h] = Verdict::Inapplicable;
            rep.notes.push_back(to_string(h) + ": " + e.what());
        }
    }
    return rep;
}

} // namespace bsq
