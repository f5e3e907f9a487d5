#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bsq/distributions.hpp"
#include "bsq/estimators.hpp"

namespace bsq {

// Declarative description of one convergence study: which distribution and
// generators, the grid of sample sizes, how many repetitions per size, and
// where the reference value comes from. Parsed from a flat key = value file.
struct ExperimentManifest {
    std::string distribution = "exp";
    std::vector<std::string> generators; // must be nonempty
    double alpha = 0.95;
    std::size_t n_min = 1000;
    std::size_t n_max = 100000;
    std::size_t n_step = 500;
    std::vector<std::size_t> n_grid; // derived from the range unless given explicitly
    bool explicit_grid = false;
    int repetitions = 50;
    std::size_t reference_n = 1000000;
    std::uint64_t master_seed = 20130926;
    double ci_level = 0.95;
    std::string output = "convergence";
    bool oracle_reference = true;           // false: reference from a reference_n sample
    bool center_theoretical_at_mean = false; // default: center at the reference value

    static ExperimentManifest parse_file(const std::string& path);
    static ExperimentManifest parse_string(const std::string& text);

    // Shrinks n_max and reference_n by `factor` (keeps n_min); used by the
    // desk-scale switch.
    void apply_scale(double factor);

    void validate() const; // throws ValidationError
    std::string canonical() const; // stable serialization; feeds the run id
};

struct ConvergenceRecord {
    std::string measure;
    std::size_t n = 0;
    int repetition = 0;
    std::uint64_t seed = 0;
    double estimate = 0.0;
    std::optional<double> theo_lo, theo_hi;
    std::string error; // nonempty when this row failed (non-fatal)
};

struct SummaryRow {
    std::string measure;
    std::size_t n = 0;
    int successes = 0;
    double mean = 0.0;
    double sd = 0.0;
    double ref = 0.0;
    double exp_lo = 0.0, exp_hi = 0.0;
    std::optional<double> theo_lo, theo_hi;
    std::string flag; // reason the theoretical CI is absent, or other notes
};

struct ConvergenceResult {
    std::vector<ConvergenceRecord> records;
    std::vector<SummaryRow> summary;
    std::string run_id;
    std::map<std::string, double> references;
    std::map<std::string, double> theo_variances; // only measures with finite variance
};

// JSON sidecar for oracle values keyed by
// "v1|<distribution>|<generator>|<alpha>|<quantity>". Values are stored as
// printf %.17g strings so round-trips are exact and infinities survive.
class OracleCache {
public:
    explicit OracleCache(std::string path);
    std::optional<double> get(const std::string& key) const;
    void put(const std::string& key, double value);
    void save(); // best effort; IOError when the path is unwritable
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::map<std::string, std::string> entries_;
    bool dirty_ = false;
};

// Runs the full study: for every (n, repetition) a fresh sample seeded by
// derive_seed(master_seed, n, repetition), every requested measure evaluated
// on it. The measure list is quantile, the classical superquantile, and one
// Bregman superquantile per manifest generator. Per-row estimator errors are
// recorded, not fatal. `threads` 0 means BSQ_THREADS or hardware concurrency;
// results are identical for any thread count.
ConvergenceResult run_convergence(const ExperimentManifest& m, OracleCache* cache = nullptr,
                                  int threads = 0);

// Plot data emitters. The CSV header is fixed:
//   measure,n,mean,ref,exp_ci_lo,exp_ci_hi,theo_ci_lo,theo_ci_hi
// Output bytes are a pure function of the summary.
void write_plot_csv(const std::vector<SummaryRow>& summary, std::ostream& os);
void write_plot_json(const std::vector<SummaryRow>& summary, std::ostream& os);
std::vector<SummaryRow> read_plot_json(std::istream& is);
void write_records_csv(const std::vector<ConvergenceRecord>& records, std::ostream& os);

// Risk report over an ingested sample: quantile, classical superquantile and
// the requested Bregman superquantiles per alpha, with empirical-mode CIs.
// Generators whose domain the data violates are skipped with a reason.
struct RiskRow {
    double alpha = 0.0;
    std::string measure;
    double point = 0.0;
    std::optional<double> ci_low, ci_high, clt_variance;
    std::string skipped; // nonempty: row was skipped, value meaningless
};
struct RiskReport {
    std::size_t n = 0;
    std::vector<RiskRow> rows;
};
RiskReport report_risks(const std::vector<double>& values, const std::vector<double>& alphas,
                        const std::vector<std::string>& generators, double ci_level = 0.95);

} // namespace bsq
