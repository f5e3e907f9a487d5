#include "bsq/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "bsq/errors.hpp"
#include "bsq/oracle.hpp"
#include "bsq/rng.hpp"
#include "bsq/stats.hpp"

#include <json.hpp>

namespace bsq {

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ParseError("manifest: bad number for '" + key + "': '" + v + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    char* end = nullptr;
    unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw ParseError("manifest: bad integer for '" + key + "': '" + v + "'");
    return x;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

int env_threads() {
    if (const char* v = std::getenv("BSQ_THREADS")) {
        int t = std::atoi(v);
        if (t > 0) return t;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

struct MeasureCtx {
    std::string label; // "quantile" | "superquantile" | "bregman:<gen>"
    std::optional<BregmanGenerator> gen;
};

double evaluate_measure(const MeasureCtx& m, const EmpiricalSample& s, double alpha) {
    if (m.label == "quantile") return empirical_quantile(s, alpha);
    if (m.label == "superquantile") return superquantile_hat(s, alpha).point;
    return bregman_superquantile_hat(s, *m.gen, alpha).point;
}

} // namespace

ExperimentManifest ExperimentManifest::parse_string(const std::string& text) {
    ExperimentManifest m;
    m.generators.clear();
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    bool grid_given = false;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError("manifest line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (key == "distribution") m.distribution = val;
        else if (key == "generators") m.generators = split_list(val);
        else if (key == "alpha") m.alpha = parse_double(key, val);
        else if (key == "n_min") m.n_min = parse_u64(key, val);
        else if (key == "n_max") m.n_max = parse_u64(key, val);
        else if (key == "n_step") m.n_step = parse_u64(key, val);
        else if (key == "n_grid") {
            m.n_grid.clear();
            for (const auto& item : split_list(val)) m.n_grid.push_back(parse_u64(key, item));
            grid_given = true;
        } else if (key == "repetitions") m.repetitions = static_cast<int>(parse_u64(key, val));
        else if (key == "reference_n") m.reference_n = parse_u64(key, val);
        else if (key == "master_seed") m.master_seed = parse_u64(key, val);
        else if (key == "ci_level") m.ci_level = parse_double(key, val);
        else if (key == "output") m.output = val;
        else if (key == "reference") {
            if (val == "oracle") m.oracle_reference = true;
            else if (val == "sample") m.oracle_reference = false;
            else throw ParseError("manifest: reference must be 'oracle' or 'sample'");
        } else if (key == "center") {
            if (val == "reference") m.center_theoretical_at_mean = false;
            else if (val == "mean") m.center_theoretical_at_mean = true;
            else throw ParseError("manifest: center must be 'reference' or 'mean'");
        } else {
            throw ParseError("manifest line " + std::to_string(lineno) + ": unknown key '" + key +
                             "'");
        }
    }
    m.explicit_grid = grid_given;
    if (!grid_given) {
        m.n_grid.clear();
        for (std::size_t n = m.n_min; n <= m.n_max; n += m.n_step) m.n_grid.push_back(n);
    }
    return m;
}

ExperimentManifest ExperimentManifest::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IOError("manifest: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

void ExperimentManifest::apply_scale(double factor) {
    if (!(factor > 0.0)) throw ValidationError("scale factor must be positive");
    if (factor == 1.0) return;
    reference_n = static_cast<std::size_t>(std::llround(reference_n * factor));
    if (explicit_grid) {
        std::size_t cap = static_cast<std::size_t>(std::llround(n_max * factor));
        std::vector<std::size_t> kept;
        for (auto n : n_grid)
            if (n <= cap) kept.push_back(n);
        if (!kept.empty()) n_grid = std::move(kept);
    } else {
        n_max = std::max(n_min, static_cast<std::size_t>(std::llround(n_max * factor)));
        n_grid.clear();
        for (std::size_t n = n_min; n <= n_max; n += n_step) n_grid.push_back(n);
    }
}

void ExperimentManifest::validate() const {
    if (generators.empty()) throw ValidationError("manifest: generator list is empty");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("manifest: alpha outside (0,1)");
    if (!(ci_level >= 0.0 && ci_level < 1.0))
        throw ValidationError("manifest: ci_level outside [0,1)");
    if (n_grid.empty()) throw ValidationError("manifest: empty sample size grid");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw ValidationError("manifest: n_grid must be strictly increasing");
    if (n_grid.front() < 2) throw ValidationError("manifest: sample sizes must be at least 2");
    if (repetitions < 2) throw ValidationError("manifest: repetitions must be at least 2");
    if (reference_n <= n_grid.back())
        throw ValidationError("manifest: reference_n must exceed the largest grid size");
    if (output.empty()) throw ValidationError("manifest: output path is empty");
    try {
        distribution_from_name(distribution);
        for (const auto& g : generators) generator_from_name(g);
    } catch (const ParseError& e) {
        throw ValidationError(std::string("manifest: ") + e.what());
    }
}

std::string ExperimentManifest::canonical() const {
    std::ostringstream os;
    os << "distribution=" << distribution << ";generators=";
    for (const auto& g : generators) os << g << ",";
    os << ";alpha=" << g17(alpha) << ";grid=";
    for (auto n : n_grid) os << n << ",";
    os << ";repetitions=" << repetitions << ";reference_n=" << reference_n
       << ";master_seed=" << master_seed << ";ci_level=" << g17(ci_level)
       << ";reference=" << (oracle_reference ? "oracle" : "sample")
       << ";center=" << (center_theoretical_at_mean ? "mean" : "reference");
    return os.str();
}

OracleCache::OracleCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;
    try {
        nlohmann::json j;
        in >> j;
        for (auto it = j.begin(); it != j.end(); ++it)
            if (it.value().is_string()) entries_[it.key()] = it.value().get<std::string>();
    } catch (const nlohmann::json::exception&) {
        entries_.clear(); // unreadable cache: start fresh
    }
}

std::optional<double> OracleCache::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return std::strtod(it->second.c_str(), nullptr);
}

void OracleCache::put(const std::string& key, double value) {
    entries_[key] = g17(value);
    dirty_ = true;
}

void OracleCache::save() {
    if (!dirty_) return;
    nlohmann::json j;
    for (const auto& [k, v] : entries_) j[k] = v;
    std::ofstream out(path_);
    if (!out) throw IOError("oracle cache: cannot write '" + path_ + "'");
    out << j.dump(2) << "\n";
    dirty_ = false;
}

ConvergenceResult run_convergence(const ExperimentManifest& m, OracleCache* cache, int threads) {
    m.validate();
    const AnalyticDistribution dist = distribution_from_name(m.distribution);
    const double alpha = m.alpha;
    const double z = normal_two_sided_z(m.ci_level);

    std::vector<MeasureCtx> measures;
    measures.push_back({"quantile", std::nullopt});
    measures.push_back({"superquantile", std::nullopt});
    for (const auto& gname : m.generators) {
        BregmanGenerator g = generator_from_name(gname);
        std::string label = "bregman:" + g.name();
        for (const auto& mc : measures)
            if (mc.label == label)
                throw ValidationError("manifest: duplicate generator '" + gname + "'");
        measures.push_back({std::move(label), std::move(g)});
    }

    ConvergenceResult result;
    result.run_id = [&] {
        char buf[20];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(fnv1a(m.canonical())));
        return std::string(buf);
    }();

    // Reference values and theoretical variances, oracle first. The shared
    // reference sample is drawn lazily, once, when some measure needs it.
    std::map<std::string, std::string> flags;
    std::optional<EmpiricalSample> ref_sample;
    auto reference_sample = [&]() -> const EmpiricalSample& {
        if (!ref_sample)
            ref_sample.emplace(sample(dist, m.reference_n, derive_seed(m.master_seed, 0, 0)));
        return *ref_sample;
    };
    auto cached = [&](const std::string& what, const std::string& scale_name,
                      const std::function<double()>& compute) {
        std::string key = "v1|" + dist.name() + "|" + scale_name + "|" + g17(alpha) + "|" + what;
        if (cache)
            if (auto hit = cache->get(key)) return *hit;
        double v = compute();
        if (cache) cache->put(key, v);
        return v;
    };

    for (const auto& mc : measures) {
        const std::string& label = mc.label;
        if (label == "quantile") {
            result.references[label] = dist.quantile(alpha);
            flags[label] = "no CI recipe for the quantile";
            continue;
        }
        const BregmanGenerator scale = mc.gen ? *mc.gen : identity_generator();
        double ref = std::numeric_limits<double>::quiet_NaN();
        if (m.oracle_reference) {
            try {
                ref = cached(mc.gen ? "bsq" : "sq", scale.name(), [&] {
                    return mc.gen ? oracle::true_bregman_superquantile(dist, *mc.gen, alpha)
                                  : oracle::true_superquantile(dist, alpha);
                });
            } catch (const Error&) {
                ref = std::numeric_limits<double>::quiet_NaN();
            }
        }
        if (!std::isfinite(ref)) {
            // Divergent or unavailable truth: fall back to a large-sample
            // reference estimate, as the simulation protocol prescribes.
            const EmpiricalSample& rs = reference_sample();
            ref = mc.gen ? bregman_superquantile_hat(rs, *mc.gen, alpha).point
                         : superquantile_hat(rs, alpha).point;
            flags[label] = m.oracle_reference ? "reference from sample (oracle unavailable)"
                                              : "reference from sample";
        } else if (!m.oracle_reference) {
            const EmpiricalSample& rs = reference_sample();
            ref = mc.gen ? bregman_superquantile_hat(rs, *mc.gen, alpha).point
                         : superquantile_hat(rs, alpha).point;
            flags[label] = "reference from sample";
        }
        result.references[label] = ref;
        auto add_flag = [&](const std::string& msg) {
            auto& f = flags[label];
            f = f.empty() ? msg : f + "; " + msg;
        };
        try {
            double v = cached("var", scale.name(),
                              [&] { return oracle::asymptotic_variance(dist, scale, alpha); });
            if (std::isfinite(v) && v > 0.0)
                result.theo_variances[label] = v;
            else
                add_flag("theoretical CI omitted: variance not finite");
        } catch (const VarianceDiverges&) {
            add_flag("theoretical CI omitted: asymptotic variance diverges");
        } catch (const Error& e) {
            add_flag(std::string("theoretical CI omitted: ") + e.what());
        }
    }
    if (cache) cache->save();

    // One task per (n, repetition); every measure shares the task's sample.
    struct Task {
        std::size_t n;
        int rep;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    tasks.reserve(m.n_grid.size() * static_cast<std::size_t>(m.repetitions));
    for (std::size_t n : m.n_grid)
        for (int rep = 0; rep < m.repetitions; ++rep)
            tasks.push_back({n, rep, derive_seed(m.master_seed, n, static_cast<std::uint64_t>(rep) + 1)});

    const std::size_t nm = measures.size();
    std::vector<double> estimates(tasks.size() * nm,
                                  std::numeric_limits<double>::quiet_NaN());
    std::vector<std::string> errors(tasks.size() * nm);

    int nthreads = threads > 0 ? threads : env_threads();
    nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(tasks.size())));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& t = tasks[i];
            EmpiricalSample s(sample(dist, t.n, t.seed));
            for (std::size_t k = 0; k < nm; ++k) {
                try {
                    estimates[i * nm + k] = evaluate_measure(measures[k], s, alpha);
                } catch (const Error& e) {
                    errors[i * nm + k] = e.what();
                }
            }
        }
    };
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // Records ordered by (measure, n, repetition); summary per (measure, n).
    for (std::size_t k = 0; k < nm; ++k) {
        const std::string& label = measures[k].label;
        auto var_it = result.theo_variances.find(label);
        for (std::size_t gi = 0; gi < m.n_grid.size(); ++gi) {
            std::size_t n = m.n_grid[gi];
            std::vector<double> ok;
            ok.reserve(m.repetitions);
            for (int rep = 0; rep < m.repetitions; ++rep) {
                std::size_t ti = gi * static_cast<std::size_t>(m.repetitions) +
                                 static_cast<std::size_t>(rep);
                double est = estimates[ti * nm + k];
                if (errors[ti * nm + k].empty() && std::isfinite(est)) ok.push_back(est);
            }
            SummaryRow row;
            row.measure = label;
            row.n = n;
            row.successes = static_cast<int>(ok.size());
            row.ref = result.references.at(label);
            if (auto f = flags.find(label); f != flags.end()) row.flag = f->second;
            if (!ok.empty()) row.mean = mean_of(ok);
            if (ok.size() >= 2) row.sd = sample_sd(ok);
            row.exp_lo = row.mean - z * row.sd;
            row.exp_hi = row.mean + z * row.sd;
            if (var_it != result.theo_variances.end()) {
                double center = m.center_theoretical_at_mean ? row.mean : row.ref;
                double hw = z * std::sqrt(var_it->second / static_cast<double>(n));
                row.theo_lo = center - hw;
                row.theo_hi = center + hw;
            }
            result.summary.push_back(row);

            for (int rep = 0; rep < m.repetitions; ++rep) {
                std::size_t ti = gi * static_cast<std::size_t>(m.repetitions) +
                                 static_cast<std::size_t>(rep);
                ConvergenceRecord rec;
                rec.measure = label;
                rec.n = n;
                rec.repetition = rep;
                rec.seed = tasks[ti].seed;
                rec.estimate = estimates[ti * nm + k];
                rec.error = errors[ti * nm + k];
                rec.theo_lo = row.theo_lo;
                rec.theo_hi = row.theo_hi;
                result.records.push_back(rec);
            }
        }
    }
    return result;
}

void write_plot_csv(const std::vector<SummaryRow>& summary, std::ostream& os) {
    os << "measure,n,mean,ref,exp_ci_lo,exp_ci_hi,theo_ci_lo,theo_ci_hi\n";
    for (const auto& r : summary) {
        os << r.measure << ',' << r.n << ',' << g17(r.mean) << ',' << g17(r.ref) << ','
           << g17(r.exp_lo) << ',' << g17(r.exp_hi) << ',';
        if (r.theo_lo) os << g17(*r.theo_lo);
        os << ',';
        if (r.theo_hi) os << g17(*r.theo_hi);
        os << '\n';
    }
}

void write_plot_json(const std::vector<SummaryRow>& summary, std::ostream& os) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : summary) {
        nlohmann::json j;
        j["measure"] = r.measure;
        j["n"] = r.n;
        j["successes"] = r.successes;
        j["mean"] = r.mean;
        j["sd"] = r.sd;
        j["ref"] = r.ref;
        j["exp_ci"] = {r.exp_lo, r.exp_hi};
        if (r.theo_lo && r.theo_hi)
            j["theo_ci"] = {*r.theo_lo, *r.theo_hi};
        else
            j["theo_ci"] = nullptr;
        j["flag"] = r.flag;
        arr.push_back(j);
    }
    os << arr.dump(2) << "\n";
}

std::vector<SummaryRow> read_plot_json(std::istream& is) {
    nlohmann::json arr;
    try {
        is >> arr;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("plot json: ") + e.what());
    }
    if (!arr.is_array()) throw ParseError("plot json: expected a top-level array");
    std::vector<SummaryRow> out;
    for (const auto& j : arr) {
        SummaryRow r;
        r.measure = j.at("measure").get<std::string>();
        r.n = j.at("n").get<std::size_t>();
        r.successes = j.at("successes").get<int>();
        r.mean = j.at("mean").get<double>();
        r.sd = j.at("sd").get<double>();
        r.ref = j.at("ref").get<double>();
        r.exp_lo = j.at("exp_ci")[0].get<double>();
        r.exp_hi = j.at("exp_ci")[1].get<double>();
        if (!j.at("theo_ci").is_null()) {
            r.theo_lo = j.at("theo_ci")[0].get<double>();
            r.theo_hi = j.at("theo_ci")[1].get<double>();
        }
        r.flag = j.at("flag").get<std::string>();
        out.push_back(r);
    }
    return out;
}

void write_records_csv(const std::vector<ConvergenceRecord>& records, std::ostream& os) {
    os << "measure,n,repetition,seed,estimate,theo_ci_lo,theo_ci_hi,error\n";
    for (const auto& r : records) {
        os << r.measure << ',' << r.n << ',' << r.repetition << ',' << r.seed << ','
           << g17(r.estimate) << ',';
        if (r.theo_lo) os << g17(*r.theo_lo);
        os << ',';
        if (r.theo_hi) os << g17(*r.theo_hi);
        os << ',' << r.error << '\n';
    }
}

RiskReport report_risks(const std::vector<double>& values, const std::vector<double>& alphas,
                        const std::vector<std::string>& generators, double ci_level) {
    std::size_t finite = 0;
    for (double v : values)
        if (std::isfinite(v)) ++finite;
    if (finite < 2) throw ParseError("report_risks: need at least two finite values");
    std::vector<double> clean;
    clean.reserve(finite);
    for (double v : values)
        if (std::isfinite(v)) clean.push_back(v);

    EmpiricalSample s(std::move(clean));
    RiskReport rep;
    rep.n = s.size();
    BregmanGenerator id = identity_generator();

    for (double a : alphas) {
        {
            RiskRow row;
            row.alpha = a;
            row.measure = "quantile";
            row.point = empirical_quantile(s, a);
            rep.rows.push_back(row);
        }
        {
            RiskRow row;
            row.alpha = a;
            row.measure = "superquantile";
            RiskEstimate est = superquantile_hat(s, a);
            row.point = est.point;
            try {
                est = clt_interval(est, nullptr, &s, id, ci_level);
                row.ci_low = est.ci_low;
                row.ci_high = est.ci_high;
                row.clt_variance = est.clt_variance;
            } catch (const NoInterval&) {
                // point estimate stands on its own
            }
            rep.rows.push_back(row);
        }
        for (const auto& gname : generators) {
            RiskRow row;
            row.alpha = a;
            BregmanGenerator g = generator_from_name(gname);
            row.measure = "bregman:" + g.name();
            try {
                // The whole sample must live inside the generator domain, not
                // just the current tail.
                if (!g.domain().contains(s.sorted().front()) ||
                    !g.domain().contains(s.sorted().back()))
                    throw DomainError("sample range [" + std::to_string(s.sorted().front()) +
                                      ", " + std::to_string(s.sorted().back()) +
                                      "] not inside the domain of '" + g.name() + "'");
                RiskEstimate est = bregman_superquantile_hat(s, g, a);
                row.point = est.point;
                try {
                    est = clt_interval(est, nullptr, &s, g, ci_level);
                    row.ci_low = est.ci_low;
                    row.ci_high = est.ci_high;
                    row.clt_variance = est.clt_variance;
                } catch (const NoInterval&) {
                }
            } catch (const Error& e) {
                row.skipped = e.what();
            }
            rep.rows.push_back(row);
        }
    }
    return rep;
}

} // namespace bsq
