// bsq: Bregman superquantile estimation and experiment tool.
//
// Subcommands:
//   converge <manifest>   convergence study; writes plot data + oracle cache
//   coherence             axiom check battery; one JSON report per scenario
//   assumptions           tail-growth verdicts per (family, scale)
//   report <csv>          risk report over an ingested one-column sample
//   oracle <family> <generator> <alpha>   reference values via quadrature
//
// Exit codes: 0 success, 2 validation/usage error, 3 runtime failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bsq/assumptions.hpp"
#include "bsq/coherence.hpp"
#include "bsq/errors.hpp"
#include "bsq/estimators.hpp"
#include "bsq/experiment.hpp"
#include "bsq/oracle.hpp"

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

int cmd_converge(const std::string& manifest_path, double scale, bool sample_reference,
                 bool center_mean, bool records, int threads) {
    bsq::ExperimentManifest m = bsq::ExperimentManifest::parse_file(manifest_path);
    m.apply_scale(scale);
    if (sample_reference) m.oracle_reference = false;
    if (center_mean) m.center_theoretical_at_mean = true;
    m.validate();

    bsq::OracleCache cache(m.output + ".oracle-cache.json");
    bsq::ConvergenceResult res = bsq::run_convergence(m, &cache, threads);

    {
        std::ofstream csv(m.output + ".csv");
        if (!csv) throw bsq::IOError("cannot write '" + m.output + ".csv'");
        bsq::write_plot_csv(res.summary, csv);
    }
    {
        std::ofstream js(m.output + ".json");
        if (!js) throw bsq::IOError("cannot write '" + m.output + ".json'");
        bsq::write_plot_json(res.summary, js);
    }
    if (records) {
        std::ofstream rc(m.output + ".records.csv");
        if (!rc) throw bsq::IOError("cannot write '" + m.output + ".records.csv'");
        bsq::write_records_csv(res.records, rc);
    }

    std::cout << "run " << res.run_id << ": " << res.summary.size() << " summary rows, "
              << res.records.size() << " records -> " << m.output << ".{csv,json}\n";
    for (const auto& [label, ref] : res.references) {
        std::cout << "  " << label << ": ref = " << fmt(ref);
        auto v = res.theo_variances.find(label);
        if (v != res.theo_variances.end())
            std::cout << ", clt variance = " << fmt(v->second);
        std::cout << "\n";
    }
    return 0;
}

int cmd_coherence(double alpha, std::uint64_t seed, const std::string& out_path) {
    std::vector<bsq::AxiomReport> reports = bsq::coherence_battery(alpha, seed);
    std::ostringstream os;
    for (const auto& r : reports) os << r.to_json() << "\n";
    if (out_path.empty() || out_path == "-") {
        std::cout << os.str();
    } else {
        std::ofstream f(out_path);
        if (!f) throw bsq::IOError("cannot write '" + out_path + "'");
        f << os.str();
    }
    int fails = 0;
    for (const auto& r : reports)
        if (r.verdict == bsq::AxiomVerdict::Fails) ++fails;
    std::cerr << reports.size() << " checks, " << fails
              << " expected failure(s) among them (exp generator scenarios)\n";
    return 0;
}

int cmd_assumptions(bool as_json) {
    const char* families[] = {"exp", "pareto:0.5", "pareto:1.5", "pareto:2.5"};
    const char* scales[] = {"identity", "geometric", "harmonic"};
    nlohmann::json arr = nlohmann::json::array();
    if (!as_json)
        std::cout << "distribution   scale      H1            H2            H3            H4\n";
    for (const char* f : families) {
        for (const char* s : scales) {
            bsq::AnalyticDistribution d = bsq::distribution_from_name(f);
            bsq::BregmanGenerator g = bsq::generator_from_name(s);
            if (g.name() != "identity" && !g.domain().contains(d.support())) continue;
            bsq::AssumptionReport rep = bsq::check_assumptions(d, g);
            if (as_json) {
                nlohmann::json j;
                j["distribution"] = rep.distribution;
                j["scale"] = rep.scale;
                for (const auto& [h, v] : rep.verdicts) j[bsq::to_string(h)] = bsq::to_string(v);
                if (rep.fitted_exponent_l) j["exponent_l"] = *rep.fitted_exponent_l;
                if (rep.fitted_exponent_L) j["exponent_L"] = *rep.fitted_exponent_L;
                if (rep.fitted_exponent_l_id) j["exponent_l_identity"] = *rep.fitted_exponent_l_id;
                if (rep.fitted_exponent_L_id) j["exponent_L_identity"] = *rep.fitted_exponent_L_id;
                arr.push_back(j);
            } else {
                std::printf("%-14s %-10s", f, s);
                for (auto h : {bsq::Hypothesis::H1, bsq::Hypothesis::H2, bsq::Hypothesis::H3,
                               bsq::Hypothesis::H4})
                    std::printf(" %-13s", bsq::to_string(rep.verdicts.at(h)).c_str());
                std::printf("\n");
            }
        }
    }
    if (as_json) std::cout << arr.dump(2) << "\n";
    return 0;
}

int cmd_report(const std::string& csv_path, std::vector<double> alphas,
               std::vector<std::string> generators, bool as_json) {
    if (alphas.empty()) alphas = {0.95};
    if (generators.empty()) generators = {"geometric", "harmonic"};
    bsq::CsvSample loaded = bsq::load_sample_csv(csv_path);
    for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
    bsq::RiskReport rep = bsq::report_risks(loaded.values, alphas, generators);

    if (as_json) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rep.rows) {
            nlohmann::json j;
            j["alpha"] = r.alpha;
            j["measure"] = r.measure;
            if (r.skipped.empty()) {
                j["point"] = r.point;
                if (r.ci_low && r.ci_high) j["ci"] = {*r.ci_low, *r.ci_high};
            } else {
                j["skipped"] = r.skipped;
            }
            arr.push_back(j);
        }
        nlohmann::json top;
        top["n"] = rep.n;
        top["rows"] = arr;
        std::cout << top.dump(2) << "\n";
        return 0;
    }
    std::cout << "n = " << rep.n << "\n";
    for (const auto& r : rep.rows) {
        std::cout << "alpha=" << fmt(r.alpha) << "  " << r.measure << ": ";
        if (!r.skipped.empty()) {
            std::cout << "skipped (" << r.skipped << ")\n";
            continue;
        }
        std::cout << fmt(r.point);
        if (r.ci_low && r.ci_high)
            std::cout << "  ci=[" << fmt(*r.ci_low) << ", " << fmt(*r.ci_high) << "]";
        std::cout << "\n";
    }
    return 0;
}

int cmd_oracle(const std::string& family, const std::string& generator, double alpha,
               const std::string& cache_path) {
    bsq::AnalyticDistribution d = bsq::distribution_from_name(family);
    bsq::BregmanGenerator g = bsq::generator_from_name(generator);

    std::unique_ptr<bsq::OracleCache> cache;
    if (!cache_path.empty()) cache = std::make_unique<bsq::OracleCache>(cache_path);
    auto cached = [&](const std::string& what, const std::function<double()>& compute) {
        char a17[40];
        std::snprintf(a17, sizeof a17, "%.17g", alpha);
        std::string key = "v1|" + d.name() + "|" + g.name() + "|" + a17 + "|" + what;
        if (cache)
            if (auto hit = cache->get(key)) return *hit;
        double v = compute();
        if (cache) cache->put(key, v);
        return v;
    };

    std::cout << "quantile = " << fmt(d.quantile(alpha)) << "\n";
    double q = cached("bsq", [&] { return bsq::oracle::true_bregman_superquantile(d, g, alpha); });
    std::cout << (g.name() == "identity" ? "superquantile = " : "bregman_superquantile = ")
              << fmt(q) << "\n";
    try {
        double v = cached("var", [&] { return bsq::oracle::asymptotic_variance(d, g, alpha); });
        std::cout << "clt_variance = " << fmt(v) << "\n";
    } catch (const bsq::VarianceDiverges& e) {
        std::cout << "clt_variance = divergent (" << e.what() << ")\n";
    }
    if (cache) cache->save();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bregman superquantile estimation and experiments"};
    app.require_subcommand(1);

    // converge
    std::string manifest_path;
    double scale = 1.0;
    bool sample_reference = false, center_mean = false, records = false;
    int threads = 0;
    CLI::App* conv = app.add_subcommand("converge", "run a convergence study from a manifest");
    conv->add_option("manifest", manifest_path, "flat key = value manifest file")->required();
    conv->add_option("--scale", scale, "shrink n_max and reference_n by this factor");
    conv->add_flag("--reference-sample", sample_reference,
                   "use a reference_n-size sample as the reference value even when the "
                   "quadrature oracle converges");
    conv->add_flag("--center-mean", center_mean,
                   "center the theoretical CI at the per-n mean instead of the reference");
    conv->add_flag("--records", records, "also write per-repetition records CSV");
    conv->add_option("--threads", threads, "worker threads (default: BSQ_THREADS or all cores)");

    // coherence
    double co_alpha = 0.95;
    std::uint64_t co_seed = 99;
    std::string co_out;
    CLI::App* coh = app.add_subcommand("coherence", "axiom verification battery");
    coh->add_option("--alpha", co_alpha, "risk level");
    coh->add_option("--seed", co_seed, "seed for the Monte Carlo scenarios");
    coh->add_option("--out", co_out, "output file for the JSON reports ('-' = stdout)");

    // assumptions
    bool as_json = false;
    CLI::App* asu = app.add_subcommand("assumptions", "tail-growth hypothesis table");
    asu->add_flag("--json", as_json, "emit JSON instead of a table");

    // report
    std::string report_csv;
    std::vector<double> report_alphas;
    std::string report_generators;
    bool report_json = false;
    CLI::App* repc = app.add_subcommand("report", "risk report over a one-column CSV sample");
    repc->add_option("csv", report_csv, "input file")->required();
    repc->add_option("--alpha", report_alphas, "risk level(s), repeatable");
    repc->add_option("--generators", report_generators, "comma-separated generator list");
    repc->add_flag("--json", report_json, "emit JSON");

    // oracle
    std::string or_family, or_generator;
    double or_alpha = 0.95;
    std::string or_cache;
    CLI::App* orc = app.add_subcommand("oracle", "reference values via quadrature");
    orc->add_option("family", or_family, "distribution (exp | pareto:<a> | uniform | halfcauchy)")
        ->required();
    orc->add_option("generator", or_generator,
                    "generator (identity | euclidean | geometric | harmonic | power:<b> | exp)")
        ->required();
    orc->add_option("alpha", or_alpha, "risk level")->required();
    orc->add_option("--cache", or_cache, "JSON sidecar cache path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (conv->parsed())
            return cmd_converge(manifest_path, scale, sample_reference, center_mean, records,
                                threads);
        if (coh->parsed()) return cmd_coherence(co_alpha, co_seed, co_out);
        if (asu->parsed()) return cmd_assumptions(as_json);
        if (repc->parsed()) {
            std::vector<std::string> gens;
            if (!report_generators.empty()) {
                std::stringstream ss(report_generators);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    if (!item.empty()) gens.push_back(item);
                }
            }
            return cmd_report(report_csv, report_alphas, gens, report_json);
        }
        if (orc->parsed()) return cmd_oracle(or_family, or_generator, or_alpha, or_cache);
    } catch (const bsq::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const bsq::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const bsq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
