// bratsynthetic: surrogate resynthesis for BRAT-annotated clinical text plus
// the leakage risk toolkit (Monte-Carlo simulation, closed-form model,
// corpus statistics, throughput benchmark).
//
// Subcommands: resynth, simulate, analytic, stats, bench.
// All tabular output is CSV; every run writes a JSON manifest that is
// sufficient to reproduce the outputs byte-identically.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "bratsyn/analytic.hpp"
#include "bratsyn/distribution.hpp"
#include "bratsyn/leakage.hpp"
#include "bratsyn/pipeline.hpp"

using json = nlohmann::ordered_json;
using namespace bratsyn;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

#ifndef BRATSYN_DATA_DIR
#define BRATSYN_DATA_DIR "data"
#endif

struct CommonOpts {
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string manifest_path;
};

std::uint64_t resolve_seed(CommonOpts& c) {
    if (!c.seed_given) {
        std::random_device rd;
        c.seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    }
    return c.seed;
}

void add_common(CLI::App* cmd, CommonOpts& c) {
    cmd->add_option("--seed", c.seed, "master random seed (default: entropy)")
        ->each([&c](const std::string&) { c.seed_given = true; });
    cmd->add_option("--manifest", c.manifest_path,
                    "path for the run manifest JSON");
}

StrategyKind parse_strategy(const std::string& s) {
    if (s == "consistent") return StrategyKind::consistent;
    if (s == "random") return StrategyKind::random;
    if (s == "markov") return StrategyKind::markov;
    if (s == "custom") return StrategyKind::custom;
    throw CLI::ValidationError("--strategy",
                               "expected consistent|random|markov|custom");
}

void write_manifest(const std::string& path, const std::string& subcommand,
                    const json& config, std::uint64_t seed,
                    const json& timings, std::size_t warning_count) {
    if (path.empty()) return;
    json m;
    m["tool"] = "bratsynthetic";
    m["version"] = kToolVersion;
    m["subcommand"] = subcommand;
    m["config"] = config;
    m["seed"] = seed;
    m["timings"] = timings;
    m["warnings"] = warning_count;
    std::ofstream out(path, std::ios::trunc);
    out << m.dump(2) << "\n";
}

std::string format_rate(double v) {
    std::ostringstream ss;
    ss.precision(10);
    ss << v;
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"surrogate resynthesis and PHI leakage risk toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key = value config file");
    app.allow_config_extras(CLI::config_extras_mode::ignore);

    // ---- resynth ----
    auto* resynth = app.add_subcommand(
        "resynth", "rewrite a BRAT corpus with surrogate PHI");
    ResynthOptions ropt;
    ropt.data_dir = BRATSYN_DATA_DIR;
    std::string r_strategy = "markov";
    double r_pnew = 0.5;
    std::size_t r_pool = 1000;
    std::string r_scope = "per-patient";
    bool r_day_first = false;
    CommonOpts r_common;
    resynth->add_option("--in", ropt.in_dir, "input corpus directory")
        ->required();
    resynth->add_option("--out", ropt.out_dir, "output directory")->required();
    resynth->add_option("--strategy", r_strategy,
                        "consistent|random|markov|custom");
    resynth->add_option("--p-new", r_pnew,
                        "new-surrogate transition probability (custom)");
    resynth->add_option("--pool-size", r_pool, "surrogate pool size K");
    resynth->add_option("--data-dir", ropt.data_dir,
                        "vocabulary data directory");
    resynth->add_option("--jobs", ropt.jobs, "worker threads");
    resynth->add_flag("--skip-bad-docs", ropt.skip_bad_docs,
                      "continue past unparseable documents");
    resynth->add_flag("--day-first", r_day_first,
                      "read ambiguous numeric dates as day/month/year");
    resynth->add_option("--offset-scope", r_scope,
                        "per-corpus|per-patient|per-document");
    std::string r_patients, r_categories;
    resynth->add_option("--patients", r_patients,
                        "doc_id,patient_id manifest CSV");
    resynth->add_option("--categories", r_categories,
                        "category registry config file");
    add_common(resynth, r_common);

    // ---- simulate ----
    auto* simulate_cmd = app.add_subcommand(
        "simulate", "Monte-Carlo PHI leakage simulation over a distribution");
    std::string s_dist;
    std::vector<double> s_fners;
    std::vector<std::string> s_strategies;
    std::size_t s_runs = 1000;
    std::size_t s_jobs = 1;
    std::size_t s_pool = 1000;
    std::string s_accounting = "pooled";
    std::string s_out = "-";
    CommonOpts s_common;
    simulate_cmd->add_option("--dist", s_dist, "PhiDistribution CSV file")
        ->required();
    simulate_cmd->add_option("--fner", s_fners, "false negative error rates")
        ->required()
        ->expected(-1);
    simulate_cmd
        ->add_option("--strategy", s_strategies,
                     "strategies (consistent random markov)")
        ->expected(-1);
    simulate_cmd->add_option("--runs", s_runs, "simulation runs per cell");
    simulate_cmd->add_option("--pool-size", s_pool, "surrogate pool size K");
    simulate_cmd->add_option("--jobs", s_jobs, "worker threads");
    simulate_cmd->add_option("--accounting", s_accounting,
                             "pooled|per-type FN accounting");
    simulate_cmd->add_option("--out", s_out, "output CSV path ('-' = stdout)");
    add_common(simulate_cmd, s_common);

    // ---- analytic ----
    auto* analytic_cmd = app.add_subcommand(
        "analytic", "closed-form leakage probabilities (binomial model)");
    std::vector<std::size_t> a_docs;
    std::vector<std::size_t> a_epd;
    std::vector<double> a_fners;
    std::vector<std::string> a_thresholds;
    bool a_fig4_1pct = false, a_fig4_5pct = false;
    std::string a_out = "-";
    CommonOpts a_common;
    analytic_cmd->add_option("--docs", a_docs, "corpus sizes")->expected(-1);
    analytic_cmd->add_option("--epd", a_epd, "entities per document")
        ->expected(-1);
    analytic_cmd->add_option("--fner", a_fners, "false negative error rates")
        ->expected(-1);
    analytic_cmd->add_option(
        "--threshold", a_thresholds,
        "NAME=VALUE threshold overrides (default: consistent=0, "
        "random=1.015, markov=2.028)");
    analytic_cmd->add_flag("--fig4-1pct", a_fig4_1pct,
                           "preset: 1% FNER, 15/150/1500 entities per doc");
    analytic_cmd->add_flag("--fig4-5pct", a_fig4_5pct,
                           "preset: 5% FNER, 5/25/50 entities per doc");
    analytic_cmd->add_option("--out", a_out, "output CSV path ('-' = stdout)");
    add_common(analytic_cmd, a_common);

    // ---- stats ----
    auto* stats_cmd = app.add_subcommand(
        "stats", "critical-entity distribution statistics");
    std::string st_in, st_dist, st_export, st_patients, st_categories;
    CommonOpts st_common;
    stats_cmd->add_option("--in", st_in, "BRAT corpus directory");
    stats_cmd->add_option("--dist", st_dist, "PhiDistribution CSV file");
    stats_cmd->add_option("--export-dist", st_export,
                          "write the corpus distribution CSV here");
    stats_cmd->add_option("--patients", st_patients,
                          "doc_id,patient_id manifest CSV");
    stats_cmd->add_option("--categories", st_categories,
                          "category registry config file");
    add_common(stats_cmd, st_common);

    // ---- bench ----
    auto* bench_cmd = app.add_subcommand(
        "bench", "end-to-end resynthesis throughput benchmark");
    std::size_t b_docs = 1000, b_words = 1136, b_entities = 60, b_jobs = 1;
    std::string b_dir, b_data = BRATSYN_DATA_DIR, b_strategy = "markov";
    CommonOpts b_common;
    bench_cmd->add_option("--docs", b_docs, "documents to generate");
    bench_cmd->add_option("--words", b_words, "words per document");
    bench_cmd->add_option("--entities", b_entities, "entities per document");
    bench_cmd->add_option("--jobs", b_jobs, "worker threads");
    bench_cmd->add_option("--work-dir", b_dir,
                          "scratch directory (default: temp)");
    bench_cmd->add_option("--data-dir", b_data, "vocabulary data directory");
    bench_cmd->add_option("--strategy", b_strategy,
                          "consistent|random|markov");
    add_common(bench_cmd, b_common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (resynth->parsed()) {
            std::uint64_t seed = resolve_seed(r_common);
            StrategyKind kind = parse_strategy(r_strategy);
            ropt.strategy = StrategyConfig::make(kind, r_pool, seed, r_pnew);
            ropt.seed = seed;
            ropt.month_first = !r_day_first;
            if (r_scope == "per-corpus")
                ropt.offset_scope = OffsetScope::per_corpus;
            else if (r_scope == "per-document")
                ropt.offset_scope = OffsetScope::per_document;
            else if (r_scope == "per-patient")
                ropt.offset_scope = OffsetScope::per_patient;
            else
                throw CLI::ValidationError("--offset-scope", "bad value");
            if (!r_patients.empty()) ropt.patient_manifest = r_patients;
            if (!r_categories.empty()) ropt.category_config = r_categories;

            ResynthResult result = run_resynth(ropt);
            std::filesystem::create_directories(ropt.out_dir);
            write_warnings_csv(result.warnings,
                               (std::filesystem::path(ropt.out_dir) /
                                "warnings.csv")
                                   .string());
            json cfg = {{"in", ropt.in_dir},
                        {"out", ropt.out_dir},
                        {"strategy", r_strategy},
                        {"p_new", ropt.strategy.p_new},
                        {"pool_size", r_pool},
                        {"jobs", ropt.jobs},
                        {"offset_scope", r_scope},
                        {"month_first", ropt.month_first},
                        {"skip_bad_docs", ropt.skip_bad_docs},
                        {"data_dir", ropt.data_dir}};
            json timings = {{"total_seconds", result.total_seconds},
                            {"rewrite_seconds", result.plan_seconds}};
            std::string manifest = r_common.manifest_path.empty()
                                       ? (std::filesystem::path(ropt.out_dir) /
                                          "manifest.json")
                                             .string()
                                       : r_common.manifest_path;
            write_manifest(manifest, "resynth", cfg, seed, timings,
                           result.warnings.size());
            std::cout << "documents=" << result.docs
                      << " entities=" << result.entities
                      << " failed=" << result.failed_docs
                      << " warnings=" << result.warnings.size() << "\n";
            for (const auto& err : result.errors)
                std::cerr << "error: " << err << "\n";
            return result.failed_docs == 0 || ropt.skip_bad_docs ? kExitOk
                                                                 : kExitInput;
        }

        if (simulate_cmd->parsed()) {
            std::uint64_t seed = resolve_seed(s_common);
            if (s_strategies.empty())
                s_strategies = {"consistent", "random", "markov"};
            if (s_fners.empty())
                throw CLI::ValidationError("--fner", "at least one rate");
            PhiDistribution dist = read_distribution_csv(s_dist);
            Accounting accounting;
            if (s_accounting == "pooled") accounting = Accounting::pooled;
            else if (s_accounting == "per-type")
                accounting = Accounting::per_type;
            else
                throw CLI::ValidationError("--accounting",
                                           "pooled or per-type");
            std::ostringstream csv;
            csv << "strategy,fner,doc_leak_rate,doc_leak_stderr,"
                   "patient_leak_rate,patient_leak_stderr\n";
            for (const auto& sname : s_strategies) {
                StrategyKind kind = parse_strategy(sname);
                for (double fner : s_fners) {
                    SimConfig cfg;
                    cfg.fner = fner;
                    cfg.runs = s_runs;
                    cfg.strategy =
                        StrategyConfig::make(kind, s_pool, seed);
                    cfg.accounting = accounting;
                    cfg.seed = hash_str(seed, sname + ":" +
                                                  format_rate(fner));
                    LeakSummary summary = simulate(dist, cfg, s_jobs);
                    csv << sname << ',' << format_rate(fner) << ','
                        << format_rate(summary.doc_leak_rate) << ','
                        << format_rate(summary.doc_leak_stderr) << ','
                        << format_rate(summary.patient_leak_rate) << ','
                        << format_rate(summary.patient_leak_stderr) << "\n";
                }
            }
            if (s_out == "-") {
                std::cout << csv.str();
            } else {
                std::ofstream out(s_out, std::ios::trunc);
                out << csv.str();
            }
            json cfg = {{"dist", s_dist},
                        {"fner", s_fners},
                        {"strategies", s_strategies},
                        {"runs", s_runs},
                        {"pool_size", s_pool},
                        {"accounting", s_accounting},
                        {"jobs", s_jobs},
                        {"out", s_out}};
            write_manifest(s_common.manifest_path, "simulate", cfg, seed, {},
                           0);
            return kExitOk;
        }

        if (analytic_cmd->parsed()) {
            std::uint64_t seed = resolve_seed(a_common);
            std::map<std::string, double> thresholds;
            if (a_thresholds.empty()) {
                thresholds = {{"consistent", kThresholdConsistent},
                              {"random", kThresholdRandom},
                              {"markov", kThresholdMarkov}};
            } else {
                for (const auto& spec : a_thresholds) {
                    auto eq = spec.find('=');
                    if (eq == std::string::npos)
                        throw CLI::ValidationError("--threshold",
                                                   "expected NAME=VALUE");
                    thresholds[spec.substr(0, eq)] =
                        std::stod(spec.substr(eq + 1));
                }
            }
            if (a_fig4_1pct) {
                a_fners = {0.01};
                a_epd = {15, 150, 1500};
            } else if (a_fig4_5pct) {
                a_fners = {0.05};
                a_epd = {5, 25, 50};
            }
            if (a_fners.empty()) a_fners = {0.01};
            if (a_epd.empty()) a_epd = {15, 150, 1500};
            std::vector<std::size_t> grid =
                a_docs.empty() ? default_doc_grid() : a_docs;
            auto rows = sweep(a_epd, a_fners, thresholds, grid);
            std::ostringstream csv;
            csv << "strategy,fner,entities_per_doc,n_docs,leak_probability\n";
            for (const auto& row : rows)
                csv << row.strategy << ',' << format_rate(row.fner) << ','
                    << row.entities_per_doc << ',' << row.n_docs << ','
                    << format_rate(row.leak_probability) << "\n";
            if (a_out == "-") {
                std::cout << csv.str();
            } else {
                std::ofstream out(a_out, std::ios::trunc);
                out << csv.str();
            }
            json cfg = {{"fner", a_fners},
                        {"epd", a_epd},
                        {"docs", grid},
                        {"out", a_out}};
            write_manifest(a_common.manifest_path, "analytic", cfg, seed, {},
                           0);
            return kExitOk;
        }

        if (stats_cmd->parsed()) {
            std::uint64_t seed = resolve_seed(st_common);
            PhiDistribution dist;
            if (!st_dist.empty()) {
                dist = read_distribution_csv(st_dist);
            } else if (!st_in.empty()) {
                CategoryRegistry registry = CategoryRegistry::builtin();
                if (!st_categories.empty())
                    registry.load_file(st_categories);
                std::map<std::string, std::string> patients;
                if (!st_patients.empty())
                    patients = load_patient_manifest(st_patients);
                dist = corpus_distribution(st_in, registry, patients);
            } else {
                throw CLI::ValidationError("stats",
                                           "need --in or --dist");
            }
            if (dist.empty())
                throw PipelineError("empty corpus: nothing to summarize");
            CorpusStats stats = distribution_stats(dist);
            std::cout << "level,n,critical_mean,critical_median,"
                         "critical_min,critical_max\n";
            std::cout << "document," << stats.per_document.n << ','
                      << format_rate(stats.per_document.mean) << ','
                      << format_rate(stats.per_document.median) << ','
                      << stats.per_document.min << ','
                      << stats.per_document.max << "\n";
            std::cout << "patient," << stats.per_patient.n << ','
                      << format_rate(stats.per_patient.mean) << ','
                      << format_rate(stats.per_patient.median) << ','
                      << stats.per_patient.min << ','
                      << stats.per_patient.max << "\n";
            if (!st_export.empty()) {
                std::ofstream out(st_export, std::ios::trunc);
                write_distribution_csv(dist, out);
            }
            json cfg = {{"in", st_in}, {"dist", st_dist},
                        {"export", st_export}};
            write_manifest(st_common.manifest_path, "stats", cfg, seed, {},
                           0);
            return kExitOk;
        }

        if (bench_cmd->parsed()) {
            std::uint64_t seed = resolve_seed(b_common);
            if (b_docs < 1 || b_words < 1)
                throw CLI::ValidationError("bench", "docs and words >= 1");
            namespace fs = std::filesystem;
            fs::path work = b_dir.empty()
                                ? fs::temp_directory_path() /
                                      ("bratsyn_bench_" +
                                       std::to_string(seed))
                                : fs::path(b_dir);
            fs::path in_dir = work / "in";
            fs::path out_dir = work / "out";
            fs::remove_all(work);
            Vocabulary vocab(b_data);
            generate_bench_corpus(in_dir.string(), b_docs, b_words,
                                  b_entities, seed, vocab);
            ResynthOptions opt;
            opt.in_dir = in_dir.string();
            opt.out_dir = out_dir.string();
            opt.data_dir = b_data;
            opt.strategy = StrategyConfig::make(parse_strategy(b_strategy),
                                                1000, seed);
            opt.seed = seed;
            opt.jobs = b_jobs;
            ResynthResult result = run_resynth(opt);
            double docs_per_sec =
                static_cast<double>(result.docs) / result.plan_seconds;
            double entities_per_sec =
                static_cast<double>(result.entities) / result.plan_seconds;
            std::cout << "docs,entities,seconds,docs_per_sec,entities_per_sec\n";
            std::cout << result.docs << ',' << result.entities << ','
                      << format_rate(result.plan_seconds) << ','
                      << format_rate(docs_per_sec) << ','
                      << format_rate(entities_per_sec) << "\n";
            json cfg = {{"docs", b_docs},
                        {"words", b_words},
                        {"entities", b_entities},
                        {"jobs", b_jobs},
                        {"strategy", b_strategy}};
            json timings = {{"resynth_seconds", result.plan_seconds},
                            {"total_seconds", result.total_seconds}};
            write_manifest(b_common.manifest_path, "bench", cfg, seed,
                           timings, result.warnings.size());
            if (b_dir.empty()) fs::remove_all(work);
            return kExitOk;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const LoadError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const CsvError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const PipelineError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
