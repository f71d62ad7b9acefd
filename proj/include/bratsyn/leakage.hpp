#ifndef BRATSYN_LEAKAGE_HPP
#define BRATSYN_LEAKAGE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bratsyn/distribution.hpp"
#include "bratsyn/rng.hpp"
#include "bratsyn/strategy.hpp"

namespace bratsyn {

enum class Accounting { pooled, per_type };

struct SimConfig {
    double fner = 0.01;
    std::size_t runs = 1000;
    StrategyConfig strategy;
    Accounting accounting = Accounting::pooled;
    std::uint64_t seed = 0;
};

struct RunCounts {
    std::size_t docs_leaked = 0;
    std::size_t patients_leaked = 0;
};

struct LeakSummary {
    double doc_leak_rate = 0;
    double doc_leak_stderr = 0;
    double patient_leak_rate = 0;
    double patient_leak_stderr = 0;
    std::size_t n_docs = 0;
    std::size_t n_patients = 0;
    std::vector<RunCounts> per_run;
};

// FN injection: each critical mention independently becomes a false
// negative with probability fner.
inline std::size_t inject_fn(std::size_t mention_count, double fner,
                             Rng& rng) {
    return static_cast<std::size_t>(
        binomial_count(mention_count, fner, rng));
}

// Leak predicate: under Consistent any FN identifies the document; under
// the other strategies the FN count must strictly exceed the maximum
// surrogate repeat size to stand out.
inline bool doc_leak(StrategyKind kind, std::size_t fn_count,
                     std::size_t max_repeat) {
    if (kind == StrategyKind::consistent) return fn_count >= 1;
    return fn_count > max_repeat;
}

// Simulates one chain of n draws and returns the maximum multiplicity of
// any single pool value. Value counting uses an epoch-stamped scratch array
// so repeated calls are allocation-free.
class ChainSimulator {
public:
    std::size_t max_repeat(std::size_t n, double p_new, std::size_t pool_size,
                           Rng& rng) {
        if (n == 0) return 0;
        if (pool_size == 0)
            throw GenerateError("empty pool in chain simulation");
        if (p_new <= 0.0) return n; // one value the whole way
        ensure(pool_size);
        ++epoch_;
        std::size_t best = 0;
        std::uint64_t value = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 0 || rng.bernoulli(p_new)) value = rng.below(pool_size);
            std::uint32_t c = stamp_[value] == epoch_ ? ++count_[value]
                                                      : (stamp_[value] = epoch_,
                                                         count_[value] = 1);
            if (c > best) best = c;
        }
        return best;
    }

private:
    void ensure(std::size_t pool_size) {
        if (count_.size() < pool_size) {
            count_.assign(pool_size, 0);
            stamp_.assign(pool_size, 0);
            epoch_ = 0;
        }
    }
    std::vector<std::uint32_t> count_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
};

namespace leakage_detail {

struct DocView {
    std::string patient;
    std::vector<std::size_t> critical_counts; // one per critical category
    std::size_t total_critical = 0;
};

inline std::vector<DocView> group_docs(const PhiDistribution& dist) {
    std::map<std::string, DocView> by_doc;
    for (const auto& e : dist.entries) {
        auto& doc = by_doc[e.doc_id];
        doc.patient = e.patient_id;
        if (e.critical && e.mention_count > 0) {
            doc.critical_counts.push_back(e.mention_count);
            doc.total_critical += e.mention_count;
        }
    }
    std::vector<DocView> docs;
    docs.reserve(by_doc.size());
    for (auto& [id, doc] : by_doc) docs.push_back(std::move(doc));
    return docs;
}

inline void mean_stderr(const std::vector<double>& xs, double& mean,
                        double& se) {
    mean = 0;
    se = 0;
    if (xs.empty()) return;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    if (xs.size() < 2) return;
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    se = std::sqrt(ss / static_cast<double>(xs.size() - 1) /
                   static_cast<double>(xs.size()));
}

} // namespace leakage_detail

// Monte-Carlo leakage estimate. Per run and document: draw FN counts over
// the critical mentions, simulate the strategy's chains over the same
// counts, apply the leak predicate, and OR document leaks up to patients.
// Pooled accounting compares the document-level FN count against the
// document-level maximum repeat size (max over its chains); per-type
// accounting applies the predicate per category.
inline LeakSummary simulate(const PhiDistribution& dist, const SimConfig& cfg,
                            std::size_t jobs = 1) {
    if (dist.empty())
        throw std::invalid_argument("empty distribution");
    if (cfg.runs < 1) throw std::invalid_argument("runs must be >= 1");
    if (cfg.fner <= 0.0 || cfg.fner >= 1.0)
        throw std::invalid_argument("fner must be in (0,1)");

    auto docs = leakage_detail::group_docs(dist);
    std::vector<std::size_t> doc_patient(docs.size());
    std::map<std::string, std::size_t> patient_index;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        auto [it, ignored] =
            patient_index.try_emplace(docs[i].patient, patient_index.size());
        doc_patient[i] = it->second;
    }

    LeakSummary summary;
    summary.n_docs = docs.size();
    summary.n_patients = patient_index.size();
    summary.per_run.resize(cfg.runs);

    const StrategyKind kind = cfg.strategy.kind;
    const double p_new = cfg.strategy.p_new;
    const std::size_t K = cfg.strategy.pool_size;

    // run seeds are derived from the run index, so the result is identical
    // for any worker count
    auto run_block = [&](std::size_t begin, std::size_t end) {
        ChainSimulator chain;
        std::vector<char> patient_leaked(patient_index.size());
        for (std::size_t run = begin; run < end; ++run) {
            Rng rng = Rng::derive(cfg.seed, run);
            std::fill(patient_leaked.begin(), patient_leaked.end(), 0);
            std::size_t docs_leaked = 0;
            for (std::size_t di = 0; di < docs.size(); ++di) {
                const auto& doc = docs[di];
                bool leaked = false;
                if (kind == StrategyKind::consistent) {
                    // any FN leaks; chains are irrelevant
                    if (cfg.accounting == Accounting::pooled) {
                        leaked =
                            inject_fn(doc.total_critical, cfg.fner, rng) >= 1;
                    } else {
                        for (std::size_t c : doc.critical_counts)
                            if (inject_fn(c, cfg.fner, rng) >= 1)
                                leaked = true;
                    }
                } else if (cfg.accounting == Accounting::pooled) {
                    std::size_t fn =
                        inject_fn(doc.total_critical, cfg.fner, rng);
                    std::size_t max_rep = 0;
                    for (std::size_t c : doc.critical_counts)
                        max_rep = std::max(
                            max_rep, chain.max_repeat(c, p_new, K, rng));
                    leaked = doc_leak(kind, fn, max_rep);
                } else {
                    for (std::size_t c : doc.critical_counts) {
                        std::size_t fn = inject_fn(c, cfg.fner, rng);
                        std::size_t max_rep =
                            chain.max_repeat(c, p_new, K, rng);
                        if (doc_leak(kind, fn, max_rep)) leaked = true;
                    }
                }
                if (leaked) {
                    ++docs_leaked;
                    patient_leaked[doc_patient[di]] = 1;
                }
            }
            std::size_t patients_leaked = 0;
            for (char c : patient_leaked) patients_leaked += c;
            summary.per_run[run] = {docs_leaked, patients_leaked};
        }
    };

    if (jobs <= 1 || cfg.runs < 2) {
        run_block(0, cfg.runs);
    } else {
        jobs = std::min(jobs, cfg.runs);
        std::vector<std::thread> workers;
        std::size_t chunk = (cfg.runs + jobs - 1) / jobs;
        for (std::size_t w = 0; w < jobs; ++w) {
            std::size_t begin = w * chunk;
            std::size_t end = std::min(cfg.runs, begin + chunk);
            if (begin >= end) break;
            workers.emplace_back(run_block, begin, end);
        }
        for (auto& t : workers) t.join();
    }

    std::vector<double> doc_rates(cfg.runs), patient_rates(cfg.runs);
    for (std::size_t run = 0; run < cfg.runs; ++run) {
        doc_rates[run] = static_cast<double>(summary.per_run[run].docs_leaked) /
                         static_cast<double>(summary.n_docs);
        patient_rates[run] =
            static_cast<double>(summary.per_run[run].patients_leaked) /
            static_cast<double>(summary.n_patients);
    }
    leakage_detail::mean_stderr(doc_rates, summary.doc_leak_rate,
                                summary.doc_leak_stderr);
    leakage_detail::mean_stderr(patient_rates, summary.patient_leak_rate,
                                summary.patient_leak_stderr);
    return summary;
}

// Paired histograms: maximum surrogate repeat size per chain vs FN count per
// chain, accumulated across runs. Consistent reports a constant repeat size
// of 1 by convention (its leak predicate never consults the repeat size).
struct RepeatHistograms {
    std::map<std::size_t, std::size_t> max_repeat; // value -> count
    std::map<std::size_t, std::size_t> fn_count;   // value -> count
};

inline RepeatHistograms repeat_size_histogram(const PhiDistribution& dist,
                                              const StrategyConfig& strategy,
                                              std::size_t runs, double fner,
                                              std::uint64_t seed) {
    RepeatHistograms hist;
    auto docs = leakage_detail::group_docs(dist);
    ChainSimulator chain;
    for (std::size_t run = 0; run < runs; ++run) {
        Rng rng = Rng::derive(seed, run);
        for (const auto& doc : docs) {
            for (std::size_t c : doc.critical_counts) {
                std::size_t rep =
                    strategy.kind == StrategyKind::consistent
                        ? 1
                        : chain.max_repeat(c, strategy.p_new,
                                           strategy.pool_size, rng);
                ++hist.max_repeat[rep];
                ++hist.fn_count[inject_fn(c, fner, rng)];
            }
        }
    }
    return hist;
}

// q in [0,1] quantile of a histogram (lower interpolation).
inline std::size_t histogram_quantile(
    const std::map<std::size_t, std::size_t>& hist, double q) {
    std::size_t total = 0;
    for (const auto& [v, c] : hist) total += c;
    if (total == 0) return 0;
    std::size_t target = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(total)));
    if (target == 0) target = 1;
    std::size_t seen = 0;
    for (const auto& [v, c] : hist) {
        seen += c;
        if (seen >= target) return v;
    }
    return hist.rbegin()->first;
}

} // namespace bratsyn

#endif
