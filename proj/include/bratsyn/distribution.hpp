#ifndef BRATSYN_DISTRIBUTION_HPP
#define BRATSYN_DISTRIBUTION_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bratsyn/rng.hpp"

namespace bratsyn {

// One (document, category) cell of a corpus PHI distribution. This is the
// simulator's entire view of a corpus; no text is involved.
struct PhiEntry {
    std::string doc_id;
    std::string patient_id;
    std::string category;
    bool critical = true;
    std::size_t mention_count = 1;
};

struct PhiDistribution {
    std::vector<PhiEntry> entries;
    bool empty() const { return entries.empty(); }
};

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr const char* kDistributionHeader =
    "doc_id,patient_id,category,critical,mention_count";

namespace dist_detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

} // namespace dist_detail

inline PhiDistribution read_distribution_csv(std::istream& in) {
    PhiDistribution dist;
    std::string line;
    std::size_t row = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (line == kDistributionHeader) continue;
            throw CsvError("row 1: expected header '" +
                           std::string(kDistributionHeader) + "'");
        }
        auto f = dist_detail::split_csv_line(line);
        if (f.size() != 5)
            throw CsvError("row " + std::to_string(row) +
                           ": expected 5 fields, got " +
                           std::to_string(f.size()));
        PhiEntry e;
        e.doc_id = f[0];
        e.patient_id = f[1].empty() ? f[0] : f[1];
        e.category = f[2];
        if (f[3] == "1" || f[3] == "true") e.critical = true;
        else if (f[3] == "0" || f[3] == "false") e.critical = false;
        else
            throw CsvError("row " + std::to_string(row) +
                           ": critical must be 0/1/true/false");
        try {
            long long v = std::stoll(f[4]);
            if (v < 0) throw std::invalid_argument("negative");
            e.mention_count = static_cast<std::size_t>(v);
        } catch (const std::exception&) {
            throw CsvError("row " + std::to_string(row) +
                           ": bad mention_count '" + f[4] + "'");
        }
        dist.entries.push_back(std::move(e));
    }
    return dist;
}

inline PhiDistribution read_distribution_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open distribution file " + path);
    return read_distribution_csv(in);
}

inline void write_distribution_csv(const PhiDistribution& dist,
                                   std::ostream& out) {
    out << kDistributionHeader << "\n";
    for (const auto& e : dist.entries) {
        out << e.doc_id << ',' << e.patient_id << ',' << e.category << ','
            << (e.critical ? 1 : 0) << ',' << e.mention_count << "\n";
    }
}

// ---------------------------------------------------------------------------
// Synthetic distributions matching published summary statistics
// ---------------------------------------------------------------------------

namespace dist_detail {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Mean of a lognormal(mu, sigma) truncated to [a, b].
inline double truncated_lognormal_mean(double mu, double sigma, double a,
                                       double b) {
    double la = std::log(a), lb = std::log(b);
    double za = (la - mu) / sigma, zb = (lb - mu) / sigma;
    double denom = normal_cdf(zb) - normal_cdf(za);
    if (denom <= 0) return 0.0;
    double num = normal_cdf(zb - sigma) - normal_cdf(za - sigma);
    return std::exp(mu + 0.5 * sigma * sigma) * num / denom;
}

// Picks sigma (with mu pinned by the median) so the truncated mean hits the
// target. The truncated mean is not monotone in sigma over the whole axis
// (it peaks and falls back), so a grid scan is used, and among near-equal
// fits the SMALLEST sigma wins: larger roots on the far branch distort the
// sample median badly.
inline double calibrate_sigma(double mu, double target_mean, double lo,
                              double hi) {
    double best_sigma = 0.5, best_err = 1e300;
    for (double s = 0.02; s <= 4.0; s += 0.002) {
        double err =
            std::abs(truncated_lognormal_mean(mu, s, lo, hi) - target_mean);
        if (err + 1e-9 < best_err) {
            best_err = err;
            best_sigma = s;
        }
        if (err < 0.005 * std::max(1.0, target_mean)) break;
    }
    return best_sigma;
}

} // namespace dist_detail

// Builds a synthetic per-document critical-count distribution whose sample
// statistics track published corpus summaries (mean, median, range).
// Documents are assigned to patients in consecutive blocks of
// docs_per_patient.
inline PhiDistribution synth_distribution(double mean, double median,
                                          std::size_t min_count,
                                          std::size_t max_count,
                                          std::size_t n_docs,
                                          std::size_t docs_per_patient,
                                          std::uint64_t seed,
                                          const std::string& category = "IDNUM") {
    if (n_docs == 0) throw std::invalid_argument("n_docs must be >= 1");
    if (docs_per_patient == 0) docs_per_patient = 1;
    if (min_count > max_count || median < static_cast<double>(min_count) ||
        median > static_cast<double>(max_count))
        throw std::invalid_argument("require min <= median <= max");
    if (mean < static_cast<double>(min_count) ||
        mean > static_cast<double>(max_count))
        throw std::invalid_argument("target mean outside [min, max]");

    std::vector<std::size_t> counts(n_docs);
    if (min_count == max_count) {
        std::fill(counts.begin(), counts.end(), min_count);
    } else {
        double lo = static_cast<double>(min_count);
        double hi = static_cast<double>(max_count);
        double target = mean;
        // resample with an adjusted target until the sample mean lands
        // close; each iteration reuses a fresh derived stream so the result
        // stays a pure function of the seed
        for (int iter = 0; iter < 12; ++iter) {
            double mu = std::log(median);
            double sigma = dist_detail::calibrate_sigma(mu, target, lo, hi);
            Rng rng = Rng::derive(seed, "synthdist:" +
                                            std::to_string(iter));
            double sum = 0;
            for (std::size_t i = 0; i < n_docs; ++i) {
                double v;
                do {
                    v = std::exp(mu + sigma * rng.normal());
                } while (v < lo || v > hi);
                counts[i] = static_cast<std::size_t>(std::llround(v));
                counts[i] = std::clamp<std::size_t>(counts[i], min_count,
                                                    max_count);
                sum += static_cast<double>(counts[i]);
            }
            double sample_mean = sum / static_cast<double>(n_docs);
            if (std::abs(sample_mean - mean) <= 0.02 * mean) break;
            target *= mean / sample_mean;
            target = std::clamp(target, lo, hi);
        }
    }

    PhiDistribution dist;
    dist.entries.reserve(n_docs);
    for (std::size_t i = 0; i < n_docs; ++i) {
        PhiEntry e;
        e.doc_id = "doc" + std::to_string(i);
        e.patient_id = "pat" + std::to_string(i / docs_per_patient);
        e.category = category;
        e.critical = true;
        e.mention_count = std::max<std::size_t>(counts[i], 1);
        dist.entries.push_back(std::move(e));
    }
    return dist;
}

// Published corpus summaries (critical entities per document).
inline PhiDistribution uab_like_distribution(std::size_t n_docs = 500,
                                             std::size_t docs_per_patient = 5,
                                             std::uint64_t seed = 0) {
    return synth_distribution(388.5, 224, 2, 2545, n_docs, docs_per_patient,
                              seed);
}

inline PhiDistribution mimic_like_distribution(std::size_t n_docs = 500,
                                               std::size_t docs_per_patient = 5,
                                               std::uint64_t seed = 0) {
    return synth_distribution(6.8, 5, 2, 76, n_docs, docs_per_patient, seed);
}

// ---------------------------------------------------------------------------
// Summary statistics (the computable form of the published corpus tables)
// ---------------------------------------------------------------------------

struct DistStats {
    std::size_t n = 0;
    double mean = 0;
    double median = 0;
    std::size_t min = 0;
    std::size_t max = 0;
};

inline DistStats summarize_counts(std::vector<std::size_t> counts) {
    DistStats s;
    s.n = counts.size();
    if (counts.empty()) return s;
    std::sort(counts.begin(), counts.end());
    double sum = 0;
    for (auto c : counts) sum += static_cast<double>(c);
    s.mean = sum / static_cast<double>(counts.size());
    std::size_t mid = counts.size() / 2;
    s.median = counts.size() % 2 ? static_cast<double>(counts[mid])
                                 : (static_cast<double>(counts[mid - 1]) +
                                    static_cast<double>(counts[mid])) /
                                       2.0;
    s.min = counts.front();
    s.max = counts.back();
    return s;
}

struct CorpusStats {
    DistStats per_document;
    DistStats per_patient;
};

// Critical-entity distribution statistics at document and patient level.
// Documents with zero critical mentions still contribute a zero count.
inline CorpusStats distribution_stats(const PhiDistribution& dist) {
    std::map<std::string, std::size_t> per_doc;
    std::map<std::string, std::string> doc_patient;
    for (const auto& e : dist.entries) {
        per_doc.try_emplace(e.doc_id, 0);
        doc_patient[e.doc_id] = e.patient_id;
        if (e.critical) per_doc[e.doc_id] += e.mention_count;
    }
    std::map<std::string, std::size_t> per_patient;
    std::vector<std::size_t> doc_counts;
    for (const auto& [doc, count] : per_doc) {
        doc_counts.push_back(count);
        per_patient[doc_patient[doc]] += count;
    }
    std::vector<std::size_t> patient_counts;
    for (const auto& [pat, count] : per_patient)
        patient_counts.push_back(count);
    CorpusStats stats;
    stats.per_document = summarize_counts(std::move(doc_counts));
    stats.per_patient = summarize_counts(std::move(patient_counts));
    return stats;
}

} // namespace bratsyn

#endif
