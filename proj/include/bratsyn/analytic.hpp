#ifndef BRATSYN_ANALYTIC_HPP
#define BRATSYN_ANALYTIC_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bratsyn/rng.hpp"
#include "bratsyn/strategy.hpp"

namespace bratsyn {

// Strategy-specific leak thresholds for the closed-form model: expected
// repeats per surrogate value with a pool of 1,000. Overridable; see
// estimate_threshold for an independent Monte-Carlo check.
inline constexpr double kThresholdConsistent = 0.0;
inline constexpr double kThresholdRandom = 1.015;
inline constexpr double kThresholdMarkov = 2.028;

struct AnalyticQuery {
    std::size_t n_docs = 0;
    std::size_t entities_per_doc = 0;
    double fner = 0.01;
    double threshold = 0.0;
};

// Expected count of real (leaked) entities in the corpus.
inline double expected_real(const AnalyticQuery& q) {
    if (q.n_docs == 0 || q.entities_per_doc == 0)
        throw std::invalid_argument("total entity count must be >= 1");
    return q.fner * static_cast<double>(q.entities_per_doc) *
           static_cast<double>(q.n_docs);
}

namespace analytic_detail {

// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction,
// with the prefactor evaluated in log space. Good to ~1e-14 relative for
// the parameter ranges used here (a, b up to ~1.5e7).
inline double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 500;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

inline double betai(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                   a * std::log(x) + b * std::log1p(-x);
    double bt = std::exp(ln_bt);
    if (x < (a + 1.0) / (a + b + 2.0))
        return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

inline double log_binom_pmf(std::uint64_t n, std::uint64_t k, double p) {
    double lc = std::lgamma(static_cast<double>(n) + 1.0) -
                std::lgamma(static_cast<double>(k) + 1.0) -
                std::lgamma(static_cast<double>(n - k) + 1.0);
    double lp = k == 0 ? 0.0 : static_cast<double>(k) * std::log(p);
    double lq = k == n ? 0.0
                       : static_cast<double>(n - k) * std::log1p(-p);
    return lc + lp + lq;
}

} // namespace analytic_detail

// P(X >= k) for X ~ Binomial(n, p), via the incomplete-beta identity.
// Numerically stable for n up to ~1.5e7.
inline double binomial_sf_geq(std::uint64_t n, double p, std::uint64_t k) {
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    return analytic_detail::betai(static_cast<double>(k),
                                  static_cast<double>(n - k) + 1.0, p);
}

// Direct pmf summation in log space: the independent oracle for the
// incomplete-beta path (intended for n <= ~1e4).
inline double binomial_sf_geq_bruteforce(std::uint64_t n, double p,
                                         std::uint64_t k) {
    if (k == 0) return 1.0;
    if (k > n) return 0.0;
    double total = 0.0;
    // sum the smaller tail for accuracy
    double mean = static_cast<double>(n) * p;
    if (static_cast<double>(k) > mean) {
        for (std::uint64_t x = k; x <= n; ++x)
            total += std::exp(analytic_detail::log_binom_pmf(n, x, p));
        return std::min(total, 1.0);
    }
    for (std::uint64_t x = 0; x < k; ++x)
        total += std::exp(analytic_detail::log_binom_pmf(n, x, p));
    return std::max(0.0, 1.0 - total);
}

// P(real entities > threshold) with X ~ Binomial(N, fner). A fractional
// threshold t rounds up to the next attainable integer count, so
// P(X > 1.015) = P(X >= 2) and P(X > 0) = P(X >= 1).
inline double leak_probability(const AnalyticQuery& q) {
    double total = expected_real(q) / q.fner; // N as a double
    std::uint64_t n = static_cast<std::uint64_t>(std::llround(total));
    if (q.threshold < 0)
        throw std::invalid_argument("threshold must be >= 0");
    std::uint64_t k = static_cast<std::uint64_t>(std::floor(q.threshold)) + 1;
    return binomial_sf_geq(n, q.fner, k);
}

struct SweepRow {
    std::string strategy;
    double fner;
    std::size_t entities_per_doc;
    std::size_t n_docs;
    double leak_probability;
};

// Full Cartesian product over (strategy/threshold, fner, entities per doc,
// corpus size): the data surface behind the synthetic-corpus figures.
inline std::vector<SweepRow>
sweep(const std::vector<std::size_t>& entity_counts,
      const std::vector<double>& fners,
      const std::map<std::string, double>& thresholds,
      const std::vector<std::size_t>& doc_grid) {
    if (entity_counts.empty() || fners.empty() || thresholds.empty() ||
        doc_grid.empty())
        throw std::invalid_argument("sweep grids must be nonempty");
    std::vector<SweepRow> rows;
    for (const auto& [name, t] : thresholds) {
        for (double fner : fners) {
            for (std::size_t epd : entity_counts) {
                for (std::size_t docs : doc_grid) {
                    AnalyticQuery q{docs, epd, fner, t};
                    rows.push_back(
                        {name, fner, epd, docs, leak_probability(q)});
                }
            }
        }
    }
    return rows;
}

// 30 log-spaced corpus sizes covering the published 10..10,000 range.
inline std::vector<std::size_t> default_doc_grid(std::size_t lo = 10,
                                                 std::size_t hi = 10000,
                                                 std::size_t points = 30) {
    std::vector<std::size_t> grid;
    double llo = std::log(static_cast<double>(lo));
    double lhi = std::log(static_cast<double>(hi));
    std::size_t prev = 0;
    for (std::size_t i = 0; i < points; ++i) {
        double f = points == 1 ? 0.0
                               : static_cast<double>(i) /
                                     static_cast<double>(points - 1);
        auto v = static_cast<std::size_t>(
            std::llround(std::exp(llo + f * (lhi - llo))));
        if (v != prev) grid.push_back(v);
        prev = v;
    }
    return grid;
}

// Monte-Carlo estimate of the expected number of repeats per surrogate
// value in one chain (draws / distinct values), the quantity behind the
// published thresholds. Consistent chains degenerate to n_draws.
inline double estimate_threshold(const StrategyConfig& strategy,
                                 std::size_t pool_size, std::size_t n_draws,
                                 std::size_t trials, std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (n_draws < 1) throw std::invalid_argument("n_draws must be >= 1");
    Rng rng = Rng::derive(seed, "estimate_threshold");
    std::vector<std::uint32_t> stamp(pool_size, 0);
    std::uint32_t epoch = 0;
    double total = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        ++epoch;
        std::size_t distinct = 0;
        std::uint64_t value = 0;
        for (std::size_t i = 0; i < n_draws; ++i) {
            if (i == 0 || rng.bernoulli(strategy.p_new)) {
                value = rng.below(pool_size);
                if (stamp[value] != epoch) {
                    stamp[value] = epoch;
                    ++distinct;
                }
            }
        }
        if (distinct == 0) distinct = 1;
        total += static_cast<double>(n_draws) / static_cast<double>(distinct);
    }
    return total / static_cast<double>(trials);
}

} // namespace bratsyn

#endif
