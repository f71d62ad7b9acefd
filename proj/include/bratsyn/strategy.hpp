#ifndef BRATSYN_STRATEGY_HPP
#define BRATSYN_STRATEGY_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "bratsyn/brat.hpp"
#include "bratsyn/rng.hpp"
#include "bratsyn/surrogate.hpp"
#include "bratsyn/text.hpp"
#include "bratsyn/vocab.hpp"

namespace bratsyn {

enum class StrategyKind { consistent, random, markov, custom };

inline const char* strategy_name(StrategyKind k) {
    switch (k) {
    case StrategyKind::consistent: return "consistent";
    case StrategyKind::random: return "random";
    case StrategyKind::markov: return "markov";
    case StrategyKind::custom: return "custom";
    }
    return "?";
}

// Every strategy is the same 2-state chain (new vs repeat); the named kinds
// are fixed transition probabilities: consistent 0, markov 0.5, random 1.
struct StrategyConfig {
    StrategyKind kind = StrategyKind::markov;
    double p_new = 0.5;
    std::size_t pool_size = 1000;
    std::uint64_t seed = 0;

    static StrategyConfig make(StrategyKind kind, std::size_t pool_size = 1000,
                               std::uint64_t seed = 0, double custom_p = 0.5) {
        StrategyConfig c;
        c.kind = kind;
        c.pool_size = pool_size;
        c.seed = seed;
        switch (kind) {
        case StrategyKind::consistent: c.p_new = 0.0; break;
        case StrategyKind::random: c.p_new = 1.0; break;
        case StrategyKind::markov: c.p_new = 0.5; break;
        case StrategyKind::custom:
            if (custom_p < 0.0 || custom_p > 1.0)
                throw std::invalid_argument("p_new must be in [0,1]");
            c.p_new = custom_p;
            break;
        }
        return c;
    }
};

// One chain runs per distinct key per document, so a document mentioning two
// different patients keeps them on independent chains.
struct ChainKey {
    std::string doc_id;
    std::string category;
    std::string normalized_original; // "\xE2\x8A\xA5" (⊥) when no text

    bool operator==(const ChainKey&) const = default;
    bool operator<(const ChainKey& o) const {
        if (doc_id != o.doc_id) return doc_id < o.doc_id;
        if (category != o.category) return category < o.category;
        return normalized_original < o.normalized_original;
    }
};

inline constexpr const char* kNoSurfaceSentinel = "\xE2\x8A\xA5";

struct PlanEntry {
    std::size_t mention_index; // position among the document's mentions
    ChainKey key;
    std::string surrogate;
};

struct ReplacementPlan {
    std::vector<PlanEntry> assignments; // one per mention, mention order
    std::map<ChainKey, std::size_t> max_repeat_by_key;
};

// Largest multiplicity of any single value; 0 for an empty list.
inline std::size_t max_repeat_size(const std::vector<std::string>& values) {
    std::unordered_map<std::string, std::size_t> counts;
    std::size_t best = 0;
    for (const auto& v : values) best = std::max(best, ++counts[v]);
    return best;
}

// The 2-state chain over one key: the first mention always draws fresh,
// each later one draws fresh with probability p_new, otherwise repeats the
// immediately preceding surrogate. Fresh draws are uniform over the pool
// WITH replacement, so collisions can push the repeat size above 1 even at
// p_new = 1.
inline std::vector<std::string> chain_assign(std::size_t n_mentions,
                                             const StrategyConfig& config,
                                             const SurrogatePool& pool,
                                             Rng& rng) {
    if (n_mentions > 0 && pool.values.empty())
        throw GenerateError("empty surrogate pool for category " +
                            pool.category);
    std::vector<std::string> out;
    out.reserve(n_mentions);
    for (std::size_t i = 0; i < n_mentions; ++i) {
        if (i == 0 || rng.bernoulli(config.p_new)) {
            out.push_back(pool.values[rng.below(pool.values.size())]);
        } else {
            out.push_back(out.back());
        }
    }
    return out;
}

// Uniform random permutation (Fisher-Yates). Breaks up runs of identical
// surrogates without changing the multiset, so max_repeat_size is invariant.
template <typename T>
inline void disperse(std::vector<T>& values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        std::size_t j = rng.below(i);
        std::swap(values[i - 1], values[j]);
    }
}

template <typename T>
inline std::vector<T> disperse_copy(std::vector<T> values, Rng& rng) {
    disperse(values, rng);
    return values;
}

namespace strategy_detail {

// Mention order: by first span start, then input order.
inline std::vector<std::size_t> mention_order(const DocumentBundle& bundle) {
    std::vector<std::size_t> order(bundle.annotations.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                         return bundle.annotations[a].spans[0].start <
                                bundle.annotations[b].spans[0].start;
                     });
    return order;
}

} // namespace strategy_detail

// Builds the per-document replacement plan: chains per key for pool-backed
// and format-preserving categories, consistent offsets for date/age/time
// (offsets are scope-wide, so chains do not apply to them), and the
// bracketed-label fallback for unregistered categories.
inline ReplacementPlan plan_document(
    const DocumentBundle& bundle, const StrategyConfig& config,
    const std::map<std::string, SurrogatePool>& pools,
    const CategoryRegistry& registry, const Vocabulary& vocab,
    const OffsetPolicy& policy, Rng& rng,
    std::vector<Warning>* warnings = nullptr) {
    ReplacementPlan plan;
    const auto order = strategy_detail::mention_order(bundle);
    const std::size_t n = order.size();

    // group mention slots by chain key, in first-appearance order
    std::vector<ChainKey> keys;
    std::map<ChainKey, std::vector<std::size_t>> groups;
    std::vector<ChainKey> key_of(n);
    for (std::size_t mi = 0; mi < n; ++mi) {
        const auto& rec = bundle.annotations[order[mi]];
        ChainKey key;
        key.doc_id = bundle.doc_id;
        key.category = rec.category;
        key.normalized_original =
            rec.surface ? normalize_surface(*rec.surface)
                        : std::string(kNoSurfaceSentinel);
        if (key.normalized_original.empty())
            key.normalized_original = kNoSurfaceSentinel;
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) keys.push_back(key);
        it->second.push_back(mi);
        key_of[mi] = std::move(key);
    }

    plan.assignments.resize(n);
    for (const auto& key : keys) {
        const auto& slots = groups[key];
        const CategorySpec* spec = registry.find(key.category);
        std::vector<std::string> values;
        values.reserve(slots.size());
        if (spec == nullptr) {
            std::string v;
            for (std::size_t s = 0; s < slots.size(); ++s) {
                if (s == 0)
                    v = generate_unknown(key.category, warnings, bundle.doc_id);
                values.push_back(v);
            }
        } else if (is_offset_kind(spec->kind) ||
                   spec->kind == GeneratorKind::passthrough_label) {
            // offsets are deterministic per scope; every mention shifts by
            // the same amount independently
            for (std::size_t slot : slots) {
                const auto& rec = bundle.annotations[order[slot]];
                values.push_back(generate(*spec, rec.surface, rng, vocab,
                                          policy, warnings, bundle.doc_id));
            }
        } else {
            // 2-state chain, then non-linear dispersal within the key
            auto pool_it = pools.find(key.category);
            const SurrogatePool* pool =
                pool_it == pools.end() ? nullptr : &pool_it->second;
            const auto& first_rec = bundle.annotations[order[slots[0]]];
            std::string norm_orig =
                first_rec.surface ? normalize_surface(*first_rec.surface)
                                  : std::string();
            auto fresh = [&]() -> std::string {
                if (pool != nullptr && !pool->values.empty()) {
                    for (int attempt = 0; attempt < 16; ++attempt) {
                        const std::string& v =
                            pool->values[rng.below(pool->values.size())];
                        if (norm_orig.empty() ||
                            normalize_surface(v) != norm_orig)
                            return v;
                    }
                    return pool->values[rng.below(pool->values.size())];
                }
                return generate(*spec, first_rec.surface, rng, vocab, policy,
                                warnings, bundle.doc_id);
            };
            for (std::size_t s = 0; s < slots.size(); ++s) {
                if (s == 0 || rng.bernoulli(config.p_new))
                    values.push_back(fresh());
                else
                    values.push_back(values.back());
            }
            disperse(values, rng);
        }
        plan.max_repeat_by_key[key] = max_repeat_size(values);
        for (std::size_t s = 0; s < slots.size(); ++s) {
            plan.assignments[slots[s]] =
                PlanEntry{slots[s], key, std::move(values[s])};
        }
    }
    return plan;
}

} // namespace bratsyn

#endif
