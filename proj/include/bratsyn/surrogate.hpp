#ifndef BRATSYN_SURROGATE_HPP
#define BRATSYN_SURROGATE_HPP

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "bratsyn/brat.hpp"
#include "bratsyn/dates.hpp"
#include "bratsyn/rng.hpp"
#include "bratsyn/text.hpp"
#include "bratsyn/vocab.hpp"

namespace bratsyn {

enum class OffsetScope { per_corpus, per_patient, per_document };

// One set of offsets per scope unit, so intra-scope temporal relationships
// survive the shift (interval between any two dates is preserved).
struct OffsetPolicy {
    std::int64_t date_offset_days = 0; // never 0 when drawn
    int age_offset_years = 0;          // |years| <= 5, applied to ages < 90
    int time_offset_minutes = 0;       // +-[1, 720]
    OffsetScope scope = OffsetScope::per_patient;
    bool month_first = true; // M/D/Y reading of ambiguous numeric dates
};

inline OffsetPolicy draw_offset_policy(Rng& rng,
                                       OffsetScope scope = OffsetScope::per_patient,
                                       bool month_first = true) {
    OffsetPolicy p;
    p.scope = scope;
    p.month_first = month_first;
    std::int64_t mag = rng.range(30, 365);
    p.date_offset_days = rng.bernoulli(0.5) ? mag : -mag;
    int age = static_cast<int>(rng.range(1, 5));
    p.age_offset_years = rng.bernoulli(0.5) ? age : -age;
    int mins = static_cast<int>(rng.range(1, 720));
    p.time_offset_minutes = rng.bernoulli(0.5) ? mins : -mins;
    return p;
}

struct SurrogatePool {
    std::string category;
    std::vector<std::string> values; // pairwise distinct
    std::size_t size() const { return values.size(); }
};

struct GenerateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace surrogate_detail {

inline constexpr char kDigits[] = "0123456789";
inline constexpr char kUpper[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
inline constexpr char kLower[] = "abcdefghijklmnopqrstuvwxyz";

inline char random_digit(Rng& rng) { return kDigits[rng.below(10)]; }
inline char random_upper(Rng& rng) { return kUpper[rng.below(26)]; }
inline char random_lower(Rng& rng) { return kLower[rng.below(26)]; }

// Positional character-class regeneration: digits stay digits, upper stays
// upper, lower stays lower, everything else (separators, unicode) is copied
// verbatim. Multi-byte UTF-8 sequences copy through untouched because their
// bytes never match the ASCII classes.
inline std::string format_preserving(std::string_view original, Rng& rng) {
    std::string out;
    out.reserve(original.size());
    for (char c : original) {
        if (is_ascii_digit(c)) out.push_back(random_digit(rng));
        else if (is_ascii_upper(c)) out.push_back(random_upper(rng));
        else if (is_ascii_lower(c)) out.push_back(random_lower(rng));
        else out.push_back(c);
    }
    return out;
}

inline std::string canonical_phone(Rng& rng) {
    std::string out;
    for (int i = 0; i < 3; ++i) out.push_back(random_digit(rng));
    out.push_back('-');
    out += "555-"; // reserved fictional exchange
    for (int i = 0; i < 4; ++i) out.push_back(random_digit(rng));
    return out;
}

inline std::string canonical_id(Rng& rng) {
    std::string out;
    out.push_back(random_upper(rng));
    out.push_back(random_upper(rng));
    for (int i = 0; i < 6; ++i) out.push_back(random_digit(rng));
    return out;
}

inline std::string canonical_alnum(Rng& rng) {
    std::string out;
    for (int i = 0; i < 8; ++i) {
        std::uint64_t r = rng.below(36);
        out.push_back(r < 10 ? kDigits[r] : kUpper[r - 10]);
    }
    return out;
}

inline std::string random_email(Rng& rng, const Vocabulary& vocab) {
    const auto& names = vocab.list("PATIENT.txt");
    const auto& domains = vocab.list("EMAIL_DOMAIN.txt");
    std::string full = names[rng.below(names.size())];
    std::string local;
    for (char c : full) {
        if (c == ' ') local.push_back('.');
        else if (is_ascii_upper(c)) local.push_back(static_cast<char>(c + 32));
        else local.push_back(c);
    }
    local += std::to_string(rng.below(90) + 10);
    return local + "@" + domains[rng.below(domains.size())];
}

inline std::string random_url(Rng& rng, const Vocabulary& vocab) {
    const auto& words = vocab.list("URL_WORD.txt");
    std::string host = words[rng.below(words.size())];
    host += std::to_string(rng.below(900) + 100);
    std::string path = words[rng.below(words.size())];
    return "https://www." + host + ".example.org/" + path;
}

inline std::string random_canonical_date(Rng& rng) {
    int year = static_cast<int>(rng.range(1990, 2024));
    unsigned month = static_cast<unsigned>(rng.range(1, 12));
    unsigned day =
        static_cast<unsigned>(rng.range(1, static_cast<int>(days_in_month(year, month))));
    return dates_detail::pad2(month) + "/" + dates_detail::pad2(day) + "/" +
           std::to_string(year);
}

} // namespace surrogate_detail

// Shifts any recognized date surface by policy.date_offset_days, keeping the
// surface's own rendering (separator, padding, 2- vs 4-digit year, name
// casing and abbreviation). Unrecognized date-like text falls back to a
// random canonical date and a warning.
inline std::string offset_date(const std::string& original,
                               const OffsetPolicy& policy, Rng& rng,
                               std::vector<Warning>* warnings = nullptr,
                               const std::string& doc_id = {}) {
    auto parsed = parse_date(original, policy.month_first);
    if (!parsed) {
        if (warnings)
            warnings->push_back(
                {doc_id, "date_fallback", "unparseable date '" + original + "'"});
        return surrogate_detail::random_canonical_date(rng);
    }
    return render_shifted(*parsed, policy.date_offset_days);
}

// Ages < 90 shift by the policy offset, clamped to [1, 89]; ages >= 90 are
// replaced by a uniform value in [90, 99]; non-numeric text gets a random
// adult age. Surrounding non-numeric text is kept in place.
inline std::string offset_age(const std::string& original, Rng& rng,
                              const OffsetPolicy& policy) {
    std::size_t begin = std::string::npos, end = 0;
    for (std::size_t i = 0; i < original.size(); ++i) {
        if (is_ascii_digit(original[i])) {
            begin = i;
            end = i;
            while (end < original.size() && is_ascii_digit(original[end]))
                ++end;
            break;
        }
    }
    if (begin == std::string::npos)
        return std::to_string(rng.range(20, 89));
    long age = std::stol(original.substr(begin, end - begin));
    long shifted;
    if (age >= 90) {
        shifted = rng.range(90, 99);
    } else {
        shifted = std::clamp<long>(age + policy.age_offset_years, 1, 89);
    }
    return original.substr(0, begin) + std::to_string(shifted) +
           original.substr(end);
}

// Shifts HH:MM[:SS][ AM/PM] clock times by the per-scope minute offset,
// wrapping around midnight and preserving the 12/24-hour rendering.
inline std::string offset_time(const std::string& original,
                               const OffsetPolicy& policy, Rng& rng,
                               std::vector<Warning>* warnings = nullptr,
                               const std::string& doc_id = {}) {
    // parse
    std::size_t i = 0;
    auto read_num = [&](int& out, std::size_t max_digits) {
        std::size_t j = i;
        int v = 0;
        while (j < original.size() && is_ascii_digit(original[j]) &&
               j - i < max_digits) {
            v = v * 10 + (original[j] - '0');
            ++j;
        }
        if (j == i) return false;
        out = v;
        i = j;
        return true;
    };
    int hour = 0, minute = 0, second = -1;
    bool ok = read_num(hour, 2);
    bool pad_hour = ok && i >= 2; // hour written with two digits
    ok = ok && i < original.size() && original[i] == ':' &&
         (++i, read_num(minute, 2));
    if (ok && i < original.size() && original[i] == ':') {
        ++i;
        ok = read_num(second, 2);
    }
    std::string suffix = ok ? original.substr(i) : std::string();
    std::string suffix_low = dates_detail::lower(suffix);
    bool is_pm = suffix_low.find("pm") != std::string::npos ||
                 suffix_low.find("p.m") != std::string::npos;
    bool is_am = suffix_low.find("am") != std::string::npos ||
                 suffix_low.find("a.m") != std::string::npos;
    bool twelve_hour = is_pm || is_am;
    bool suffix_clean =
        suffix.empty() || twelve_hour ||
        suffix.find_first_not_of(" \t") == std::string::npos;
    if (!ok || hour > 23 || minute > 59 || second > 59 || !suffix_clean ||
        (twelve_hour && (hour < 1 || hour > 12))) {
        if (warnings)
            warnings->push_back(
                {doc_id, "time_fallback", "unparseable time '" + original + "'"});
        int h = static_cast<int>(rng.range(0, 23));
        int m = static_cast<int>(rng.range(0, 59));
        return dates_detail::pad2(static_cast<unsigned>(h)) + ":" +
               dates_detail::pad2(static_cast<unsigned>(m));
    }
    int h24 = hour;
    if (twelve_hour) {
        h24 = hour % 12 + (is_pm ? 12 : 0);
    }
    int total = h24 * 60 + minute + policy.time_offset_minutes;
    total = ((total % 1440) + 1440) % 1440;
    int nh = total / 60, nm = total % 60;
    std::string out;
    if (twelve_hour) {
        bool pm = nh >= 12;
        int h12 = nh % 12 == 0 ? 12 : nh % 12;
        out = pad_hour ? dates_detail::pad2(static_cast<unsigned>(h12))
                       : std::to_string(h12);
        out += ":" + dates_detail::pad2(static_cast<unsigned>(nm));
        if (second >= 0)
            out += ":" + dates_detail::pad2(static_cast<unsigned>(second));
        // swap the meridiem token in the original suffix if needed
        std::string new_suffix = suffix;
        if (pm != is_pm) {
            for (std::size_t k = 0; k < new_suffix.size(); ++k) {
                char c = new_suffix[k];
                if (c == 'a' || c == 'A') new_suffix[k] = pm ? (c == 'a' ? 'p' : 'P') : c;
                else if (c == 'p' || c == 'P') new_suffix[k] = pm ? c : (c == 'p' ? 'a' : 'A');
            }
        }
        out += new_suffix;
    } else {
        out = pad_hour || nh >= 10
                  ? dates_detail::pad2(static_cast<unsigned>(nh))
                  : std::to_string(nh);
        out += ":" + dates_detail::pad2(static_cast<unsigned>(nm));
        if (second >= 0)
            out += ":" + dates_detail::pad2(static_cast<unsigned>(second));
        out += suffix;
    }
    return out;
}

// Single-value surrogate generation for a registered category. List kinds
// draw from the vocabulary (never returning the original), format kinds
// mirror the original's character classes, offset kinds delegate to the
// offset functions.
inline std::string generate(const CategorySpec& spec,
                            const std::optional<std::string>& original,
                            Rng& rng, const Vocabulary& vocab,
                            const OffsetPolicy& policy,
                            std::vector<Warning>* warnings = nullptr,
                            const std::string& doc_id = {}) {
    using namespace surrogate_detail;
    switch (spec.kind) {
    case GeneratorKind::name_list:
    case GeneratorKind::location_list:
    case GeneratorKind::hospital_list:
    case GeneratorKind::organization_list:
    case GeneratorKind::profession_list: {
        const auto& values = vocab.list(spec.vocab_file);
        std::string norm_orig =
            original ? normalize_surface(*original) : std::string();
        for (int attempt = 0; attempt < 16; ++attempt) {
            const std::string& v = values[rng.below(values.size())];
            if (norm_orig.empty() || normalize_surface(v) != norm_orig)
                return v;
        }
        return values[rng.below(values.size())];
    }
    case GeneratorKind::phone_format:
        return original ? format_preserving(*original, rng)
                        : canonical_phone(rng);
    case GeneratorKind::id_format:
        return original ? format_preserving(*original, rng)
                        : canonical_id(rng);
    case GeneratorKind::alphanumeric:
        return original ? format_preserving(*original, rng)
                        : canonical_alnum(rng);
    case GeneratorKind::email:
        return random_email(rng, vocab);
    case GeneratorKind::url:
        return random_url(rng, vocab);
    case GeneratorKind::date_offset:
        return original ? offset_date(*original, policy, rng, warnings, doc_id)
                        : random_canonical_date(rng);
    case GeneratorKind::age_offset:
        return original ? offset_age(*original, rng, policy)
                        : std::to_string(rng.range(20, 89));
    case GeneratorKind::time_offset:
        if (original) return offset_time(*original, policy, rng, warnings, doc_id);
        return dates_detail::pad2(static_cast<unsigned>(rng.range(0, 23))) +
               ":" + dates_detail::pad2(static_cast<unsigned>(rng.range(0, 59)));
    case GeneratorKind::passthrough_label:
        return "[" + spec.category + "]";
    }
    return "[" + spec.category + "]";
}

// Fallback for labels missing from the registry: emit the bracketed label
// and report it once per mention.
inline std::string generate_unknown(const std::string& label,
                                    std::vector<Warning>* warnings = nullptr,
                                    const std::string& doc_id = {}) {
    if (warnings)
        warnings->push_back({doc_id, "unknown_category", label});
    return "[" + label + "]";
}

// Deterministic pool of K distinct surrogates for one category.
// List kinds sample the vocabulary without replacement; format kinds emit
// canonical-format values, de-duplicated.
inline SurrogatePool build_pool(const CategorySpec& spec,
                                const Vocabulary& vocab, std::size_t K,
                                std::uint64_t seed) {
    if (K < 1) throw GenerateError("pool size must be >= 1");
    SurrogatePool pool;
    pool.category = spec.category;
    Rng rng = Rng::derive(seed, "pool:" + spec.category);
    if (is_list_kind(spec.kind)) {
        const auto& values = vocab.list(spec.vocab_file);
        if (K > values.size())
            throw GenerateError("pool size " + std::to_string(K) +
                                " exceeds capacity " +
                                std::to_string(values.size()) +
                                " for category " + spec.category);
        // partial Fisher-Yates over an index vector
        std::vector<std::size_t> idx(values.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        for (std::size_t i = 0; i < K; ++i) {
            std::size_t j = i + rng.below(idx.size() - i);
            std::swap(idx[i], idx[j]);
            pool.values.push_back(values[idx[i]]);
        }
        return pool;
    }
    if (is_offset_kind(spec.kind) || spec.kind == GeneratorKind::passthrough_label)
        throw GenerateError("category " + spec.category +
                            " uses offsets, not a surrogate pool");
    // format kinds: canonical-format capacity is bounded by the format
    constexpr std::size_t kFormatCapacity = 1000000; // conservative bound
    if (K > kFormatCapacity)
        throw GenerateError("pool size " + std::to_string(K) +
                            " exceeds capacity " +
                            std::to_string(kFormatCapacity) +
                            " for category " + spec.category);
    std::unordered_set<std::string> seen;
    OffsetPolicy dummy;
    while (pool.values.size() < K) {
        std::string v = generate(spec, std::nullopt, rng, vocab, dummy);
        if (seen.insert(v).second) pool.values.push_back(std::move(v));
    }
    return pool;
}

} // namespace bratsyn

#endif
