#ifndef BRATSYN_DATES_HPP
#define BRATSYN_DATES_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bratsyn/text.hpp"

namespace bratsyn {

// Proleptic Gregorian day arithmetic (days since 1970-01-01).
inline std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
    int year;
    unsigned month; // 1..12
    unsigned day;   // 1..31
};

inline CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return {static_cast<int>(y + (m <= 2)), m, d};
}

inline unsigned days_in_month(int y, unsigned m) {
    static constexpr std::array<unsigned, 12> lens = {31, 28, 31, 30, 31, 30,
                                                      31, 31, 30, 31, 30, 31};
    if (m == 2 && ((y % 4 == 0 && y % 100 != 0) || y % 400 == 0)) return 29;
    return lens[m - 1];
}

// 0 = Monday ... 6 = Sunday
inline int weekday_of(std::int64_t days) {
    return static_cast<int>(((days % 7) + 10) % 7);
}

namespace dates_detail {

inline constexpr std::array<std::string_view, 12> kMonthsFull = {
    "january", "february", "march",     "april",   "may",      "june",
    "july",    "august",   "september", "october", "november", "december"};
inline constexpr std::array<std::string_view, 12> kMonthsTitle = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};
inline constexpr std::array<std::string_view, 7> kWeekdaysTitle = {
    "Monday", "Tuesday", "Wednesday", "Thursday",
    "Friday", "Saturday", "Sunday"};

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    return out;
}

enum class Casing { title, upper, lower_case };

inline Casing detect_casing(std::string_view token) {
    bool any_lower = false, any_upper = false;
    for (char c : token) {
        if (is_ascii_lower(c)) any_lower = true;
        if (is_ascii_upper(c)) any_upper = true;
    }
    if (any_upper && !any_lower) return Casing::upper;
    if (!any_upper) return Casing::lower_case;
    return Casing::title;
}

inline std::string apply_casing(std::string_view title_form, Casing casing,
                                std::size_t abbrev_len) {
    std::string s(title_form);
    if (abbrev_len > 0 && abbrev_len < s.size()) s.resize(abbrev_len);
    switch (casing) {
    case Casing::upper:
        for (char& c : s)
            if (is_ascii_lower(c)) c = static_cast<char>(c - 32);
        break;
    case Casing::lower_case:
        for (char& c : s)
            if (is_ascii_upper(c)) c = static_cast<char>(c + 32);
        break;
    case Casing::title:
        break;
    }
    return s;
}

// month index 1..12 for a (possibly abbreviated) name; 0 if not a month
inline unsigned match_month(std::string_view token) {
    std::string t = lower(token);
    if (!t.empty() && t.back() == '.') t.pop_back();
    if (t.size() < 3) return 0;
    for (unsigned i = 0; i < 12; ++i) {
        std::string_view full = kMonthsFull[i];
        if (t.size() <= full.size() && full.substr(0, t.size()) == t)
            return i + 1;
    }
    return 0;
}

// weekday index 0..6 (Monday-based); -1 if not a weekday
inline int match_weekday(std::string_view token) {
    std::string t = lower(token);
    if (!t.empty() && t.back() == '.') t.pop_back();
    if (t.size() < 3) return -1;
    static constexpr std::array<std::string_view, 7> names = {
        "monday", "tuesday", "wednesday", "thursday",
        "friday", "saturday", "sunday"};
    for (int i = 0; i < 7; ++i) {
        std::string_view full = names[static_cast<unsigned>(i)];
        if (t.size() <= full.size() && full.substr(0, t.size()) == t) {
            // 3-char prefixes are unambiguous for weekdays
            return i;
        }
    }
    return -1;
}

inline std::string pad2(unsigned v) {
    std::string s = std::to_string(v);
    return s.size() < 2 ? "0" + s : s;
}

inline std::string ordinal_suffix(unsigned day) {
    if (day % 100 >= 11 && day % 100 <= 13) return "th";
    switch (day % 10) {
    case 1: return "st";
    case 2: return "nd";
    case 3: return "rd";
    default: return "th";
    }
}

struct HolidayDef {
    std::string_view name;
    unsigned month; // fixed-date holidays; 0 for rule-based
    unsigned day;
    int rule; // 0 none, 1 = 4th Thursday of November, 2 = last Monday of May,
              // 3 = first Monday of September
};

inline constexpr std::array<HolidayDef, 13> kHolidays = {{
    {"new year's day", 1, 1, 0},
    {"new years day", 1, 1, 0},
    {"new year's eve", 12, 31, 0},
    {"new years eve", 12, 31, 0},
    {"valentine's day", 2, 14, 0},
    {"st. patrick's day", 3, 17, 0},
    {"st patrick's day", 3, 17, 0},
    {"independence day", 7, 4, 0},
    {"fourth of july", 7, 4, 0},
    {"halloween", 10, 31, 0},
    {"christmas eve", 12, 24, 0},
    {"christmas", 12, 25, 0},
    {"thanksgiving", 0, 0, 1},
}};

inline std::int64_t nth_weekday_of_month(int year, unsigned month,
                                         int weekday, int nth) {
    std::int64_t first = days_from_civil(year, month, 1);
    int wd = weekday_of(first);
    std::int64_t day = first + ((weekday - wd + 7) % 7) + 7 * (nth - 1);
    return day;
}

inline std::int64_t last_weekday_of_month(int year, unsigned month,
                                          int weekday) {
    std::int64_t last =
        days_from_civil(year, month, days_in_month(year, month));
    int wd = weekday_of(last);
    return last - ((wd - weekday + 7) % 7);
}

} // namespace dates_detail

// The distinct surface shapes we can re-render after shifting.
enum class DateKind {
    numeric,     // 01/02/2014, 1-2-14, 2014-01-02, 01/02
    bare_year,   // 2014
    month_name,  // January 5, 2014 / 5 Jan 2014 / January 2014 / Jan 5th
    weekday,     // Monday / Mon
    holiday,     // Christmas, Thanksgiving, ...
};

struct ParsedDate {
    DateKind kind;
    std::int64_t days; // epoch day of the parsed (possibly anchored) date
    // rendering state
    char separator = '/';
    bool year_first = false;
    bool day_first = false;
    bool has_year = false;
    bool has_day = true;
    bool two_digit_year = false;
    bool pad_month = false;
    bool pad_day = false;
    std::size_t month_abbrev_len = 0; // 0 = full name
    dates_detail::Casing casing = dates_detail::Casing::title;
    bool ordinal_day = false;    // "5th"
    bool comma_before_year = false;
    int weekday = -1;                 // for DateKind::weekday
    std::size_t weekday_abbrev_len = 0;
};

// Year assumed when a surface carries no year of its own ("01/02",
// "January 5", weekday tokens). Non-leap so Feb 29 never materializes
// from a year-free surface.
inline constexpr int kAssumedYear = 2001;
// A bare year anchors to July 1 so small shifts rarely flip the year.
inline constexpr unsigned kBareYearAnchorMonth = 7;
inline constexpr unsigned kBareYearAnchorDay = 1;

// Attempts to recognize one of the supported date surfaces.
// `month_first` selects the M/D/Y reading of ambiguous numeric dates.
inline std::optional<ParsedDate> parse_date(std::string_view raw,
                                            bool month_first = true) {
    using namespace dates_detail;
    // trim
    std::string_view s = raw;
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    if (s.empty()) return std::nullopt;

    // holiday names
    {
        std::string low = lower(s);
        for (const auto& h : kHolidays) {
            if (low == h.name) {
                ParsedDate p{};
                p.kind = DateKind::holiday;
                p.casing = detect_casing(s);
                if (h.rule == 1)
                    p.days = nth_weekday_of_month(kAssumedYear, 11, 3, 4);
                else if (h.rule == 2)
                    p.days = last_weekday_of_month(kAssumedYear, 5, 0);
                else if (h.rule == 3)
                    p.days = nth_weekday_of_month(kAssumedYear, 9, 0, 1);
                else
                    p.days = days_from_civil(kAssumedYear, h.month, h.day);
                p.has_year = false;
                return p;
            }
        }
    }

    // tokenize into digit runs / alpha runs / single other chars
    struct Tok {
        std::string text;
        bool digits;
        bool alpha;
    };
    std::vector<Tok> toks;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (is_ascii_digit(c)) {
            std::size_t j = i;
            while (j < s.size() && is_ascii_digit(s[j])) ++j;
            toks.push_back({std::string(s.substr(i, j - i)), true, false});
            i = j;
        } else if (is_ascii_lower(c) || is_ascii_upper(c)) {
            std::size_t j = i;
            while (j < s.size() && (is_ascii_lower(s[j]) ||
                                    is_ascii_upper(s[j]) || s[j] == '\''))
                ++j;
            toks.push_back({std::string(s.substr(i, j - i)), false, true});
            i = j;
        } else {
            toks.push_back({std::string(1, c), false, false});
            ++i;
        }
    }

    // single alpha token: weekday
    if (toks.size() == 1 && toks[0].alpha) {
        int wd = match_weekday(toks[0].text);
        if (wd < 0) return std::nullopt;
        ParsedDate p{};
        p.kind = DateKind::weekday;
        p.weekday = wd;
        p.weekday_abbrev_len =
            toks[0].text.size() < 6 ? toks[0].text.size() : 0;
        p.casing = detect_casing(toks[0].text);
        p.has_year = false;
        // anchor: first such weekday in the assumed year
        std::int64_t jan1 = days_from_civil(kAssumedYear, 1, 1);
        p.days = jan1 + ((wd - weekday_of(jan1) + 7) % 7);
        return p;
    }

    // bare year
    if (toks.size() == 1 && toks[0].digits && toks[0].text.size() == 4) {
        int y = std::stoi(toks[0].text);
        if (y < 1200 || y > 2999) return std::nullopt;
        ParsedDate p{};
        p.kind = DateKind::bare_year;
        p.days = days_from_civil(y, kBareYearAnchorMonth, kBareYearAnchorDay);
        p.has_year = true;
        p.has_day = false;
        return p;
    }

    // month-name forms
    for (std::size_t mi = 0; mi < toks.size(); ++mi) {
        if (!toks[mi].alpha) continue;
        unsigned month = match_month(toks[mi].text);
        if (month == 0) continue;
        ParsedDate p{};
        p.kind = DateKind::month_name;
        p.month_abbrev_len =
            toks[mi].text.size() < kMonthsFull[month - 1].size()
                ? toks[mi].text.size()
                : 0;
        p.casing = detect_casing(toks[mi].text);
        // gather digit tokens around the month name
        int day = -1, year = -1;
        bool day_before = false;
        for (std::size_t ti = 0; ti < toks.size(); ++ti) {
            if (!toks[ti].digits) continue;
            int v = std::stoi(toks[ti].text);
            if (toks[ti].text.size() == 4) {
                if (year >= 0) return std::nullopt;
                year = v;
            } else if (toks[ti].text.size() <= 2 && v >= 1 && v <= 31 &&
                       day < 0) {
                day = v;
                day_before = ti < mi;
                if (ti > 0 && toks[ti - 1].digits) return std::nullopt;
                p.pad_day = toks[ti].text.size() == 2 && toks[ti].text[0] == '0';
                // ordinal suffix directly after the day?
                if (ti + 1 < toks.size() && toks[ti + 1].alpha) {
                    std::string suf = lower(toks[ti + 1].text);
                    if (suf == "st" || suf == "nd" || suf == "rd" ||
                        suf == "th")
                        p.ordinal_day = true;
                }
            } else if (toks[ti].text.size() == 2 && year < 0 && day >= 0) {
                year = v < 50 ? 2000 + v : 1900 + v;
                p.two_digit_year = true;
            } else {
                return std::nullopt;
            }
        }
        p.day_first = day_before;
        p.has_year = year >= 0;
        p.has_day = day >= 0;
        p.comma_before_year = p.has_year && s.find(',') != std::string_view::npos;
        int y = p.has_year ? year : kAssumedYear;
        unsigned d = p.has_day ? static_cast<unsigned>(day) : 1;
        if (d > days_in_month(y, month)) return std::nullopt;
        p.days = days_from_civil(y, month, d);
        return p;
    }

    // numeric with separators: D sep D [sep D]
    {
        std::vector<std::string> fields;
        char sep = 0;
        bool ok = true;
        for (std::size_t ti = 0; ti < toks.size(); ++ti) {
            if (ti % 2 == 0) {
                if (!toks[ti].digits) { ok = false; break; }
                fields.push_back(toks[ti].text);
            } else {
                char c = toks[ti].text.size() == 1 ? toks[ti].text[0] : 0;
                if (c != '/' && c != '-' && c != '.') { ok = false; break; }
                if (sep && c != sep) { ok = false; break; }
                sep = c;
            }
        }
        if (ok && (fields.size() == 2 || fields.size() == 3) &&
            toks.size() == fields.size() * 2 - 1) {
            ParsedDate p{};
            p.kind = DateKind::numeric;
            p.separator = sep;
            int y = kAssumedYear;
            unsigned m = 0, d = 0;
            auto val = [](const std::string& f) { return std::stoul(f); };
            if (fields.size() == 3 && fields[0].size() == 4) {
                // ISO order
                p.year_first = true;
                y = std::stoi(fields[0]);
                m = static_cast<unsigned>(val(fields[1]));
                d = static_cast<unsigned>(val(fields[2]));
                p.pad_month = fields[1].size() == 2;
                p.pad_day = fields[2].size() == 2;
                p.has_year = true;
            } else {
                unsigned a = static_cast<unsigned>(val(fields[0]));
                unsigned b = static_cast<unsigned>(val(fields[1]));
                bool mf = month_first;
                if (a > 12 && b <= 12) mf = false; // forced D/M
                if (b > 12 && a <= 12) mf = true;  // forced M/D
                m = mf ? a : b;
                d = mf ? b : a;
                p.day_first = !mf;
                p.pad_month = fields[mf ? 0 : 1].size() == 2;
                p.pad_day = fields[mf ? 1 : 0].size() == 2;
                if (fields.size() == 3) {
                    p.has_year = true;
                    if (fields[2].size() == 4) {
                        y = std::stoi(fields[2]);
                    } else if (fields[2].size() == 2) {
                        unsigned yy = static_cast<unsigned>(val(fields[2]));
                        y = yy < 50 ? 2000 + static_cast<int>(yy)
                                    : 1900 + static_cast<int>(yy);
                        p.two_digit_year = true;
                    } else {
                        return std::nullopt;
                    }
                }
            }
            if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m))
                return std::nullopt;
            p.days = days_from_civil(y, m, d);
            return p;
        }
    }

    return std::nullopt;
}

// Re-renders `p` shifted by `offset_days`, in the surface's own format.
inline std::string render_shifted(const ParsedDate& p,
                                  std::int64_t offset_days) {
    using namespace dates_detail;
    std::int64_t days = p.days + offset_days;
    CivilDate cd = civil_from_days(days);

    switch (p.kind) {
    case DateKind::weekday: {
        int wd = weekday_of(days);
        return apply_casing(kWeekdaysTitle[static_cast<unsigned>(wd)],
                            p.casing, p.weekday_abbrev_len);
    }
    case DateKind::bare_year:
        return std::to_string(cd.year);
    case DateKind::holiday: {
        // a shifted holiday is rarely a holiday itself; render "Month D"
        std::string out(kMonthsTitle[cd.month - 1]);
        out += ' ';
        out += std::to_string(cd.day);
        return out;
    }
    case DateKind::month_name: {
        std::string month = apply_casing(kMonthsTitle[cd.month - 1], p.casing,
                                         p.month_abbrev_len);
        std::string day;
        if (p.has_day) {
            day = p.pad_day ? pad2(cd.day) : std::to_string(cd.day);
            if (p.ordinal_day) day += ordinal_suffix(cd.day);
        }
        std::string year;
        if (p.has_year) {
            year = p.two_digit_year
                       ? pad2(static_cast<unsigned>(((cd.year % 100) + 100) %
                                                    100))
                       : std::to_string(cd.year);
        }
        std::string out;
        if (p.has_day && p.day_first) {
            out = day + " " + month;
        } else if (p.has_day) {
            out = month + " " + day;
        } else {
            out = month;
        }
        if (p.has_year) {
            out += p.comma_before_year ? ", " : " ";
            out += year;
        }
        return out;
    }
    case DateKind::numeric: {
        std::string m = p.pad_month ? pad2(cd.month) : std::to_string(cd.month);
        std::string d = p.pad_day ? pad2(cd.day) : std::to_string(cd.day);
        std::string y;
        if (p.has_year) {
            y = p.two_digit_year
                    ? pad2(static_cast<unsigned>(((cd.year % 100) + 100) %
                                                 100))
                    : std::to_string(cd.year);
        }
        std::string out;
        if (p.year_first) {
            out = std::to_string(cd.year);
            out += p.separator;
            out += m;
            out += p.separator;
            out += d;
        } else {
            out = p.day_first ? d : m;
            out += p.separator;
            out += p.day_first ? m : d;
            if (p.has_year) {
                out += p.separator;
                out += y;
            }
        }
        return out;
    }
    }
    return {};
}

} // namespace bratsyn

#endif
