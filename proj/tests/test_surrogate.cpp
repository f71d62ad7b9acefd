#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "bratsyn/dates.hpp"
#include "bratsyn/rng.hpp"
#include "bratsyn/surrogate.hpp"
#include "bratsyn/vocab.hpp"

using namespace bratsyn;

namespace {

OffsetPolicy policy_days(std::int64_t days) {
    OffsetPolicy p;
    p.date_offset_days = days;
    return p;
}

std::string shift(const std::string& surface, std::int64_t days,
                  bool month_first = true) {
    auto parsed = parse_date(surface, month_first);
    REQUIRE(parsed.has_value());
    return render_shifted(*parsed, days);
}

} // namespace

TEST_CASE("day arithmetic round-trips") {
    Rng rng(7);
    for (int trial = 0; trial < 2000; ++trial) {
        int y = static_cast<int>(rng.range(1900, 2100));
        unsigned m = static_cast<unsigned>(rng.range(1, 12));
        unsigned d = static_cast<unsigned>(
            rng.range(1, static_cast<int>(days_in_month(y, m))));
        CivilDate cd = civil_from_days(days_from_civil(y, m, d));
        CHECK(cd.year == y);
        CHECK(cd.month == m);
        CHECK(cd.day == d);
    }
    // 2000-03-01 is day 11017; 1970-01-01 is day 0
    CHECK(days_from_civil(1970, 1, 1) == 0);
    CHECK(days_from_civil(2000, 3, 1) == 11017);
    CHECK(weekday_of(days_from_civil(2001, 1, 1)) == 0); // a Monday
}

TEST_CASE("date shifting keeps the surface format") {
    CHECK(shift("01/02/2014", 30) == "02/01/2014");
    CHECK(shift("1/2/2014", 30) == "2/1/2014");
    CHECK(shift("01/02/14", 30) == "02/01/14");
    CHECK(shift("2014-01-02", 30) == "2014-02-01");
    CHECK(shift("1.2.2014", 30) == "2.1.2014");
    CHECK(shift("January 2, 2014", 30) == "February 1, 2014");
    CHECK(shift("Jan 2, 2014", 30) == "Feb 1, 2014");
    CHECK(shift("2 January 2014", 30) == "1 February 2014");
    CHECK(shift("JANUARY 2014", 40) == "FEBRUARY 2014");
    CHECK(shift("January 5th", 30) == "February 4th");
    CHECK(shift("03/04/2015", 30, false) == "03/05/2015"); // day-first read
    CHECK(shift("25/12/2014", 7) == "01/01/2015"); // forced day-first
}

TEST_CASE("year-free and degenerate surfaces") {
    CHECK(shift("2014", 30) == "2014");
    CHECK(shift("2014", 200) == "2015");
    CHECK(shift("2014", -200) == "2013");
    CHECK(shift("Monday", 30) == "Wednesday");
    CHECK(shift("Mon", 30) == "Wed");
    CHECK(shift("monday", 2) == "wednesday");
    // 01/02 with no year anchors into a non-leap year; stays year-free
    CHECK(shift("01/02", 30) == "02/01");
    CHECK(shift("Christmas", 7) == "January 1");
    CHECK(shift("Thanksgiving", 0) == "November 22"); // 4th Thursday anchor
    CHECK_FALSE(parse_date("not a date").has_value());
    CHECK_FALSE(parse_date("13/13/2014").has_value());
    CHECK_FALSE(parse_date("02/30/2014").has_value());
}

TEST_CASE("interval preservation: equal shifts keep date differences") {
    Rng rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        int y = static_cast<int>(rng.range(1950, 2030));
        unsigned m = static_cast<unsigned>(rng.range(1, 12));
        unsigned d = static_cast<unsigned>(
            rng.range(1, static_cast<int>(days_in_month(y, m))));
        std::int64_t gap = rng.range(1, 400);
        std::int64_t offset = rng.range(-365, 365);
        std::int64_t base = days_from_civil(y, m, d);
        CivilDate other = civil_from_days(base + gap);
        auto fmt = [](const CivilDate& c) {
            return dates_detail::pad2(c.month) + "/" +
                   dates_detail::pad2(c.day) + "/" + std::to_string(c.year);
        };
        std::string s1 = shift(fmt(civil_from_days(base)), offset);
        std::string s2 = shift(fmt(other), offset);
        auto p1 = parse_date(s1);
        auto p2 = parse_date(s2);
        REQUIRE(p1.has_value());
        REQUIRE(p2.has_value());
        CHECK(p2->days - p1->days == gap);
    }
}

TEST_CASE("date fallback emits a canonical date and a warning") {
    Rng rng(5);
    std::vector<Warning> warnings;
    OffsetPolicy p = policy_days(45);
    std::string out = offset_date("the fifth of never", p, rng, &warnings, "d9");
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].event == "date_fallback");
    CHECK(warnings[0].doc_id == "d9");
    auto reparsed = parse_date(out);
    REQUIRE(reparsed.has_value());
    CHECK(reparsed->kind == DateKind::numeric);
}

TEST_CASE("age offsets") {
    Rng rng(11);
    OffsetPolicy p;
    p.age_offset_years = 3;
    CHECK(offset_age("45", rng, p) == "48");
    CHECK(offset_age("45 years old", rng, p) == "48 years old");
    CHECK(offset_age("89", rng, p) == "89"); // clamped
    p.age_offset_years = -5;
    CHECK(offset_age("3", rng, p) == "1"); // clamped at the floor
    for (int trial = 0; trial < 200; ++trial) {
        long v = std::stol(offset_age("92", rng, p));
        CHECK(v >= 90);
        CHECK(v <= 99);
    }
    // non-numeric text: random adult age
    for (int trial = 0; trial < 50; ++trial) {
        long v = std::stol(offset_age("elderly", rng, p));
        CHECK(v >= 20);
        CHECK(v <= 89);
    }
}

TEST_CASE("time offsets") {
    Rng rng(13);
    OffsetPolicy p;
    p.time_offset_minutes = 90;
    CHECK(offset_time("08:15", p, rng) == "09:45");
    CHECK(offset_time("23:40", p, rng) == "01:10"); // wraps midnight
    CHECK(offset_time("08:15:30", p, rng) == "09:45:30");
    CHECK(offset_time("11:00 AM", p, rng) == "12:30 PM"); // meridiem flips
    p.time_offset_minutes = -90;
    CHECK(offset_time("00:30", p, rng) == "23:00");
    CHECK(offset_time("12:15 pm", p, rng) == "10:45 am");
    std::vector<Warning> warnings;
    offset_time("25:99", p, rng, &warnings, "d1");
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].event == "time_fallback");
}

TEST_CASE("format-preserving regeneration keeps character classes") {
    Rng rng(17);
    for (int trial = 0; trial < 500; ++trial) {
        std::string original;
        std::size_t len = 1 + rng.below(20);
        for (std::size_t i = 0; i < len; ++i) {
            switch (rng.below(5)) {
            case 0: original += static_cast<char>('0' + rng.below(10)); break;
            case 1: original += static_cast<char>('A' + rng.below(26)); break;
            case 2: original += static_cast<char>('a' + rng.below(26)); break;
            case 3: original += '-'; break;
            default: original += "\xC3\xA9"; break; // two-byte UTF-8
            }
        }
        std::string out = surrogate_detail::format_preserving(original, rng);
        REQUIRE(out.size() == original.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (is_ascii_digit(original[i])) CHECK(is_ascii_digit(out[i]));
            else if (is_ascii_upper(original[i])) CHECK(is_ascii_upper(out[i]));
            else if (is_ascii_lower(original[i])) CHECK(is_ascii_lower(out[i]));
            else CHECK(out[i] == original[i]);
        }
    }
}

TEST_CASE("list generation never returns the original") {
    Vocabulary vocab(BRATSYN_DATA_DIR);
    CategoryRegistry registry = CategoryRegistry::builtin();
    const CategorySpec* spec = registry.find("STATE");
    REQUIRE(spec != nullptr);
    Rng rng(23);
    OffsetPolicy p;
    const auto& states = vocab.list("STATE.txt");
    std::string original = states[0];
    for (int trial = 0; trial < 500; ++trial) {
        std::string out = generate(*spec, original, rng, vocab, p);
        CHECK(normalize_surface(out) != normalize_surface(original));
    }
}

TEST_CASE("surrogate pools are deterministic, distinct, capacity-checked") {
    Vocabulary vocab(BRATSYN_DATA_DIR);
    CategoryRegistry registry = CategoryRegistry::builtin();
    const CategorySpec* patient = registry.find("PATIENT");
    REQUIRE(patient != nullptr);

    SurrogatePool a = build_pool(*patient, vocab, 1000, 99);
    SurrogatePool b = build_pool(*patient, vocab, 1000, 99);
    CHECK(a.values == b.values);
    SurrogatePool c = build_pool(*patient, vocab, 1000, 100);
    CHECK(a.values != c.values);
    std::set<std::string> distinct(a.values.begin(), a.values.end());
    CHECK(distinct.size() == 1000);

    const CategorySpec* state = registry.find("STATE");
    CHECK_THROWS_AS(build_pool(*state, vocab, 1000, 0), GenerateError);

    const CategorySpec* idnum = registry.find("IDNUM");
    SurrogatePool ids = build_pool(*idnum, vocab, 500, 7);
    std::set<std::string> id_set(ids.values.begin(), ids.values.end());
    CHECK(id_set.size() == 500);

    const CategorySpec* date = registry.find("DATE");
    CHECK_THROWS_AS(build_pool(*date, vocab, 10, 0), GenerateError);
}

TEST_CASE("canonical format generators") {
    Rng rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        std::string phone = surrogate_detail::canonical_phone(rng);
        CHECK(phone.size() == 12);
        CHECK(phone.substr(3, 5) == "-555-");
        std::string id = surrogate_detail::canonical_id(rng);
        CHECK(id.size() == 8);
        CHECK(is_ascii_upper(id[0]));
        CHECK(is_ascii_upper(id[1]));
        for (int i = 2; i < 8; ++i) CHECK(is_ascii_digit(id[i]));
    }
    Vocabulary vocab(BRATSYN_DATA_DIR);
    std::string email = surrogate_detail::random_email(rng, vocab);
    CHECK(email.find('@') != std::string::npos);
    std::string url = surrogate_detail::random_url(rng, vocab);
    CHECK(url.rfind("https://www.", 0) == 0);
    CHECK(url.find(".example.org/") != std::string::npos);
}

TEST_CASE("offset policy draws stay inside the documented ranges") {
    Rng rng(41);
    for (int trial = 0; trial < 2000; ++trial) {
        OffsetPolicy p = draw_offset_policy(rng);
        std::int64_t d = std::abs(p.date_offset_days);
        CHECK(d >= 30);
        CHECK(d <= 365);
        int a = std::abs(p.age_offset_years);
        CHECK(a >= 1);
        CHECK(a <= 5);
        int t = std::abs(p.time_offset_minutes);
        CHECK(t >= 1);
        CHECK(t <= 720);
    }
}
