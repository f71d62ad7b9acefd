#ifndef BRATSYN_BRAT_HPP
#define BRATSYN_BRAT_HPP

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "bratsyn/text.hpp"

namespace bratsyn {

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Span {
    std::size_t start = 0; // code-point offsets, [start, end)
    std::size_t end = 0;
    bool operator==(const Span&) const = default;
};

// One text-bound ("T") annotation line from a BRAT standoff file.
struct AnnotationRecord {
    std::string id;
    std::string category;
    std::vector<Span> spans;           // sorted, non-overlapping
    std::optional<std::string> surface; // space-joined across spans

    std::size_t total_length() const {
        std::size_t n = 0;
        for (const auto& s : spans) n += s.end - s.start;
        return n;
    }
    bool operator==(const AnnotationRecord&) const = default;
};

// A non-T line (relation, attribute, note, event) kept verbatim for
// re-emission, anchored after the T record it followed in the file.
struct PassthroughLine {
    std::size_t after_record = 0; // T records parsed before this line
    std::string text;
    bool operator==(const PassthroughLine&) const = default;
};

struct ParsedAnn {
    std::vector<AnnotationRecord> records;
    std::vector<PassthroughLine> passthrough;
};

struct DocumentBundle {
    std::string doc_id;
    std::optional<std::string> patient_id;
    std::optional<std::string> text;
    std::vector<AnnotationRecord> annotations;
    std::vector<PassthroughLine> passthrough;
};

struct Warning {
    std::string doc_id;
    std::string event;
    std::string detail;
};

namespace detail {

inline void validate_spans(const AnnotationRecord& rec, std::size_t line_no) {
    auto fail = [&](const std::string& msg) {
        throw ParseError("line " + std::to_string(line_no) + ": " + msg +
                         " (annotation " + rec.id + ")");
    };
    if (rec.spans.empty()) fail("no spans");
    for (std::size_t i = 0; i < rec.spans.size(); ++i) {
        if (rec.spans[i].start >= rec.spans[i].end) fail("end <= start");
        if (i > 0 && rec.spans[i].start < rec.spans[i - 1].end)
            fail("spans overlap or are unsorted");
    }
}

inline bool parse_size(std::string_view tok, std::size_t& out) {
    if (tok.empty()) return false;
    std::size_t v = 0;
    for (char c : tok) {
        if (!is_ascii_digit(c)) return false;
        v = v * 10 + static_cast<std::size_t>(c - '0');
    }
    out = v;
    return true;
}

} // namespace detail

// Parses .ann content. Only T lines produce records; every other non-empty
// line is retained opaquely in parse order. Throws ParseError (never
// crashes) on malformed T lines.
inline ParsedAnn parse_ann(std::string_view raw) {
    ParsedAnn out;
    std::unordered_set<std::string> seen_ids;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        if (pos == raw.size()) {
            if (line_no == 0) break; // empty input
            break;
        }
        std::size_t nl = raw.find('\n', pos);
        std::string_view line = raw.substr(
            pos, nl == std::string_view::npos ? raw.size() - pos : nl - pos);
        pos = (nl == std::string_view::npos) ? raw.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (line[0] != 'T') {
            out.passthrough.push_back({out.records.size(), std::string(line)});
            continue;
        }
        auto fail = [&](const std::string& msg) {
            throw ParseError("line " + std::to_string(line_no) + ": " + msg);
        };
        std::size_t tab1 = line.find('\t');
        if (tab1 == std::string_view::npos) fail("missing tab after id");
        std::size_t tab2 = line.find('\t', tab1 + 1);
        AnnotationRecord rec;
        rec.id = std::string(line.substr(0, tab1));
        if (rec.id.size() < 2) fail("bad annotation id");
        std::string_view mid = line.substr(
            tab1 + 1,
            (tab2 == std::string_view::npos ? line.size() : tab2) - tab1 - 1);
        if (tab2 != std::string_view::npos)
            rec.surface = std::string(line.substr(tab2 + 1));
        // mid: LABEL start end[;start end]*
        std::size_t sp = mid.find(' ');
        if (sp == std::string_view::npos) fail("missing offsets");
        rec.category = std::string(mid.substr(0, sp));
        if (rec.category.empty()) fail("empty category");
        std::string_view offs = mid.substr(sp + 1);
        std::size_t p = 0;
        while (p < offs.size()) {
            std::size_t semi = offs.find(';', p);
            std::string_view pair = offs.substr(
                p, semi == std::string_view::npos ? offs.size() - p
                                                  : semi - p);
            std::size_t mid_sp = pair.find(' ');
            if (mid_sp == std::string_view::npos)
                fail("span is not 'start end'");
            Span s;
            if (!detail::parse_size(pair.substr(0, mid_sp), s.start) ||
                !detail::parse_size(pair.substr(mid_sp + 1), s.end))
                fail("non-numeric offset");
            rec.spans.push_back(s);
            p = (semi == std::string_view::npos) ? offs.size() : semi + 1;
        }
        detail::validate_spans(rec, line_no);
        if (!seen_ids.insert(rec.id).second)
            fail("duplicate annotation id " + rec.id);
        out.records.push_back(std::move(rec));
    }
    return out;
}

inline std::string
serialize_ann(const std::vector<AnnotationRecord>& records,
              const std::vector<PassthroughLine>& passthrough = {}) {
    std::string out;
    std::size_t pi = 0;
    auto flush_passthrough = [&](std::size_t upto) {
        while (pi < passthrough.size() &&
               passthrough[pi].after_record <= upto) {
            out += passthrough[pi].text;
            out += '\n';
            ++pi;
        }
    };
    for (std::size_t ri = 0; ri < records.size(); ++ri) {
        flush_passthrough(ri);
        const auto& rec = records[ri];
        out += rec.id;
        out += '\t';
        out += rec.category;
        for (std::size_t i = 0; i < rec.spans.size(); ++i) {
            out += (i == 0) ? ' ' : ';';
            out += std::to_string(rec.spans[i].start);
            out += ' ';
            out += std::to_string(rec.spans[i].end);
        }
        out += '\t';
        if (rec.surface) out += *rec.surface;
        out += '\n';
    }
    flush_passthrough(records.size());
    return out;
}

// Surface text a record denotes: slices of the document joined by spaces.
inline std::string extract_surface(std::string_view text,
                                   const CodePointIndex& index,
                                   const AnnotationRecord& rec) {
    std::string out;
    for (std::size_t i = 0; i < rec.spans.size(); ++i) {
        if (i > 0) out += ' ';
        out += index.slice(text, rec.spans[i].start, rec.spans[i].end);
    }
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Pairs a .ann with its sibling .txt (when given). With text present the
// surfaces are re-derived from the text; a stored surface that disagrees is
// reported as a warning and the text wins.
inline DocumentBundle load_bundle(const std::string& ann_path,
                                  const std::optional<std::string>& txt_path,
                                  const std::string& doc_id,
                                  std::vector<Warning>* warnings = nullptr) {
    DocumentBundle bundle;
    bundle.doc_id = doc_id;
    ParsedAnn parsed = parse_ann(read_file(ann_path));
    bundle.annotations = std::move(parsed.records);
    bundle.passthrough = std::move(parsed.passthrough);
    if (txt_path) {
        bundle.text = read_file(*txt_path);
        CodePointIndex index(*bundle.text);
        const std::size_t n = index.size();
        for (auto& rec : bundle.annotations) {
            if (rec.spans.back().end > n)
                throw LoadError(ann_path + ": annotation " + rec.id +
                                " span end " +
                                std::to_string(rec.spans.back().end) +
                                " exceeds text length " + std::to_string(n));
            std::string derived = extract_surface(*bundle.text, index, rec);
            if (rec.surface && *rec.surface != derived && warnings) {
                warnings->push_back({doc_id, "surface_mismatch",
                                     rec.id + ": ann='" + *rec.surface +
                                         "' text='" + derived + "'"});
            }
            rec.surface = std::move(derived);
        }
    }
    return bundle;
}

} // namespace bratsyn

#endif
