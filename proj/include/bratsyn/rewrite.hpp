#ifndef BRATSYN_REWRITE_HPP
#define BRATSYN_REWRITE_HPP

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bratsyn/brat.hpp"
#include "bratsyn/strategy.hpp"
#include "bratsyn/text.hpp"

namespace bratsyn {

struct RewriteError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Overlap policy: keep the record with the larger total span, drop the
// other (ties keep the earlier id); nested records lose to their container.
// Dropped records are reported so a human reviewer can audit them.
inline std::vector<AnnotationRecord>
resolve_overlaps(const std::vector<AnnotationRecord>& records,
                 std::vector<Warning>* warnings = nullptr,
                 const std::string& doc_id = {}) {
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return records[a].spans[0].start < records[b].spans[0].start;
    });
    std::vector<bool> dropped(records.size(), false);
    auto overlaps = [](const AnnotationRecord& a, const AnnotationRecord& b) {
        for (const auto& sa : a.spans)
            for (const auto& sb : b.spans)
                if (sa.start < sb.end && sb.start < sa.end) return true;
        return false;
    };
    for (std::size_t i = 0; i < order.size(); ++i) {
        if (dropped[order[i]]) continue;
        for (std::size_t j = i + 1; j < order.size(); ++j) {
            if (dropped[order[j]]) continue;
            const auto& a = records[order[i]];
            const auto& b = records[order[j]];
            if (b.spans[0].start >= a.spans.back().end) break;
            if (!overlaps(a, b)) continue;
            std::size_t la = a.total_length(), lb = b.total_length();
            std::size_t loser;
            if (la != lb) {
                loser = la > lb ? order[j] : order[i];
            } else {
                loser = a.id <= b.id ? order[j] : order[i];
            }
            dropped[loser] = true;
            if (warnings)
                warnings->push_back({doc_id, "overlap_dropped",
                                     records[loser].id + " overlaps " +
                                         (loser == order[i] ? b.id : a.id)});
            if (loser == order[i]) break;
        }
    }
    std::vector<AnnotationRecord> out;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (!dropped[i]) out.push_back(records[i]);
    return out;
}

// Splices every planned surrogate over its span and remaps all offsets by
// the cumulative length delta. Discontinuous records collapse: the surrogate
// takes the first span, the text under the remaining spans is removed.
// Unannotated text passes through byte-identical.
inline DocumentBundle apply_plan(const DocumentBundle& bundle,
                                 const ReplacementPlan& plan) {
    if (plan.assignments.size() != bundle.annotations.size())
        throw RewriteError("plan covers " +
                           std::to_string(plan.assignments.size()) +
                           " mentions but document " + bundle.doc_id +
                           " has " +
                           std::to_string(bundle.annotations.size()));
    DocumentBundle out;
    out.doc_id = bundle.doc_id;
    out.patient_id = bundle.patient_id;
    out.passthrough = bundle.passthrough;

    const auto order = strategy_detail::mention_order(bundle);

    constexpr std::size_t kDeletion = static_cast<std::size_t>(-1);
    struct Splice {
        Span span;
        std::string replacement; // empty for trailing-span deletion
        std::size_t record_slot; // index into `order`; kDeletion for deletions
    };
    std::vector<Splice> splices;
    for (std::size_t mi = 0; mi < order.size(); ++mi) {
        const auto& rec = bundle.annotations[order[mi]];
        const auto& entry = plan.assignments[mi];
        splices.push_back({rec.spans[0], entry.surrogate, mi});
        for (std::size_t s = 1; s < rec.spans.size(); ++s)
            splices.push_back({rec.spans[s], "", kDeletion});
    }
    std::sort(splices.begin(), splices.end(),
              [](const Splice& a, const Splice& b) {
                  return a.span.start < b.span.start;
              });
    for (std::size_t i = 1; i < splices.size(); ++i) {
        if (splices[i].span.start < splices[i - 1].span.end)
            throw RewriteError("overlapping splices in document " +
                               bundle.doc_id +
                               "; run resolve_overlaps first");
    }

    out.annotations.resize(bundle.annotations.size());
    if (bundle.text) {
        const std::string& text = *bundle.text;
        CodePointIndex index(text);
        if (!splices.empty() && splices.back().span.end > index.size())
            throw RewriteError("span exceeds text length in document " +
                               bundle.doc_id);
        std::string new_text;
        new_text.reserve(text.size());
        std::size_t cursor_cp = 0;   // code points consumed from the input
        std::int64_t delta = 0;      // cumulative code-point delta
        for (const auto& sp : splices) {
            new_text += index.slice(text, cursor_cp, sp.span.start);
            std::size_t new_start =
                static_cast<std::size_t>(static_cast<std::int64_t>(sp.span.start) + delta);
            new_text += sp.replacement;
            std::size_t rep_len = cp_length(sp.replacement);
            if (sp.record_slot != kDeletion) {
                const auto& rec = bundle.annotations[order[sp.record_slot]];
                AnnotationRecord nr;
                nr.id = rec.id;
                nr.category = rec.category;
                nr.spans = {{new_start, new_start + rep_len}};
                nr.surface = sp.replacement;
                out.annotations[order[sp.record_slot]] = std::move(nr);
            }
            delta += static_cast<std::int64_t>(rep_len) -
                     static_cast<std::int64_t>(sp.span.end - sp.span.start);
            cursor_cp = sp.span.end;
        }
        new_text += index.slice(text, cursor_cp, index.size());
        out.text = std::move(new_text);
    } else {
        // no text: emit a .ann whose spans are consistent with the edits the
        // surrogates would have made
        std::int64_t delta = 0;
        for (const auto& sp : splices) {
            std::size_t new_start =
                static_cast<std::size_t>(static_cast<std::int64_t>(sp.span.start) + delta);
            std::size_t rep_len = cp_length(sp.replacement);
            if (sp.record_slot != kDeletion) {
                const auto& rec = bundle.annotations[order[sp.record_slot]];
                AnnotationRecord nr;
                nr.id = rec.id;
                nr.category = rec.category;
                nr.spans = {{new_start, new_start + rep_len}};
                nr.surface = sp.replacement;
                out.annotations[order[sp.record_slot]] = std::move(nr);
            }
            delta += static_cast<std::int64_t>(rep_len) -
                     static_cast<std::int64_t>(sp.span.end - sp.span.start);
        }
    }
    return out;
}

namespace rewrite_detail {

inline void write_atomic(const std::filesystem::path& path,
                         const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream outf(tmp, std::ios::binary | std::ios::trunc);
        if (!outf)
            throw RewriteError("cannot write " + tmp.string());
        outf << content;
        if (!outf)
            throw RewriteError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace rewrite_detail

// Writes doc_id.txt (when text is present) and doc_id.ann under out_dir,
// atomically (temp + rename) so interrupted runs never leave partial files.
inline void write_bundle(const DocumentBundle& bundle,
                         const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::path dir(out_dir);
    // doc ids may carry subdirectories (output mirrors the input tree)
    fs::path ann_path = dir / (bundle.doc_id + ".ann");
    std::error_code ec;
    fs::create_directories(ann_path.parent_path(), ec);
    if (!fs::is_directory(ann_path.parent_path()))
        throw RewriteError("output directory unavailable: " + out_dir);
    rewrite_detail::write_atomic(
        ann_path, serialize_ann(bundle.annotations, bundle.passthrough));
    if (bundle.text)
        rewrite_detail::write_atomic(dir / (bundle.doc_id + ".txt"),
                                     *bundle.text);
}

} // namespace bratsyn

#endif
