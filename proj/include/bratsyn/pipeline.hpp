#ifndef BRATSYN_PIPELINE_HPP
#define BRATSYN_PIPELINE_HPP

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "bratsyn/brat.hpp"
#include "bratsyn/distribution.hpp"
#include "bratsyn/rewrite.hpp"
#include "bratsyn/rng.hpp"
#include "bratsyn/strategy.hpp"
#include "bratsyn/surrogate.hpp"
#include "bratsyn/vocab.hpp"

namespace bratsyn {

inline constexpr const char* kToolVersion = "0.1.0";

struct PipelineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One corpus document on disk: a .ann and optionally its sibling .txt.
struct CorpusDoc {
    std::string doc_id; // relative path without extension
    std::string ann_path;
    std::optional<std::string> txt_path;
};

// Recursive scan for .ann files; doc ids mirror the directory layout.
inline std::vector<CorpusDoc> discover_corpus(const std::string& in_dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(in_dir))
        throw PipelineError("input directory not found: " + in_dir);
    std::vector<CorpusDoc> docs;
    for (const auto& entry : fs::recursive_directory_iterator(in_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".ann")
            continue;
        CorpusDoc doc;
        doc.ann_path = entry.path().string();
        fs::path rel = fs::relative(entry.path(), in_dir);
        rel.replace_extension();
        doc.doc_id = rel.generic_string();
        fs::path txt = entry.path();
        txt.replace_extension(".txt");
        if (fs::is_regular_file(txt)) doc.txt_path = txt.string();
        docs.push_back(std::move(doc));
    }
    std::sort(docs.begin(), docs.end(),
              [](const CorpusDoc& a, const CorpusDoc& b) {
                  return a.doc_id < b.doc_id;
              });
    return docs;
}

// Optional doc->patient manifest (CSV: doc_id,patient_id). Documents
// without an entry are their own patient.
inline std::map<std::string, std::string>
load_patient_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PipelineError("cannot open patient manifest " + path);
    std::map<std::string, std::string> mapping;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first && line == "doc_id,patient_id") {
            first = false;
            continue;
        }
        first = false;
        auto comma = line.find(',');
        if (comma == std::string::npos)
            throw PipelineError("patient manifest: expected doc_id,patient_id");
        mapping[line.substr(0, comma)] = line.substr(comma + 1);
    }
    return mapping;
}

struct ResynthOptions {
    std::string in_dir;
    std::string out_dir;
    std::string data_dir;
    StrategyConfig strategy;
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    bool skip_bad_docs = false;
    bool month_first = true;
    OffsetScope offset_scope = OffsetScope::per_patient;
    std::optional<std::string> patient_manifest;
    std::optional<std::string> category_config;
};

struct ResynthResult {
    std::size_t docs = 0;
    std::size_t entities = 0;
    std::size_t failed_docs = 0;
    std::vector<Warning> warnings;
    std::vector<std::string> errors;
    double plan_seconds = 0;
    double total_seconds = 0;
};

namespace pipeline_detail {

// Pools are clamped to the vocabulary capacity when a list is smaller than
// the requested pool size (e.g. the 50 US states); this is reported once.
inline std::map<std::string, SurrogatePool>
build_pools(const CategoryRegistry& registry, const Vocabulary& vocab,
            std::size_t pool_size, std::uint64_t seed,
            std::vector<Warning>* warnings) {
    std::map<std::string, SurrogatePool> pools;
    for (const auto& [label, spec] : registry.all()) {
        if (!is_list_kind(spec.kind)) continue;
        std::size_t capacity = vocab.list(spec.vocab_file).size();
        std::size_t k = std::min(pool_size, capacity);
        if (k < pool_size && warnings)
            warnings->push_back({"", "pool_clamped",
                                 label + ": pool size reduced to capacity " +
                                     std::to_string(capacity)});
        pools.emplace(label, build_pool(spec, vocab, k, seed));
    }
    return pools;
}

inline OffsetPolicy policy_for(const ResynthOptions& opt,
                               const std::string& doc_id,
                               const std::string& patient_id) {
    std::string scope_key;
    switch (opt.offset_scope) {
    case OffsetScope::per_corpus: scope_key = "corpus"; break;
    case OffsetScope::per_patient: scope_key = "patient:" + patient_id; break;
    case OffsetScope::per_document: scope_key = "doc:" + doc_id; break;
    }
    Rng rng = Rng::derive(hash_str(opt.seed, "offsets"), scope_key);
    return draw_offset_policy(rng, opt.offset_scope, opt.month_first);
}

} // namespace pipeline_detail

// In-memory resynthesis of one document: overlap resolution, chain
// planning, dispersal, splicing.
inline DocumentBundle resynthesize_document(
    const DocumentBundle& bundle, const StrategyConfig& strategy,
    const std::map<std::string, SurrogatePool>& pools,
    const CategoryRegistry& registry, const Vocabulary& vocab,
    const OffsetPolicy& policy, Rng& rng,
    std::vector<Warning>* warnings = nullptr) {
    DocumentBundle resolved = bundle;
    resolved.annotations =
        resolve_overlaps(bundle.annotations, warnings, bundle.doc_id);
    ReplacementPlan plan = plan_document(resolved, strategy, pools, registry,
                                         vocab, policy, rng, warnings);
    return apply_plan(resolved, plan);
}

// Whole-corpus resynthesis. Documents are processed by a worker pool; every
// per-document random stream is derived from (seed, doc_id), so the output
// is byte-identical for any jobs value.
inline ResynthResult run_resynth(const ResynthOptions& opt) {
    auto t0 = std::chrono::steady_clock::now();
    ResynthResult result;

    CategoryRegistry registry = CategoryRegistry::builtin();
    if (opt.category_config) registry.load_file(*opt.category_config);
    Vocabulary vocab(opt.data_dir);
    auto pools = pipeline_detail::build_pools(
        registry, vocab, opt.strategy.pool_size, opt.seed, &result.warnings);

    std::map<std::string, std::string> patients;
    if (opt.patient_manifest)
        patients = load_patient_manifest(*opt.patient_manifest);

    auto docs = discover_corpus(opt.in_dir);
    std::vector<std::vector<Warning>> doc_warnings(docs.size());
    std::vector<std::string> doc_errors(docs.size());
    std::vector<std::size_t> doc_entities(docs.size(), 0);

    auto process = [&](std::size_t i) {
        const auto& doc = docs[i];
        try {
            DocumentBundle bundle = load_bundle(doc.ann_path, doc.txt_path,
                                                doc.doc_id, &doc_warnings[i]);
            auto pit = patients.find(doc.doc_id);
            bundle.patient_id = pit != patients.end()
                                    ? pit->second
                                    : doc.doc_id; // own patient by default
            OffsetPolicy policy = pipeline_detail::policy_for(
                opt, bundle.doc_id, *bundle.patient_id);
            Rng rng = Rng::derive(opt.seed, "doc:" + bundle.doc_id);
            DocumentBundle rewritten = resynthesize_document(
                bundle, opt.strategy, pools, registry, vocab, policy, rng,
                &doc_warnings[i]);
            doc_entities[i] = rewritten.annotations.size();
            write_bundle(rewritten, opt.out_dir);
        } catch (const std::exception& e) {
            doc_errors[i] = doc.ann_path + ": " + e.what();
        }
    };

    auto t_plan0 = std::chrono::steady_clock::now();
    if (opt.jobs <= 1 || docs.size() < 2) {
        for (std::size_t i = 0; i < docs.size(); ++i) process(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::size_t jobs = std::min(opt.jobs, docs.size());
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < jobs; ++w) {
            workers.emplace_back([&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= docs.size()) return;
                    process(i);
                }
            });
        }
        for (auto& t : workers) t.join();
    }
    auto t_plan1 = std::chrono::steady_clock::now();

    for (std::size_t i = 0; i < docs.size(); ++i) {
        if (!doc_errors[i].empty()) {
            ++result.failed_docs;
            result.errors.push_back(doc_errors[i]);
            continue;
        }
        ++result.docs;
        result.entities += doc_entities[i];
        result.warnings.insert(result.warnings.end(), doc_warnings[i].begin(),
                               doc_warnings[i].end());
    }
    if (result.failed_docs > 0 && !opt.skip_bad_docs)
        throw PipelineError(result.errors.front());

    result.plan_seconds =
        std::chrono::duration<double>(t_plan1 - t_plan0).count();
    result.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return result;
}

// warnings.csv: one machine-readable row per dropped/overlapping/fallback
// event, for human audit of the rewritten corpus.
inline void write_warnings_csv(const std::vector<Warning>& warnings,
                               const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw PipelineError("cannot write " + path);
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += "\"\"";
            else q.push_back(c);
        }
        q += "\"";
        return q;
    };
    out << "doc_id,event,detail\n";
    for (const auto& w : warnings)
        out << quote(w.doc_id) << ',' << quote(w.event) << ','
            << quote(w.detail) << "\n";
}

// Extracts a PhiDistribution from a corpus on disk (the bridge from real
// BRAT corpora into the simulator).
inline PhiDistribution
corpus_distribution(const std::string& in_dir, const CategoryRegistry& registry,
                    const std::map<std::string, std::string>& patients = {}) {
    PhiDistribution dist;
    for (const auto& doc : discover_corpus(in_dir)) {
        DocumentBundle bundle = load_bundle(doc.ann_path, doc.txt_path,
                                            doc.doc_id, nullptr);
        auto pit = patients.find(doc.doc_id);
        std::string patient =
            pit != patients.end() ? pit->second : doc.doc_id;
        std::map<std::string, std::size_t> counts;
        for (const auto& rec : bundle.annotations) ++counts[rec.category];
        if (counts.empty()) {
            // zero-critical documents still appear in the statistics
            dist.entries.push_back({doc.doc_id, patient, "NONE", false, 0});
            continue;
        }
        for (const auto& [cat, count] : counts) {
            const CategorySpec* spec = registry.find(cat);
            dist.entries.push_back(
                {doc.doc_id, patient, cat, spec != nullptr && spec->critical,
                 count});
        }
    }
    return dist;
}

// ---------------------------------------------------------------------------
// Benchmark corpus generation
// ---------------------------------------------------------------------------

// Deterministic synthetic corpus for throughput runs: plain word filler with
// annotated PHI mentions interleaved at a fixed rate across a category mix.
inline void generate_bench_corpus(const std::string& dir, std::size_t n_docs,
                                  std::size_t words_per_doc,
                                  std::size_t entities_per_doc,
                                  std::uint64_t seed,
                                  const Vocabulary& vocab) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    static constexpr const char* kFiller[] = {
        "the",     "patient", "was",    "seen",   "today",   "for",
        "review",  "of",      "stable", "chronic", "symptoms", "and",
        "denies",  "fever",   "chills", "pain",   "plan",    "continue",
        "current", "therapy"};
    static constexpr std::size_t kFillerCount =
        sizeof(kFiller) / sizeof(kFiller[0]);
    const auto& names = vocab.list("PATIENT.txt");
    const auto& hospitals = vocab.list("HOSPITAL.txt");

    for (std::size_t d = 0; d < n_docs; ++d) {
        Rng rng = Rng::derive(seed, "benchdoc:" + std::to_string(d));
        std::string text;
        std::vector<AnnotationRecord> anns;
        std::size_t entity_gap =
            entities_per_doc > 0
                ? std::max<std::size_t>(1, words_per_doc / entities_per_doc)
                : 0;
        std::size_t cp = 0; // ASCII corpus: bytes == code points
        std::size_t entities = 0;
        auto emit = [&](const std::string& token) {
            if (!text.empty()) {
                text += ' ';
                ++cp;
            }
            text += token;
            cp += token.size();
        };
        for (std::size_t w = 0; w < words_per_doc; ++w) {
            if (entity_gap > 0 && w % entity_gap == 0 &&
                entities < entities_per_doc) {
                std::string value;
                std::string category;
                switch (entities % 6) {
                case 0:
                    category = "PATIENT";
                    value = names[rng.below(names.size())];
                    break;
                case 1: {
                    category = "DATE";
                    value = surrogate_detail::random_canonical_date(rng);
                    break;
                }
                case 2:
                    category = "IDNUM";
                    value = surrogate_detail::canonical_id(rng);
                    break;
                case 3:
                    category = "PHONE";
                    value = surrogate_detail::canonical_phone(rng);
                    break;
                case 4:
                    category = "AGE";
                    value = std::to_string(rng.range(20, 89));
                    break;
                default:
                    category = "HOSPITAL";
                    value = hospitals[rng.below(hospitals.size())];
                    break;
                }
                std::size_t start = cp + (text.empty() ? 0 : 1);
                emit(value);
                AnnotationRecord rec;
                rec.id = "T" + std::to_string(anns.size() + 1);
                rec.category = category;
                rec.spans = {{start, start + value.size()}};
                rec.surface = value;
                anns.push_back(std::move(rec));
                ++entities;
            } else {
                emit(kFiller[rng.below(kFillerCount)]);
            }
        }
        text += '\n';
        DocumentBundle bundle;
        bundle.doc_id = "bench" + std::to_string(d);
        bundle.text = std::move(text);
        bundle.annotations = std::move(anns);
        write_bundle(bundle, dir);
    }
}

} // namespace bratsyn

#endif
