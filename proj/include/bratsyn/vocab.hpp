#ifndef BRATSYN_VOCAB_HPP
#define BRATSYN_VOCAB_HPP

#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bratsyn {

enum class GeneratorKind {
    name_list,
    location_list,
    hospital_list,
    organization_list,
    profession_list,
    date_offset,
    age_offset,
    time_offset,
    phone_format,
    id_format,
    alphanumeric,
    email,
    url,
    passthrough_label,
};

inline bool is_list_kind(GeneratorKind k) {
    switch (k) {
    case GeneratorKind::name_list:
    case GeneratorKind::location_list:
    case GeneratorKind::hospital_list:
    case GeneratorKind::organization_list:
    case GeneratorKind::profession_list:
        return true;
    default:
        return false;
    }
}

inline bool is_offset_kind(GeneratorKind k) {
    return k == GeneratorKind::date_offset || k == GeneratorKind::age_offset ||
           k == GeneratorKind::time_offset;
}

inline std::optional<GeneratorKind> kind_from_string(std::string_view s) {
    static const std::map<std::string, GeneratorKind, std::less<>> table = {
        {"name-list", GeneratorKind::name_list},
        {"location-list", GeneratorKind::location_list},
        {"hospital-list", GeneratorKind::hospital_list},
        {"organization-list", GeneratorKind::organization_list},
        {"profession-list", GeneratorKind::profession_list},
        {"date-offset", GeneratorKind::date_offset},
        {"age-offset", GeneratorKind::age_offset},
        {"time-offset", GeneratorKind::time_offset},
        {"phone-format", GeneratorKind::phone_format},
        {"id-format", GeneratorKind::id_format},
        {"alphanumeric", GeneratorKind::alphanumeric},
        {"email", GeneratorKind::email},
        {"url", GeneratorKind::url},
        {"passthrough-label", GeneratorKind::passthrough_label},
    };
    auto it = table.find(s);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

inline std::string_view kind_to_string(GeneratorKind k) {
    switch (k) {
    case GeneratorKind::name_list: return "name-list";
    case GeneratorKind::location_list: return "location-list";
    case GeneratorKind::hospital_list: return "hospital-list";
    case GeneratorKind::organization_list: return "organization-list";
    case GeneratorKind::profession_list: return "profession-list";
    case GeneratorKind::date_offset: return "date-offset";
    case GeneratorKind::age_offset: return "age-offset";
    case GeneratorKind::time_offset: return "time-offset";
    case GeneratorKind::phone_format: return "phone-format";
    case GeneratorKind::id_format: return "id-format";
    case GeneratorKind::alphanumeric: return "alphanumeric";
    case GeneratorKind::email: return "email";
    case GeneratorKind::url: return "url";
    case GeneratorKind::passthrough_label: return "passthrough-label";
    }
    return "?";
}

struct CategorySpec {
    std::string category;
    GeneratorKind kind;
    bool critical = false;
    // data file under the vocab directory for list kinds; defaults to
    // "<category>.txt"
    std::string vocab_file;
};

// Label -> generator mapping. The built-in table covers every annotation
// label the tool understands out of the box; a config file can remap or
// extend it for new corpora without code changes.
class CategoryRegistry {
public:
    static CategoryRegistry builtin() {
        CategoryRegistry r;
        auto add = [&](std::string cat, GeneratorKind kind, bool critical,
                       std::string file = {}) {
            if (file.empty()) file = cat + ".txt";
            r.specs_[cat] = CategorySpec{cat, kind, critical, std::move(file)};
        };
        add("PATIENT", GeneratorKind::name_list, true);
        add("DOCTOR", GeneratorKind::name_list, false);
        add("USERNAME", GeneratorKind::alphanumeric, false);
        add("LOCATION-OTHER", GeneratorKind::location_list, false);
        add("HOSPITAL", GeneratorKind::hospital_list, false);
        add("WARD", GeneratorKind::hospital_list, false);
        add("ZIP", GeneratorKind::id_format, false);
        add("ORGANIZATION", GeneratorKind::organization_list, false);
        add("COUNTRY", GeneratorKind::location_list, false);
        add("STATE", GeneratorKind::location_list, false);
        add("CITY", GeneratorKind::location_list, false);
        add("STREET", GeneratorKind::location_list, false);
        add("DATE", GeneratorKind::date_offset, false);
        add("HOLIDAY", GeneratorKind::date_offset, false);
        add("AGE", GeneratorKind::age_offset, false);
        add("AGE_90_ANDUP", GeneratorKind::age_offset, false);
        add("PHONE", GeneratorKind::phone_format, true);
        add("FAX", GeneratorKind::phone_format, true);
        add("VEHICLE_ID", GeneratorKind::id_format, true);
        add("DEVICE", GeneratorKind::alphanumeric, true);
        add("IDNUM", GeneratorKind::id_format, true);
        add("MEDICAL_RECORD", GeneratorKind::alphanumeric, true);
        add("MEDICALRECORD", GeneratorKind::alphanumeric, true);
        add("SSN", GeneratorKind::id_format, true);
        add("ACCOUNT_ID", GeneratorKind::alphanumeric, true);
        add("EMAIL", GeneratorKind::email, true);
        add("URL", GeneratorKind::url, false);
        add("IP_ADDRESS", GeneratorKind::url, false);
        add("BIOID", GeneratorKind::alphanumeric, false);
        add("PROFESSION", GeneratorKind::profession_list, false);
        add("TIME", GeneratorKind::time_offset, false);
        return r;
    }

    // Config lines: LABEL = kind[,critical][,vocab_file]
    // '#' starts a comment. Entries override or extend the current table.
    void load(std::istream& in) {
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            auto trim = [](std::string& s) {
                while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                                      s.back() == '\r'))
                    s.pop_back();
                std::size_t b = s.find_first_not_of(" \t");
                if (b == std::string::npos) s.clear();
                else s.erase(0, b);
            };
            trim(line);
            if (line.empty()) continue;
            auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("category config line " +
                                         std::to_string(line_no) +
                                         ": expected LABEL = kind[,...]");
            std::string label = line.substr(0, eq);
            std::string rhs = line.substr(eq + 1);
            trim(label);
            trim(rhs);
            std::vector<std::string> parts;
            std::size_t p = 0;
            while (p <= rhs.size()) {
                auto c = rhs.find(',', p);
                std::string f = rhs.substr(
                    p, c == std::string::npos ? rhs.size() - p : c - p);
                trim(f);
                parts.push_back(f);
                if (c == std::string::npos) break;
                p = c + 1;
            }
            if (label.empty() || parts.empty() || parts[0].empty())
                throw std::runtime_error("category config line " +
                                         std::to_string(line_no) +
                                         ": empty label or kind");
            auto kind = kind_from_string(parts[0]);
            if (!kind)
                throw std::runtime_error("category config line " +
                                         std::to_string(line_no) +
                                         ": unknown kind '" + parts[0] + "'");
            CategorySpec spec;
            spec.category = label;
            spec.kind = *kind;
            spec.critical = parts.size() > 1 && (parts[1] == "critical" ||
                                                 parts[1] == "true");
            spec.vocab_file =
                parts.size() > 2 && !parts[2].empty() ? parts[2]
                                                      : label + ".txt";
            specs_[label] = std::move(spec);
        }
    }

    void load_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open category config " + path);
        load(in);
    }

    const CategorySpec* find(std::string_view label) const {
        auto it = specs_.find(std::string(label));
        return it == specs_.end() ? nullptr : &it->second;
    }

    const std::map<std::string, CategorySpec>& all() const { return specs_; }

private:
    std::map<std::string, CategorySpec> specs_;
};

// Lazily loads one-value-per-line vocabulary files from a data directory.
class Vocabulary {
public:
    explicit Vocabulary(std::string data_dir) : dir_(std::move(data_dir)) {}

    const std::vector<std::string>& list(const std::string& file) const {
        auto it = cache_.find(file);
        if (it != cache_.end()) return it->second;
        std::vector<std::string> values;
        std::ifstream in(dir_ + "/" + file);
        if (!in)
            throw std::runtime_error("cannot open vocabulary file " + dir_ +
                                     "/" + file);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) values.push_back(line);
        }
        if (values.empty())
            throw std::runtime_error("vocabulary file is empty: " + file);
        return cache_.emplace(file, std::move(values)).first->second;
    }

    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
    mutable std::map<std::string, std::vector<std::string>> cache_;
};

} // namespace bratsyn

#endif
