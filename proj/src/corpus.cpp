#include "techmap/corpus.hpp"

#include "techmap/csv.hpp"
#include "techmap/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace techmap::corpus {

using nlohmann::json;

namespace {

struct Malformed {
    std::string reason;
};

bool blank(std::string_view s) { return text::trim(s).empty(); }

void finish_record(Document& doc) { doc.extractable = !blank(doc.abstract_text); }

Document document_from_json(const json& j) {
    if (!j.is_object()) throw Malformed{"record is not a JSON object"};
    Document doc;
    auto require_string = [&](const char* key) -> std::string {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) throw Malformed{std::string("missing \"") + key + "\""};
        if (!it->is_string()) throw Malformed{std::string("\"") + key + "\" must be a string"};
        return it->get<std::string>();
    };
    doc.id = require_string("id");
    if (doc.id.empty()) throw Malformed{"empty \"id\""};
    doc.title = require_string("title");

    auto year = j.find("year");
    if (year == j.end() || year->is_null()) throw Malformed{"missing \"year\""};
    if (!year->is_number_integer()) throw Malformed{"\"year\" must be an integer"};
    doc.year = year->get<int>();

    if (auto it = j.find("abstract"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw Malformed{"\"abstract\" must be a string"};
        doc.abstract_text = it->get<std::string>();
    }
    if (auto it = j.find("author_keywords"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw Malformed{"\"author_keywords\" must be an array"};
        for (const auto& k : *it) {
            if (!k.is_string()) throw Malformed{"\"author_keywords\" entries must be strings"};
            doc.author_keywords.push_back(k.get<std::string>());
        }
    }
    if (auto it = j.find("first_author_country"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw Malformed{"\"first_author_country\" must be a string or null"};
        doc.first_author_country = it->get<std::string>();
    }
    if (auto it = j.find("retracted"); it != j.end() && !it->is_null()) {
        if (!it->is_boolean()) throw Malformed{"\"retracted\" must be a boolean"};
        doc.retracted = it->get<bool>();
    }
    if (auto it = j.find("concept_tags"); it != j.end() && !it->is_null()) {
        if (!it->is_array()) throw Malformed{"\"concept_tags\" must be an array"};
        for (const auto& t : *it) doc.concept_tags.insert(t.get<std::string>());
    }
    finish_record(doc);
    return doc;
}

class SetBuilder {
public:
    SetBuilder(const std::string& source, const LoadOptions& options, LoadReport* report)
        : source_(source), options_(options), report_(report) {
        set_.source_path = source;
    }

    void malformed(std::size_t line, const std::string& reason) {
        if (!options_.skip_malformed) throw DataError("malformed record: " + reason, source_, line);
        if (report_) report_->skipped.push_back({line, reason});
    }

    void add(Document doc, std::size_t line) {
        if (!ids_.insert(doc.id).second)
            throw DataError("duplicate id \"" + doc.id + "\"", source_, line);
        if (!doc.extractable && report_) ++report_->non_extractable;
        set_.documents.push_back(std::move(doc));
    }

    DocumentSet take() { return std::move(set_); }

private:
    const std::string& source_;
    const LoadOptions& options_;
    LoadReport* report_;
    DocumentSet set_;
    std::unordered_set<std::string> ids_;
};

bool parse_bool(std::string_view s, bool& out) {
    const auto v = text::to_lower(text::trim(s));
    if (v == "true" || v == "1" || v == "yes") { out = true; return true; }
    if (v == "false" || v == "0" || v == "no" || v.empty()) { out = false; return true; }
    return false;
}

std::string timestamp_now() {
    // Provenance only; never written into stage outputs.
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

} // namespace

DocumentSet read_jsonl(std::istream& in, const std::string& source, const LoadOptions& options,
                       LoadReport* report) {
    SetBuilder builder(source, options, report);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank(line)) continue;
        Document doc;
        try {
            doc = document_from_json(json::parse(line));
        } catch (const json::parse_error& e) {
            builder.malformed(lineno, std::string("invalid JSON (") + e.what() + ")");
            continue;
        } catch (const json::exception& e) {
            builder.malformed(lineno, e.what());
            continue;
        } catch (const Malformed& m) {
            builder.malformed(lineno, m.reason);
            continue;
        }
        builder.add(std::move(doc), lineno);
    }
    return builder.take();
}

DocumentSet read_csv(std::istream& in, const std::string& source, const LoadOptions& options,
                     LoadReport* report) {
    SetBuilder builder(source, options, report);
    csv::Reader reader(in, source);
    auto header = reader.next();
    if (!header) return builder.take();

    std::unordered_map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header->size(); ++i) col[std::string(text::trim((*header)[i]))] = i;
    for (const char* required : {"id", "title", "year"})
        if (!col.count(required))
            throw DataError(std::string("CSV header lacks column \"") + required + "\"", source,
                            reader.line());

    while (auto row = reader.next()) {
        const std::size_t lineno = reader.line();
        if (row->size() != header->size()) {
            builder.malformed(lineno, "expected " + std::to_string(header->size()) + " fields, got " +
                                          std::to_string(row->size()));
            continue;
        }
        auto field = [&](const char* name) -> std::string {
            auto it = col.find(name);
            return it == col.end() ? std::string() : (*row)[it->second];
        };
        Document doc;
        doc.id = std::string(text::trim(field("id")));
        doc.title = field("title");
        doc.abstract_text = field("abstract");
        if (doc.id.empty()) {
            builder.malformed(lineno, "missing \"id\"");
            continue;
        }
        auto year = text::parse_int(field("year"));
        if (!year) {
            builder.malformed(lineno, blank(field("year")) ? "missing \"year\"" : "\"year\" must be an integer");
            continue;
        }
        doc.year = static_cast<int>(*year);
        for (auto& k : text::split(field("author_keywords"), ';')) {
            auto t = text::trim(k);
            if (!t.empty()) doc.author_keywords.emplace_back(t);
        }
        if (auto c = text::trim(field("first_author_country")); !c.empty())
            doc.first_author_country = std::string(c);
        if (!parse_bool(field("retracted"), doc.retracted)) {
            builder.malformed(lineno, "\"retracted\" must be a boolean");
            continue;
        }
        finish_record(doc);
        builder.add(std::move(doc), lineno);
    }
    return builder.take();
}

DocumentSet load_corpus(const std::filesystem::path& path, Format format, const LoadOptions& options,
                        LoadReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus file", path.string());
    DocumentSet set = format == Format::jsonl ? read_jsonl(in, path.string(), options, report)
                                              : read_csv(in, path.string(), options, report);
    set.loaded_at = timestamp_now();
    return set;
}

void write_jsonl(std::ostream& out, const DocumentSet& set) {
    for (const auto& d : set.documents) {
        nlohmann::ordered_json j;
        j["id"] = d.id;
        j["title"] = d.title;
        j["abstract"] = d.abstract_text;
        j["year"] = d.year;
        j["author_keywords"] = d.author_keywords;
        if (d.first_author_country)
            j["first_author_country"] = *d.first_author_country;
        else
            j["first_author_country"] = nullptr;
        j["retracted"] = d.retracted;
        j["concept_tags"] = std::vector<std::string>(d.concept_tags.begin(), d.concept_tags.end());
        j["extractable"] = d.extractable;
        out << j.dump() << '\n';
    }
}

Format parse_format(const std::string& name) {
    const auto n = text::to_lower(name);
    if (n == "jsonl") return Format::jsonl;
    if (n == "csv") return Format::csv;
    throw ConfigError({"unknown corpus format \"" + name + "\" (expected jsonl or csv)"});
}

// ---------------------------------------------------------------------------

std::string dedup_key(const Document& doc) {
    std::string key;
    bool pending_space = false;
    for (char c : doc.title) {
        if (text::is_alnum(c)) {
            if (pending_space && !key.empty()) key += ' ';
            pending_space = false;
            key += text::is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c;
        } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            pending_space = true;
        }
        // other punctuation is dropped without introducing a word break
    }
    return key + '|' + std::to_string(doc.year);
}

DocumentSet deduplicate(const DocumentSet& set, DedupReport* report) {
    DocumentSet out;
    out.source_path = set.source_path;
    out.loaded_at = set.loaded_at;
    std::unordered_map<std::string, std::string> seen; // key -> surviving id
    for (const auto& doc : set.documents) {
        if (doc.retracted) {
            if (report) report->removals.push_back({doc.id, "retracted", {}});
            continue;
        }
        auto [it, inserted] = seen.emplace(dedup_key(doc), doc.id);
        if (!inserted) {
            if (report) report->removals.push_back({doc.id, "duplicate", it->second});
            continue;
        }
        out.documents.push_back(doc);
    }
    return out;
}

DocumentSet filter_years(const DocumentSet& set, const YearWindow& window, std::size_t* removed) {
    DocumentSet out;
    out.source_path = set.source_path;
    out.loaded_at = set.loaded_at;
    std::size_t dropped = 0;
    for (const auto& doc : set.documents) {
        if (doc.year < window.min_year || (window.max_year && doc.year > *window.max_year)) {
            ++dropped;
            continue;
        }
        out.documents.push_back(doc);
    }
    if (removed) *removed = dropped;
    return out;
}

// ---------------------------------------------------------------------------

std::vector<ConceptTerm> read_concept_terms(std::istream& in, const std::string& source) {
    std::vector<ConceptTerm> terms;
    std::unordered_set<std::string> canonicals;
    std::unordered_map<std::string, std::string> variant_owner;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto tab = t.find('\t');
        if (tab == std::string_view::npos)
            throw DataError("expected canonical<TAB>variants", source, lineno);
        ConceptTerm term;
        term.canonical = std::string(text::trim(t.substr(0, tab)));
        if (term.canonical.empty()) throw DataError("empty canonical term", source, lineno);
        if (!canonicals.insert(term.canonical).second)
            throw DataError("duplicate canonical term \"" + term.canonical + "\"", source, lineno);
        for (auto& v : text::split(t.substr(tab + 1), '|')) {
            auto variant = std::string(text::trim(v));
            if (variant.empty()) continue;
            auto key = text::to_lower(variant);
            auto [it, inserted] = variant_owner.emplace(key, term.canonical);
            if (!inserted && it->second != term.canonical)
                throw DataError("variant \"" + variant + "\" maps to both \"" + it->second +
                                    "\" and \"" + term.canonical + "\"",
                                source, lineno);
            term.surface_variants.push_back(std::move(variant));
        }
        if (term.surface_variants.empty())
            throw DataError("concept term \"" + term.canonical + "\" has no variants", source, lineno);
        terms.push_back(std::move(term));
    }
    return terms;
}

std::vector<ConceptTerm> load_concept_terms(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open concept term file", path.string());
    return read_concept_terms(in, path.string());
}

std::vector<ConceptTerm> default_concept_terms() {
    return {
        {"industry-4.0", {"Industry 4.0"}},
        {"industrie-4.0", {"Industrie 4.0"}},
        {"digital-manufacturing", {"digital manufacturing"}},
        {"smart-manufacturing", {"smart manufacturing"}},
        {"intelligent-manufacturing", {"intelligent manufacturing"}},
        {"cloud-manufacturing",
         {"cloud manufacturing", "cloud-based manufacturing", "cloud based manufacturing"}},
        {"factory-of-the-future",
         {"factory of the future", "factories of the future"}},
        {"advanced-manufacturing", {"advanced manufacturing"}},
    };
}

bool contains_term(std::string_view haystack, std::string_view needle, MatchMode mode) {
    if (needle.empty() || needle.size() > haystack.size()) return false;
    auto lower = [](char c) { return text::is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c; };
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
        std::size_t k = 0;
        while (k < needle.size() && lower(haystack[i + k]) == lower(needle[k])) ++k;
        if (k != needle.size()) continue;
        if (mode == MatchMode::substring) return true;
        const bool left_ok = i == 0 || !text::is_alnum(haystack[i - 1]) || !text::is_alnum(needle.front());
        const std::size_t end = i + needle.size();
        const bool right_ok =
            end == haystack.size() || !text::is_alnum(haystack[end]) || !text::is_alnum(needle.back());
        if (left_ok && right_ok) return true;
    }
    return false;
}

DocumentSet tag_search_terms(const DocumentSet& set, const std::vector<ConceptTerm>& terms,
                             MatchMode mode) {
    DocumentSet out = set;
    for (auto& doc : out.documents) {
        doc.concept_tags.clear();
        for (const auto& term : terms) {
            bool hit = false;
            for (const auto& v : term.surface_variants) {
                hit = contains_term(doc.title, v, mode) || contains_term(doc.abstract_text, v, mode);
                for (std::size_t k = 0; !hit && k < doc.author_keywords.size(); ++k)
                    hit = contains_term(doc.author_keywords[k], v, mode);
                if (hit) break;
            }
            if (hit) doc.concept_tags.insert(term.canonical);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

long TermHistogram::at(int year, const std::string& term) const {
    auto yi = std::find(years.begin(), years.end(), year);
    auto ti = std::find(terms.begin(), terms.end(), term);
    if (yi == years.end() || ti == terms.end()) return 0;
    return counts[static_cast<std::size_t>(yi - years.begin())][static_cast<std::size_t>(ti - terms.begin())];
}

TermHistogram term_year_histogram(const DocumentSet& set) {
    TermHistogram h;
    if (set.empty()) return h;
    int first = set.documents.front().year, last = first;
    std::set<std::string> names;
    for (const auto& d : set.documents) {
        first = std::min(first, d.year);
        last = std::max(last, d.year);
        names.insert(d.concept_tags.begin(), d.concept_tags.end());
    }
    if (names.empty()) return h;

    std::vector<std::string> order(names.begin(), names.end());
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < order.size(); ++i) col[order[i]] = i;
    const std::size_t rows = static_cast<std::size_t>(last - first + 1);
    std::vector<std::vector<long>> counts(rows, std::vector<long>(order.size(), 0));
    for (const auto& d : set.documents)
        for (const auto& t : d.concept_tags) ++counts[static_cast<std::size_t>(d.year - first)][col[t]];

    std::vector<std::size_t> perm(order.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    auto growth = [&](std::size_t c) { return counts.back()[c] - counts.front()[c]; };
    std::stable_sort(perm.begin(), perm.end(),
                     [&](std::size_t a, std::size_t b) { return growth(a) > growth(b); });

    for (int y = first; y <= last; ++y) h.years.push_back(y);
    for (auto c : perm) h.terms.push_back(order[c]);
    h.counts.assign(rows, std::vector<long>(perm.size(), 0));
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t k = 0; k < perm.size(); ++k) h.counts[r][k] = counts[r][perm[k]];
    return h;
}

void write_histogram_csv(std::ostream& out, const TermHistogram& h) {
    std::vector<std::string> header{"year"};
    header.insert(header.end(), h.terms.begin(), h.terms.end());
    out << csv::join_row(header) << '\n';
    for (std::size_t r = 0; r < h.years.size(); ++r) {
        out << h.years[r];
        for (long c : h.counts[r]) out << ',' << c;
        out << '\n';
    }
}

} // namespace techmap::corpus
