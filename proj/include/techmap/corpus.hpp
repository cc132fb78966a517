#pragma once

#include "techmap/error.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace techmap::corpus {

/// One bibliographic record.
struct Document {
    std::string id;
    std::string title;
    std::string abstract_text;
    int year = 0;
    std::vector<std::string> author_keywords;
    std::optional<std::string> first_author_country;
    bool retracted = false;
    /// Canonical concept terms found in title, abstract or keywords.
    std::set<std::string> concept_tags;
    /// False when the abstract is blank; such records never reach extraction.
    bool extractable = true;

    bool operator==(const Document&) const = default;
};

struct DocumentSet {
    std::vector<Document> documents;
    std::string source_path;
    std::string loaded_at;

    std::size_t size() const noexcept { return documents.size(); }
    bool empty() const noexcept { return documents.empty(); }
};

/// A search concept and the surface strings that denote it.
struct ConceptTerm {
    std::string canonical;
    std::vector<std::string> surface_variants;
};

enum class Format { jsonl, csv };

struct LoadOptions {
    /// Skip malformed records (recorded in the report) instead of aborting.
    bool skip_malformed = false;
};

struct LoadReport {
    struct Skipped {
        std::size_t line;
        std::string reason;
    };
    std::vector<Skipped> skipped;
    std::size_t non_extractable = 0;
};

DocumentSet load_corpus(const std::filesystem::path& path, Format format,
                        const LoadOptions& options = {}, LoadReport* report = nullptr);

/// Stream variants; `source` names the input in error messages.
DocumentSet read_jsonl(std::istream& in, const std::string& source,
                       const LoadOptions& options = {}, LoadReport* report = nullptr);
DocumentSet read_csv(std::istream& in, const std::string& source,
                     const LoadOptions& options = {}, LoadReport* report = nullptr);

/// Serializes documents (including concept_tags and extractable) as JSONL.
void write_jsonl(std::ostream& out, const DocumentSet& set);

Format parse_format(const std::string& name);

// ---------------------------------------------------------------------------

struct DedupReport {
    struct Removal {
        std::string id;
        std::string reason; // "retracted" or "duplicate"
        std::string kept_id; // surviving record for duplicates
    };
    std::vector<Removal> removals;
};

/// Case-folded title with punctuation removed and whitespace collapsed,
/// followed by the year.
std::string dedup_key(const Document& doc);

/// Drops retracted records, then keeps the first record for every dedup key.
DocumentSet deduplicate(const DocumentSet& set, DedupReport* report = nullptr);

struct YearWindow {
    int min_year = 2011;
    std::optional<int> max_year;
};

/// Keeps documents with min_year <= year <= max_year.
DocumentSet filter_years(const DocumentSet& set, const YearWindow& window,
                         std::size_t* removed = nullptr);

// ---------------------------------------------------------------------------

enum class MatchMode { word, substring };

/// Tab-separated `canonical<TAB>variant1|variant2|...`; '#' starts a comment.
std::vector<ConceptTerm> read_concept_terms(std::istream& in, const std::string& source);
std::vector<ConceptTerm> load_concept_terms(const std::filesystem::path& path);
/// The eight concept terms of the reference search query.
std::vector<ConceptTerm> default_concept_terms();

/// Case-insensitive search of `needle` in `haystack`; in word mode the match
/// must not be flanked by alphanumeric characters.
bool contains_term(std::string_view haystack, std::string_view needle, MatchMode mode);

DocumentSet tag_search_terms(const DocumentSet& set, const std::vector<ConceptTerm>& terms,
                             MatchMode mode = MatchMode::word);

// ---------------------------------------------------------------------------

/// Documents per (year, concept). Columns are ordered by growth between the
/// first and last year (descending, ties by name); rows cover every year in
/// [first, last].
struct TermHistogram {
    std::vector<int> years;
    std::vector<std::string> terms;
    std::vector<std::vector<long>> counts; // [year][term]

    bool empty() const noexcept { return years.empty(); }
    long at(int year, const std::string& term) const;
};

TermHistogram term_year_histogram(const DocumentSet& set);
void write_histogram_csv(std::ostream& out, const TermHistogram& h);

} // namespace techmap::corpus
