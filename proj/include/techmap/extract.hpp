#pragma once

#include "techmap/conllu.hpp"
#include "techmap/corpus.hpp"
#include "techmap/error.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace techmap::extract {

enum class HeadSource { annotation, gazetteer, heuristic };

std::string to_string(HeadSource s);
HeadSource parse_head_source(const std::string& name);

struct HeadCandidate {
    std::string doc_id;
    std::string sent_id;
    int token_index = 0;
    HeadSource source = HeadSource::gazetteer;

    bool operator==(const HeadCandidate&) const = default;
};

/// Word lists driving head detection and term post-processing. Every entry
/// is stored lowercase.
struct Lexicons {
    std::set<std::string> gazetteer_heads;
    std::set<std::string> blacklist;
    std::set<std::string> leading_words;
    /// head lemma -> tokens that follow the head ("internet" -> {"of", "things"})
    std::map<std::string, std::vector<std::string>> head_suffix_rules;

    /// Shipped defaults: leading words and the "internet of things" rule.
    static Lexicons defaults();

    /// Adds the lowercase form (and a singular-final-word form) of every
    /// concept-term variant to the blacklist.
    void blacklist_concepts(const std::vector<corpus::ConceptTerm>& terms);

    void add_gazetteer(std::istream& in);
    void add_blacklist(std::istream& in);
    void add_leading_words(std::istream& in);
    /// `head_lemma<TAB>suffix tokens`
    void add_suffix_rules(std::istream& in, const std::string& source);
};

/// One line-oriented lexicon file into `into`, lowercased; '#' lines ignored.
void read_word_list(std::istream& in, std::set<std::string>& into);

// ---------------------------------------------------------------------------

struct HeadAnnotation {
    std::string doc_id;
    std::string sent_id;
    int token_index = 0;
};

/// JSONL with {doc_id, sent_id, token_index}; sent_id may be a string or an
/// integer.
std::vector<HeadAnnotation> read_annotations(std::istream& in, const std::string& source);

/// POS pattern for the heuristic recognizer: a token whose UPOS is in
/// `head_upos`, that is not itself attached through a modifier relation, and
/// that has at least `min_modifiers` dependents through `modifier_deprels`.
struct HeuristicPattern {
    std::set<std::string> head_upos{"NOUN", "PROPN"};
    std::set<std::string> modifier_deprels{"amod", "compound"};
    std::size_t min_modifiers = 1;
};

class Recognizer {
public:
    static Recognizer gazetteer();
    static Recognizer annotations(const std::vector<HeadAnnotation>& spans);
    static Recognizer heuristic(HeuristicPattern pattern = {});

    HeadSource mode() const noexcept { return mode_; }
    const HeuristicPattern& pattern() const noexcept { return pattern_; }
    /// Annotated token indices for one sentence (sorted, unique).
    const std::vector<int>* annotated(const std::string& doc_id, const std::string& sent_id) const;
    /// Annotated sentence ids of one document.
    std::vector<std::string> annotated_sentences(const std::string& doc_id) const;

private:
    HeadSource mode_ = HeadSource::gazetteer;
    std::map<std::pair<std::string, std::string>, std::vector<int>> spans_;
    HeuristicPattern pattern_;
};

/// Candidates in sentence order, then token order.
std::vector<HeadCandidate> detect_heads(const ParsedDocument& doc, const Recognizer& recognizer,
                                        const Lexicons& lexicons);

// ---------------------------------------------------------------------------

/// Relations whose dependents are folded into a term.
bool is_modifier_relation(const std::string& deprel);

struct TermMention {
    std::string doc_id;
    std::string sent_id;
    int head_index = 0;
    std::vector<int> token_indices; // strictly increasing
    std::string normalized;         // filled by normalization
    /// Set on abbreviation mentions once the main term is normalized.
    std::optional<std::string> alias_of;
    /// Position of the main mention in the same expansion result.
    std::optional<std::size_t> alias_for;
};

/// Expands a head into full term mentions: transitive amod/compound/npadvmod/
/// nmod modifiers, one mention per conjunct of a coordinated modifier or
/// head, and an alias mention for a parenthesized or all-caps appositive.
/// Throws DataError when the head's ancestor chain is cyclic.
std::vector<TermMention> expand_term(const HeadCandidate& head, const Sentence& sentence);

enum class Rejection { blacklisted, empty };

std::string to_string(Rejection r);

struct NormalizeResult {
    std::string term;
    std::optional<Rejection> rejected;

    explicit operator bool() const noexcept { return !rejected; }
};

/// Lowercase lemma form of a token; strips a plural 's' when the lemma
/// column is empty.
std::string lemma_of(const Token& token);

/// Lemmatize and lowercase, strip leading words, apply head-suffix rules,
/// join with single spaces, and reject blacklisted or empty results.
NormalizeResult normalize_term(const TermMention& mention, const Sentence& sentence,
                               const Lexicons& lexicons);

// ---------------------------------------------------------------------------

struct DocumentTerms {
    std::string doc_id;
    int year = 0;
    std::vector<std::set<std::string>> sentences;
    /// Abbreviation -> expansion; abbreviations are already merged into
    /// their expansion in `sentences`.
    std::map<std::string, std::string> aliases;

    /// Union of the sentence sets.
    std::set<std::string> terms() const;

    bool operator==(const DocumentTerms&) const = default;
};

struct ExtractionStats {
    std::size_t documents = 0;
    std::size_t sentences = 0;
    std::size_t head_candidates = 0;
    std::size_t mentions = 0;
    std::size_t alias_mentions = 0;
    std::size_t accepted = 0;
    std::map<std::string, std::size_t> rejections; // reason -> count

    void merge(const ExtractionStats& other);
};

DocumentTerms extract_document(const ParsedDocument& doc, const Recognizer& recognizer,
                               const Lexicons& lexicons, ExtractionStats* stats = nullptr);

struct ExtractionResult {
    std::vector<DocumentTerms> documents;
    ExtractionStats stats;
    std::size_t skipped_non_extractable = 0;
    std::size_t missing_parse = 0;
    Diagnostics diagnostics;
};

/// Extracts every extractable corpus document that has a parse, in corpus
/// order. Parses without a corpus record are skipped with a warning.
ExtractionResult extract_corpus(const std::vector<ParsedDocument>& parsed, const corpus::DocumentSet& corpus,
                                const Recognizer& recognizer, const Lexicons& lexicons,
                                unsigned threads = 1);

/// One JSON object per document: {"doc_id", "year", "sentences": [[...]], "aliases": {...}}.
void write_terms_jsonl(std::ostream& out, const std::vector<DocumentTerms>& docs);
std::vector<DocumentTerms> read_terms_jsonl(std::istream& in, const std::string& source);

/// Extraction report as pretty-printed JSON.
void write_extraction_report(std::ostream& out, const ExtractionResult& result);

} // namespace techmap::extract
