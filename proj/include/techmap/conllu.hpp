#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace techmap::extract {

/// One syntactic word of a CoNLL-U sentence.
struct Token {
    int index = 0; // 1-based
    std::string surface;
    std::string lemma;
    std::string upos;
    int head = 0; // 0 = root
    std::string deprel;
};

struct Sentence {
    std::string sent_id;
    std::vector<Token> tokens; // tokens[i].index == i + 1

    int size() const noexcept { return static_cast<int>(tokens.size()); }
    bool contains(int index) const noexcept { return index >= 1 && index <= size(); }
    const Token& at(int index) const { return tokens.at(static_cast<std::size_t>(index - 1)); }
};

struct ParsedDocument {
    std::string doc_id;
    std::vector<Sentence> sentences;

    const Sentence* find_sentence(const std::string& sent_id) const;
};

/// Reads 10-column CoNLL-U. Documents start at `# newdoc id = ...`, sentence
/// ids come from `# sent_id = ...` (defaulting to the 1-based position within
/// the document). Multiword-token ranges and empty nodes are skipped.
/// Throws DataError citing the line for column-count violations, sentences
/// outside a document, non-contiguous indices, bad heads, or a root count
/// other than one.
std::vector<ParsedDocument> parse_conllu(std::istream& in, const std::string& source = "<conllu>");

/// Relation label without its subtype, lowercased ("nmod:poss" -> "nmod").
std::string base_relation(const std::string& deprel);

} // namespace techmap::extract
