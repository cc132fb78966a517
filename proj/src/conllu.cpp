#include "techmap/conllu.hpp"

#include "techmap/error.hpp"
#include "techmap/text.hpp"

#include <istream>
#include <unordered_set>

namespace techmap::extract {

const Sentence* ParsedDocument::find_sentence(const std::string& sent_id) const {
    for (const auto& s : sentences)
        if (s.sent_id == sent_id) return &s;
    return nullptr;
}

std::string base_relation(const std::string& deprel) {
    const auto colon = deprel.find(':');
    return text::to_lower(colon == std::string::npos ? deprel : deprel.substr(0, colon));
}

namespace {

std::string comment_value(std::string_view line, std::string_view key) {
    // "# key = value"
    auto body = text::trim(line.substr(1));
    if (body.substr(0, key.size()) != key) return {};
    body = text::trim(body.substr(key.size()));
    if (body.empty() || body.front() != '=') return {};
    return std::string(text::trim(body.substr(1)));
}

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    void comment(std::string_view line, std::size_t lineno) {
        if (auto id = comment_value(line, "newdoc id"); !id.empty()) {
            flush_sentence(lineno);
            if (!doc_ids_.insert(id).second)
                throw DataError("duplicate newdoc id \"" + id + "\"", source_, lineno);
            docs_.push_back({id, {}});
            return;
        }
        if (auto id = comment_value(line, "sent_id"); !id.empty()) pending_sent_id_ = id;
    }

    void token_line(std::string_view line, std::size_t lineno) {
        auto cols = text::split(line, '\t');
        if (cols.size() != 10)
            throw DataError("expected 10 tab-separated columns, found " + std::to_string(cols.size()),
                            source_, lineno);
        const auto& id = cols[0];
        if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) return;
        if (docs_.empty()) throw DataError("sentence before any '# newdoc id' comment", source_, lineno);

        if (!in_sentence_) {
            in_sentence_ = true;
            sentence_ = Sentence{};
            sentence_.sent_id = pending_sent_id_.empty()
                                    ? std::to_string(docs_.back().sentences.size() + 1)
                                    : pending_sent_id_;
            pending_sent_id_.clear();
            sentence_line_ = lineno;
        }
        Token tok;
        auto index = text::parse_int(id);
        if (!index || *index != sentence_.size() + 1)
            throw DataError("token index \"" + id + "\" is not contiguous", source_, lineno);
        tok.index = static_cast<int>(*index);
        tok.surface = cols[1];
        tok.lemma = cols[2] == "_" && cols[1] != "_" ? std::string() : cols[2];
        tok.upos = cols[3];
        auto head = text::parse_int(cols[6]);
        if (!head || *head < 0) throw DataError("invalid head \"" + cols[6] + "\"", source_, lineno);
        tok.head = static_cast<int>(*head);
        tok.deprel = cols[7];
        if (tok.deprel.empty() || tok.deprel == "_")
            throw DataError("missing dependency relation", source_, lineno);
        if (tok.head == tok.index) throw DataError("token is its own head", source_, lineno);
        sentence_.tokens.push_back(std::move(tok));
    }

    void flush_sentence(std::size_t lineno) {
        if (!in_sentence_) return;
        in_sentence_ = false;
        int roots = 0;
        for (const auto& t : sentence_.tokens) {
            if (t.head > sentence_.size())
                throw DataError("head " + std::to_string(t.head) + " outside sentence of " +
                                    std::to_string(sentence_.size()) + " tokens",
                                source_, sentence_line_ + static_cast<std::size_t>(t.index) - 1);
            if (t.head == 0) ++roots;
        }
        if (roots != 1)
            throw DataError("sentence has " + std::to_string(roots) + " roots (expected 1)", source_,
                            sentence_line_);
        (void)lineno;
        docs_.back().sentences.push_back(std::move(sentence_));
    }

    std::vector<ParsedDocument> take() { return std::move(docs_); }

private:
    std::string source_;
    std::vector<ParsedDocument> docs_;
    std::unordered_set<std::string> doc_ids_;
    Sentence sentence_;
    bool in_sentence_ = false;
    std::size_t sentence_line_ = 0;
    std::string pending_sent_id_;
};

} // namespace

std::vector<ParsedDocument> parse_conllu(std::istream& in, const std::string& source) {
    Reader reader(source);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) {
            reader.flush_sentence(lineno);
        } else if (line.front() == '#') {
            reader.comment(line, lineno);
        } else {
            reader.token_line(line, lineno);
        }
    }
    reader.flush_sentence(lineno);
    return reader.take();
}

} // namespace techmap::extract
