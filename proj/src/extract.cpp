#include "techmap/extract.hpp"

#include "techmap/parallel.hpp"
#include "techmap/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace techmap::extract {

using nlohmann::json;
using nlohmann::ordered_json;

std::string to_string(HeadSource s) {
    switch (s) {
    case HeadSource::annotation: return "annotation";
    case HeadSource::gazetteer: return "gazetteer";
    case HeadSource::heuristic: return "heuristic";
    }
    return "unknown";
}

HeadSource parse_head_source(const std::string& name) {
    const auto n = text::to_lower(name);
    if (n == "annotation" || n == "annotations") return HeadSource::annotation;
    if (n == "gazetteer") return HeadSource::gazetteer;
    if (n == "heuristic") return HeadSource::heuristic;
    throw ConfigError({"unknown recognizer \"" + name + "\" (expected annotation, gazetteer or heuristic)"});
}

std::string to_string(Rejection r) { return r == Rejection::blacklisted ? "blacklisted" : "empty"; }

// ---------------------------------------------------------------------------
// Lexicons

void read_word_list(std::istream& in, std::set<std::string>& into) {
    std::string line;
    while (std::getline(in, line)) {
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        into.insert(text::join(text::split_ws(text::to_lower(t)), " "));
    }
}

Lexicons Lexicons::defaults() {
    Lexicons lex;
    lex.leading_words = {"novel",    "expensive", "first",   "new",      "proposed", "various",
                         "different", "several",  "such",    "other",    "many",     "existing",
                         "current",  "typical",   "specific", "particular", "recent", "previous",
                         "following", "same"};
    lex.head_suffix_rules["internet"] = {"of", "things"};
    return lex;
}

namespace {

std::string singular_last_word(const std::string& phrase) {
    auto words = text::split_ws(phrase);
    if (words.empty()) return phrase;
    Token t;
    t.surface = words.back();
    words.back() = lemma_of(t);
    return text::join(words, " ");
}

} // namespace

void Lexicons::blacklist_concepts(const std::vector<corpus::ConceptTerm>& terms) {
    for (const auto& term : terms) {
        for (const auto& v : term.surface_variants) {
            auto lower = text::join(text::split_ws(text::to_lower(v)), " ");
            blacklist.insert(lower);
            blacklist.insert(singular_last_word(lower));
            if (lower.find('-') != std::string::npos) {
                auto spaced = lower;
                std::replace(spaced.begin(), spaced.end(), '-', ' ');
                spaced = text::join(text::split_ws(spaced), " ");
                blacklist.insert(spaced);
                blacklist.insert(singular_last_word(spaced));
            }
        }
    }
}

void Lexicons::add_gazetteer(std::istream& in) { read_word_list(in, gazetteer_heads); }
void Lexicons::add_blacklist(std::istream& in) { read_word_list(in, blacklist); }
void Lexicons::add_leading_words(std::istream& in) { read_word_list(in, leading_words); }

void Lexicons::add_suffix_rules(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto t = text::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto tab = t.find('\t');
        if (tab == std::string_view::npos) throw DataError("expected head_lemma<TAB>suffix", source, lineno);
        auto head = text::to_lower(text::trim(t.substr(0, tab)));
        auto suffix = text::split_ws(text::to_lower(t.substr(tab + 1)));
        if (head.empty() || suffix.empty()) throw DataError("empty suffix rule", source, lineno);
        head_suffix_rules[head] = std::move(suffix);
    }
}

// ---------------------------------------------------------------------------
// Head detection

std::vector<HeadAnnotation> read_annotations(std::istream& in, const std::string& source) {
    std::vector<HeadAnnotation> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            auto j = json::parse(line);
            HeadAnnotation a;
            a.doc_id = j.at("doc_id").get<std::string>();
            const auto& sid = j.at("sent_id");
            a.sent_id = sid.is_string() ? sid.get<std::string>() : std::to_string(sid.get<long long>());
            a.token_index = j.at("token_index").get<int>();
            out.push_back(std::move(a));
        } catch (const json::exception& e) {
            throw DataError(std::string("malformed annotation: ") + e.what(), source, lineno);
        }
    }
    return out;
}

Recognizer Recognizer::gazetteer() { return {}; }

Recognizer Recognizer::annotations(const std::vector<HeadAnnotation>& spans) {
    Recognizer r;
    r.mode_ = HeadSource::annotation;
    for (const auto& a : spans) r.spans_[{a.doc_id, a.sent_id}].push_back(a.token_index);
    for (auto& [key, v] : r.spans_) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    return r;
}

Recognizer Recognizer::heuristic(HeuristicPattern pattern) {
    Recognizer r;
    r.mode_ = HeadSource::heuristic;
    r.pattern_ = std::move(pattern);
    return r;
}

const std::vector<int>* Recognizer::annotated(const std::string& doc_id, const std::string& sent_id) const {
    auto it = spans_.find({doc_id, sent_id});
    return it == spans_.end() ? nullptr : &it->second;
}

std::vector<std::string> Recognizer::annotated_sentences(const std::string& doc_id) const {
    std::vector<std::string> out;
    for (auto it = spans_.lower_bound({doc_id, std::string()}); it != spans_.end() && it->first.first == doc_id;
         ++it)
        out.push_back(it->first.second);
    return out;
}

bool is_modifier_relation(const std::string& deprel) {
    const auto base = base_relation(deprel);
    return base == "amod" || base == "compound" || base == "npadvmod" || base == "nmod";
}

namespace {

bool is_noun(const Token& t) { return t.upos == "NOUN" || t.upos == "PROPN"; }

std::vector<std::vector<int>> children_of(const Sentence& s) {
    std::vector<std::vector<int>> children(static_cast<std::size_t>(s.size()) + 1);
    for (const auto& t : s.tokens) children[static_cast<std::size_t>(t.head)].push_back(t.index);
    return children;
}

} // namespace

std::vector<HeadCandidate> detect_heads(const ParsedDocument& doc, const Recognizer& recognizer,
                                        const Lexicons& lexicons) {
    std::vector<HeadCandidate> out;
    switch (recognizer.mode()) {
    case HeadSource::annotation: {
        for (const auto& sent_id : recognizer.annotated_sentences(doc.doc_id)) {
            const auto* sentence = doc.find_sentence(sent_id);
            for (int idx : *recognizer.annotated(doc.doc_id, sent_id)) {
                if (!sentence || !sentence->contains(idx))
                    throw DataError("annotation references nonexistent token " + doc.doc_id + "/" + sent_id +
                                    "/" + std::to_string(idx));
            }
        }
        for (const auto& s : doc.sentences)
            if (const auto* idx = recognizer.annotated(doc.doc_id, s.sent_id))
                for (int i : *idx) out.push_back({doc.doc_id, s.sent_id, i, HeadSource::annotation});
        break;
    }
    case HeadSource::gazetteer: {
        if (lexicons.gazetteer_heads.empty())
            throw ConfigError({"gazetteer recognizer requires a non-empty gazetteer"});
        for (const auto& s : doc.sentences)
            for (const auto& t : s.tokens)
                if (is_noun(t) && lexicons.gazetteer_heads.count(lemma_of(t)))
                    out.push_back({doc.doc_id, s.sent_id, t.index, HeadSource::gazetteer});
        break;
    }
    case HeadSource::heuristic: {
        const auto& p = recognizer.pattern();
        for (const auto& s : doc.sentences) {
            auto children = children_of(s);
            for (const auto& t : s.tokens) {
                if (!p.head_upos.count(t.upos) || is_modifier_relation(t.deprel)) continue;
                std::size_t mods = 0;
                for (int c : children[static_cast<std::size_t>(t.index)])
                    if (p.modifier_deprels.count(base_relation(s.at(c).deprel))) ++mods;
                if (mods >= p.min_modifiers) out.push_back({doc.doc_id, s.sent_id, t.index, HeadSource::heuristic});
            }
        }
        break;
    }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Expansion

namespace {

constexpr std::size_t kMaxVariants = 64;

class Expander {
public:
    explicit Expander(const Sentence& s) : s_(s), children_(children_of(s)) {}

    /// Transitive modifier dependents of t (excluding t).
    std::set<int> closure(int t) const {
        std::set<int> seen;
        std::vector<int> stack{t};
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            for (int c : children_[static_cast<std::size_t>(cur)])
                if (is_modifier_relation(s_.at(c).deprel) && c != t && seen.insert(c).second) stack.push_back(c);
        }
        return seen;
    }

    /// Conjuncts chained to t, in surface order.
    std::vector<int> conjuncts(int t) const {
        std::set<int> seen;
        std::vector<int> stack{t};
        while (!stack.empty()) {
            int cur = stack.back();
            stack.pop_back();
            for (int c : children_[static_cast<std::size_t>(cur)])
                if (base_relation(s_.at(c).deprel) == "conj" && c != t && seen.insert(c).second) stack.push_back(c);
        }
        return {seen.begin(), seen.end()};
    }

    /// Token sets for head h, one per combination of coordinated modifiers.
    std::vector<std::set<int>> variants(int h) const {
        const auto mods = closure(h);
        std::vector<std::vector<int>> groups;
        std::set<int> grouped; // roots of groups plus their modifier subtrees
        for (int m : mods) {
            if (grouped.count(m)) continue;
            auto conj = conjuncts(m);
            if (conj.empty()) continue;
            std::vector<int> group{m};
            group.insert(group.end(), conj.begin(), conj.end());
            groups.push_back(std::move(group));
            grouped.insert(m);
            auto sub = closure(m);
            grouped.insert(sub.begin(), sub.end());
        }
        std::set<int> base{h};
        for (int m : mods)
            if (!grouped.count(m)) base.insert(m);

        std::vector<std::set<int>> out{base};
        for (const auto& group : groups) {
            std::vector<std::set<int>> next;
            for (const auto& partial : out) {
                for (int member : group) {
                    if (next.size() >= kMaxVariants) break;
                    auto v = partial;
                    v.insert(member);
                    auto sub = closure(member);
                    v.insert(sub.begin(), sub.end());
                    next.push_back(std::move(v));
                }
            }
            out = std::move(next);
        }
        return out;
    }

    void require_acyclic(int t) const {
        int cur = t;
        for (int steps = 0; steps <= s_.size(); ++steps) {
            if (cur == 0) return;
            cur = s_.at(cur).head;
        }
        throw DataError("cyclic dependency structure in sentence " + s_.sent_id);
    }

    bool parenthesized(const std::set<int>& span) const {
        const int lo = *span.begin(), hi = *span.rbegin();
        return s_.contains(lo - 1) && s_.contains(hi + 1) && s_.at(lo - 1).surface == "(" &&
               s_.at(hi + 1).surface == ")";
    }

    const std::vector<int>& children(int t) const { return children_[static_cast<std::size_t>(t)]; }

private:
    const Sentence& s_;
    std::vector<std::vector<int>> children_;
};

bool all_caps(const std::string& s) {
    int upper = 0;
    for (char c : s) {
        if (text::is_lower(c)) return false;
        if (text::is_upper(c)) ++upper;
    }
    return upper >= 2;
}

} // namespace

std::vector<TermMention> expand_term(const HeadCandidate& head, const Sentence& sentence) {
    if (!sentence.contains(head.token_index))
        throw DataError("head candidate references nonexistent token " + head.doc_id + "/" + head.sent_id + "/" +
                        std::to_string(head.token_index));
    Expander ex(sentence);
    ex.require_acyclic(head.token_index);

    std::vector<TermMention> out;
    std::set<std::pair<int, std::vector<int>>> seen;
    auto emit = [&](int h, const std::set<int>& tokens) {
        std::vector<int> idx(tokens.begin(), tokens.end());
        if (!seen.insert({h, idx}).second) return;
        TermMention m;
        m.doc_id = head.doc_id;
        m.sent_id = head.sent_id;
        m.head_index = h;
        m.token_indices = std::move(idx);
        out.push_back(std::move(m));
    };

    const int h = head.token_index;
    const auto main = ex.variants(h);
    for (const auto& v : main) emit(h, v);

    for (int c : ex.conjuncts(h)) {
        ex.require_acyclic(c);
        if (ex.closure(c).empty()) {
            for (auto v : main) {
                v.erase(h);
                v.insert(c);
                emit(c, v);
            }
        } else {
            for (const auto& v : ex.variants(c)) emit(c, v);
        }
    }

    // Abbreviation appositives of the primary mention.
    const std::set<int>& primary = main.front();
    for (int t : primary) {
        for (int a : ex.children(t)) {
            if (base_relation(sentence.at(a).deprel) != "appos") continue;
            auto span = ex.closure(a);
            span.insert(a);
            if (!ex.parenthesized(span) && !all_caps(sentence.at(a).surface)) continue;
            TermMention m;
            m.doc_id = head.doc_id;
            m.sent_id = head.sent_id;
            m.head_index = a;
            m.token_indices.assign(span.begin(), span.end());
            m.alias_for = 0;
            out.push_back(std::move(m));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Normalization

std::string lemma_of(const Token& token) {
    if (!token.lemma.empty()) return text::to_lower(token.lemma);
    auto s = text::to_lower(token.surface);
    if (s.size() > 3 && s.back() == 's' && s[s.size() - 2] != 's') s.pop_back();
    return s;
}

NormalizeResult normalize_term(const TermMention& mention, const Sentence& sentence, const Lexicons& lexicons) {
    std::map<int, std::string> words;
    for (int i : mention.token_indices) words[i] = lemma_of(sentence.at(i));

    if (sentence.contains(mention.head_index)) {
        auto rule = lexicons.head_suffix_rules.find(lemma_of(sentence.at(mention.head_index)));
        if (rule != lexicons.head_suffix_rules.end()) {
            const auto& suffix = rule->second;
            bool match = true;
            for (std::size_t k = 0; k < suffix.size() && match; ++k) {
                const int i = mention.head_index + 1 + static_cast<int>(k);
                match = sentence.contains(i) && (text::to_lower(sentence.at(i).surface) == suffix[k] ||
                                                 lemma_of(sentence.at(i)) == suffix[k]);
            }
            if (match)
                for (std::size_t k = 0; k < suffix.size(); ++k)
                    words[mention.head_index + 1 + static_cast<int>(k)] = suffix[k];
        }
    }

    std::vector<std::string> parts;
    for (auto& [i, w] : words) parts.push_back(std::move(w));
    std::size_t first = 0;
    while (first < parts.size() && lexicons.leading_words.count(parts[first])) ++first;
    parts.erase(parts.begin(), parts.begin() + static_cast<std::ptrdiff_t>(first));

    NormalizeResult r;
    r.term = text::join(text::split_ws(text::join(parts, " ")), " ");
    if (r.term.empty())
        r.rejected = Rejection::empty;
    else if (lexicons.blacklist.count(r.term))
        r.rejected = Rejection::blacklisted;
    return r;
}

// ---------------------------------------------------------------------------
// Documents

std::set<std::string> DocumentTerms::terms() const {
    std::set<std::string> all;
    for (const auto& s : sentences) all.insert(s.begin(), s.end());
    return all;
}

void ExtractionStats::merge(const ExtractionStats& o) {
    documents += o.documents;
    sentences += o.sentences;
    head_candidates += o.head_candidates;
    mentions += o.mentions;
    alias_mentions += o.alias_mentions;
    accepted += o.accepted;
    for (const auto& [k, v] : o.rejections) rejections[k] += v;
}

DocumentTerms extract_document(const ParsedDocument& doc, const Recognizer& recognizer, const Lexicons& lexicons,
                               ExtractionStats* stats) {
    ExtractionStats local;
    local.documents = 1;
    local.sentences = doc.sentences.size();

    DocumentTerms out;
    out.doc_id = doc.doc_id;
    out.sentences.resize(doc.sentences.size());

    const auto candidates = detect_heads(doc, recognizer, lexicons);
    local.head_candidates = candidates.size();

    std::map<std::string, std::size_t> sentence_pos;
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) sentence_pos.emplace(doc.sentences[i].sent_id, i);

    std::map<std::string, std::string> aliases; // abbreviation -> expansion
    for (const auto& cand : candidates) {
        const std::size_t si = sentence_pos.at(cand.sent_id);
        const Sentence& sentence = doc.sentences[si];
        auto mentions = expand_term(cand, sentence);
        for (auto& m : mentions) {
            if (m.alias_for) {
                ++local.alias_mentions;
                continue;
            }
            ++local.mentions;
            auto r = normalize_term(m, sentence, lexicons);
            if (!r) {
                ++local.rejections[to_string(*r.rejected)];
                continue;
            }
            ++local.accepted;
            m.normalized = r.term;
            out.sentences[si].insert(r.term);
        }
        for (auto& m : mentions) {
            if (!m.alias_for) continue;
            const auto& target = mentions[*m.alias_for];
            if (target.normalized.empty()) continue;
            m.alias_of = target.normalized;
            auto r = normalize_term(m, sentence, lexicons);
            if (!r.term.empty() && r.term != target.normalized) aliases.emplace(r.term, target.normalized);
        }
    }

    if (!aliases.empty()) {
        for (auto& s : out.sentences) {
            std::set<std::string> resolved;
            for (const auto& t : s) {
                auto it = aliases.find(t);
                resolved.insert(it == aliases.end() ? t : it->second);
            }
            s = std::move(resolved);
        }
    }
    out.aliases = std::move(aliases);
    if (stats) stats->merge(local);
    return out;
}

ExtractionResult extract_corpus(const std::vector<ParsedDocument>& parsed, const corpus::DocumentSet& corpus,
                                const Recognizer& recognizer, const Lexicons& lexicons, unsigned threads) {
    ExtractionResult result;
    std::unordered_map<std::string, const ParsedDocument*> by_id;
    for (const auto& p : parsed) by_id.emplace(p.doc_id, &p);

    std::unordered_map<std::string, bool> in_corpus;
    std::vector<std::pair<const ParsedDocument*, int>> work; // parse, year
    for (const auto& doc : corpus.documents) {
        in_corpus.emplace(doc.id, true);
        if (!doc.extractable) {
            ++result.skipped_non_extractable;
            continue;
        }
        auto it = by_id.find(doc.id);
        if (it == by_id.end()) {
            ++result.missing_parse;
            continue;
        }
        work.emplace_back(it->second, doc.year);
    }
    for (const auto& p : parsed)
        if (!in_corpus.count(p.doc_id))
            result.diagnostics.warn("parsed document \"" + p.doc_id + "\" has no corpus record; skipped");
    if (result.missing_parse > 0)
        result.diagnostics.warn(std::to_string(result.missing_parse) +
                                " extractable corpus documents have no parse; skipped");

    result.documents.resize(work.size());
    std::vector<ExtractionStats> stats(work.size());
    parallel_for(work.size(), threads, [&](std::size_t i) {
        result.documents[i] = extract_document(*work[i].first, recognizer, lexicons, &stats[i]);
        result.documents[i].year = work[i].second;
    });
    for (const auto& s : stats) result.stats.merge(s);
    return result;
}

void write_terms_jsonl(std::ostream& out, const std::vector<DocumentTerms>& docs) {
    for (const auto& d : docs) {
        ordered_json j;
        j["doc_id"] = d.doc_id;
        j["year"] = d.year;
        j["sentences"] = json::array();
        for (const auto& s : d.sentences) j["sentences"].push_back(std::vector<std::string>(s.begin(), s.end()));
        j["aliases"] = ordered_json::object();
        for (const auto& [k, v] : d.aliases) j["aliases"][k] = v;
        out << j.dump() << '\n';
    }
}

std::vector<DocumentTerms> read_terms_jsonl(std::istream& in, const std::string& source) {
    std::vector<DocumentTerms> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        try {
            auto j = json::parse(line);
            DocumentTerms d;
            d.doc_id = j.at("doc_id").get<std::string>();
            d.year = j.at("year").get<int>();
            for (const auto& s : j.at("sentences")) {
                std::set<std::string> terms;
                for (const auto& t : s) terms.insert(t.get<std::string>());
                d.sentences.push_back(std::move(terms));
            }
            if (auto a = j.find("aliases"); a != j.end())
                d.aliases = a->get<std::map<std::string, std::string>>();
            out.push_back(std::move(d));
        } catch (const json::exception& e) {
            throw DataError(std::string("malformed term record: ") + e.what(), source, lineno);
        }
    }
    return out;
}

void write_extraction_report(std::ostream& out, const ExtractionResult& result) {
    ordered_json j;
    const auto& s = result.stats;
    j["documents"] = s.documents;
    j["sentences"] = s.sentences;
    j["head_candidates"] = s.head_candidates;
    j["mentions"] = s.mentions;
    j["alias_mentions"] = s.alias_mentions;
    j["accepted"] = s.accepted;
    ordered_json rej = ordered_json::object();
    for (const auto& [k, v] : s.rejections) rej[k] = v;
    j["rejections"] = rej;
    j["skipped_non_extractable"] = result.skipped_non_extractable;
    j["missing_parse"] = result.missing_parse;
    j["warnings"] = result.diagnostics.warnings;
    ordered_json per_doc = ordered_json::array();
    for (const auto& d : result.documents) {
        ordered_json e;
        e["doc_id"] = d.doc_id;
        e["terms"] = d.terms().size();
        per_doc.push_back(e);
    }
    j["per_document"] = per_doc;
    out << j.dump(2) << '\n';
}

} // namespace techmap::extract
