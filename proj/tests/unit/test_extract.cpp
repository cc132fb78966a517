#include "techmap/corpus.hpp"
#include "techmap/extract.hpp"

#include "techmap/text.hpp"
#include "temp_dir.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

using namespace techmap;
using namespace techmap::extract;

namespace {

struct T {
    const char* form;
    const char* lemma;
    const char* upos;
    int head;
    const char* rel;
};

Sentence sentence(std::initializer_list<T> toks, std::string id = "1") {
    Sentence s;
    s.sent_id = std::move(id);
    int i = 0;
    for (const auto& t : toks) s.tokens.push_back({++i, t.form, t.lemma, t.upos, t.head, t.rel});
    return s;
}

ParsedDocument document(std::string id, std::vector<Sentence> sentences) {
    ParsedDocument d;
    d.doc_id = std::move(id);
    d.sentences = std::move(sentences);
    return d;
}

// "We study flexible and reconfigurable manufacturing systems."
Sentence fms() {
    return sentence({{"We", "we", "PRON", 2, "nsubj"},
                     {"study", "study", "VERB", 0, "ROOT"},
                     {"flexible", "flexible", "ADJ", 7, "amod"},
                     {"and", "and", "CCONJ", 3, "cc"},
                     {"reconfigurable", "reconfigurable", "ADJ", 3, "conj"},
                     {"manufacturing", "manufacturing", "NOUN", 7, "compound"},
                     {"systems", "system", "NOUN", 2, "dobj"},
                     {".", ".", "PUNCT", 2, "punct"}});
}

// "The Internet of Things (IoT) connects machines."
Sentence iot() {
    return sentence({{"The", "the", "DET", 2, "det"},
                     {"Internet", "Internet", "PROPN", 8, "nsubj"},
                     {"of", "of", "ADP", 2, "prep"},
                     {"Things", "Things", "PROPN", 3, "pobj"},
                     {"(", "(", "PUNCT", 6, "punct"},
                     {"IoT", "IoT", "PROPN", 2, "appos"},
                     {")", ")", "PUNCT", 6, "punct"},
                     {"connects", "connect", "VERB", 0, "ROOT"},
                     {"machines", "machine", "NOUN", 8, "dobj"},
                     {".", ".", "PUNCT", 8, "punct"}});
}

Lexicons lexicons() {
    auto lex = Lexicons::defaults();
    lex.blacklist_concepts(corpus::default_concept_terms());
    return lex;
}

std::vector<std::string> normalized(const std::vector<TermMention>& ms, const Sentence& s, const Lexicons& lex) {
    std::vector<std::string> out;
    for (const auto& m : ms)
        if (!m.alias_for) {
            auto r = normalize_term(m, s, lex);
            out.push_back(r ? r.term : "<" + to_string(*r.rejected) + ">");
        }
    return out;
}

std::vector<std::string> texts(const std::vector<TermMention>& ms, const Sentence& s) {
    std::vector<std::string> out;
    for (const auto& m : ms) {
        std::string t;
        for (int i : m.token_indices) t += (t.empty() ? "" : " ") + s.at(i).surface;
        out.push_back(t);
    }
    return out;
}

const char* one_sentence =
    "# newdoc id = d1\n# sent_id = 1\n"
    "1\tSensor\tsensor\tNOUN\t_\t_\t2\tcompound\t_\t_\n"
    "2\tnetworks\tnetwork\tNOUN\t_\t_\t3\tnsubj\t_\t_\n"
    "3\twork\twork\tVERB\t_\t_\t0\tROOT\t_\t_\n"
    "4\t.\t.\tPUNCT\t_\t_\t3\tpunct\t_\t_\n\n";

} // namespace

// ---------------------------------------------------------------------------
// parse_conllu

TEST(ParseConllu, OneDocOneSentence) {
    std::istringstream in(one_sentence);
    auto docs = parse_conllu(in);
    ASSERT_EQ(docs.size(), 1u);
    EXPECT_EQ(docs[0].doc_id, "d1");
    ASSERT_EQ(docs[0].sentences.size(), 1u);
    EXPECT_EQ(docs[0].sentences[0].size(), 4);
    EXPECT_EQ(docs[0].sentences[0].at(2).lemma, "network");
    EXPECT_EQ(docs[0].sentences[0].at(1).deprel, "compound");
}

TEST(ParseConllu, NineColumnsCitesLine) {
    std::istringstream in("# newdoc id = d1\n# sent_id = 1\n"
                          "1\tA\ta\tNOUN\t_\t_\t0\tROOT\t_\t_\n"
                          "2\tB\tb\tNOUN\t_\t_\t1\tcompound\t_\n\n");
    try {
        parse_conllu(in, "nine.conllu");
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_EQ(e.line(), 4u);
        EXPECT_EQ(e.source(), "nine.conllu");
    }
}

TEST(ParseConllu, MissingNewdocIsError) {
    std::istringstream in("# sent_id = 1\n1\tA\ta\tNOUN\t_\t_\t0\tROOT\t_\t_\n\n");
    EXPECT_THROW(parse_conllu(in), DataError);
}

TEST(ParseConllu, MultiwordRangesAndEmptyNodesSkipped) {
    std::istringstream in("# newdoc id = d1\n# sent_id = s9\n"
                          "1-2\tdella\t_\t_\t_\t_\t_\t_\t_\t_\n"
                          "1\tdi\tdi\tADP\t_\t_\t2\tcase\t_\t_\n"
                          "2\tla\til\tDET\t_\t_\t0\tROOT\t_\t_\n"
                          "2.1\tx\tx\tX\t_\t_\t_\t_\t_\t_\n\n");
    auto docs = parse_conllu(in);
    ASSERT_EQ(docs[0].sentences.size(), 1u);
    EXPECT_EQ(docs[0].sentences[0].sent_id, "s9");
    EXPECT_EQ(docs[0].sentences[0].size(), 2);
}

TEST(ParseConllu, StructuralErrors) {
    auto fails = [](const std::string& body) {
        std::istringstream in("# newdoc id = d1\n# sent_id = 1\n" + body + "\n");
        EXPECT_THROW(parse_conllu(in), DataError) << body;
    };
    fails("1\tA\ta\tNOUN\t_\t_\t0\tROOT\t_\t_\n2\tB\tb\tNOUN\t_\t_\t0\tROOT\t_\t_\n"); // two roots
    fails("1\tA\ta\tNOUN\t_\t_\t5\tnsubj\t_\t_\n2\tB\tb\tNOUN\t_\t_\t0\tROOT\t_\t_\n"); // head out of range
    fails("1\tA\ta\tNOUN\t_\t_\t1\tnsubj\t_\t_\n2\tB\tb\tNOUN\t_\t_\t0\tROOT\t_\t_\n"); // self head
    fails("1\tA\ta\tNOUN\t_\t_\t2\tnsubj\t_\t_\n3\tB\tb\tNOUN\t_\t_\t0\tROOT\t_\t_\n"); // gap
    fails("1\tA\ta\tNOUN\t_\t_\t0\t_\t_\t_\n");                                         // empty deprel
}

TEST(ParseConllu, SentIdDefaultsToPosition) {
    std::istringstream in("# newdoc id = d1\n1\tA\ta\tNOUN\t_\t_\t0\tROOT\t_\t_\n\n"
                          "1\tB\tb\tNOUN\t_\t_\t0\tROOT\t_\t_\n\n");
    auto docs = parse_conllu(in);
    ASSERT_EQ(docs[0].sentences.size(), 2u);
    EXPECT_EQ(docs[0].sentences[1].sent_id, "2");
}

TEST(ParseConllu, AppendixSentenceStructure) {
    std::ifstream in(testkit::fixture("corpus.conllu"));
    auto docs = parse_conllu(in, "corpus.conllu");
    ASSERT_GE(docs.size(), 1u);
    const auto& s = docs[0].sentences[0];
    // flexible -amod-> systems, reconfigurable -conj-> flexible, manufacturing -compound-> systems
    EXPECT_EQ(s.at(7).surface, "systems");
    EXPECT_EQ(s.at(3).head, 7);
    EXPECT_EQ(s.at(3).deprel, "amod");
    EXPECT_EQ(s.at(5).head, 3);
    EXPECT_EQ(s.at(5).deprel, "conj");
    EXPECT_EQ(s.at(6).head, 7);
    EXPECT_EQ(s.at(6).deprel, "compound");
}

TEST(ParseConllu, FixtureCorpusSize) {
    std::ifstream in(testkit::fixture("corpus.conllu"));
    auto docs = parse_conllu(in, "corpus.conllu");
    std::size_t sentences = 0;
    for (const auto& d : docs) sentences += d.sentences.size();
    EXPECT_EQ(docs.size(), 11u);
    EXPECT_GE(sentences, 30u);
}

TEST(ParseConllu, BaseRelation) {
    EXPECT_EQ(base_relation("nmod:poss"), "nmod");
    EXPECT_EQ(base_relation("AMOD"), "amod");
}

// ---------------------------------------------------------------------------
// lemma fallback and lexicons

TEST(Lemma, PluralFallbackWhenLemmaAbsent) {
    EXPECT_EQ(lemma_of(Token{1, "Printers", "", "NOUN", 0, "ROOT"}), "printer");
    EXPECT_EQ(lemma_of(Token{1, "glass", "", "NOUN", 0, "ROOT"}), "glass");
    EXPECT_EQ(lemma_of(Token{1, "bus", "", "NOUN", 0, "ROOT"}), "bus");
    EXPECT_EQ(lemma_of(Token{1, "Data", "datum", "NOUN", 0, "ROOT"}), "datum");
}

TEST(Lexicons, FilesAreLowercasedAndCommentsSkipped) {
    Lexicons lex;
    std::istringstream g("# heads\nSystem\n\n  Sensor  \n");
    lex.add_gazetteer(g);
    EXPECT_EQ(lex.gazetteer_heads, (std::set<std::string>{"sensor", "system"}));
    std::istringstream r("Internet\tOf Things\n");
    lex.add_suffix_rules(r, "rules");
    EXPECT_EQ(lex.head_suffix_rules.at("internet"), (std::vector<std::string>{"of", "things"}));
    std::istringstream bad("internet of things\n");
    EXPECT_THROW(lex.add_suffix_rules(bad, "rules"), DataError);
}

TEST(Lexicons, DefaultsAndConceptBlacklist) {
    auto lex = lexicons();
    for (const char* w : {"novel", "expensive", "first"}) EXPECT_TRUE(lex.leading_words.count(w)) << w;
    EXPECT_EQ(lex.head_suffix_rules.size(), 1u);
    EXPECT_TRUE(lex.blacklist.count("smart manufacturing"));
    EXPECT_TRUE(lex.blacklist.count("industry 4.0"));
    EXPECT_TRUE(lex.blacklist.count("cloud based manufacturing"));
    for (const auto& b : lex.blacklist) EXPECT_EQ(b, techmap::text::to_lower(b));
}

TEST(Annotations, IntegerOrStringSentIds) {
    std::istringstream in("{\"doc_id\":\"d1\",\"sent_id\":1,\"token_index\":2}\n\n"
                          "{\"doc_id\":\"d1\",\"sent_id\":\"s2\",\"token_index\":3}\n");
    auto a = read_annotations(in, "a.jsonl");
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a[0].sent_id, "1");
    EXPECT_EQ(a[1].sent_id, "s2");
    std::istringstream bad("{\"doc_id\":\"d1\",\"sent_id\":1,\"token_index\":2}\n{\"doc_id\":\"d1\"}\n");
    try {
        read_annotations(bad, "a.jsonl");
        FAIL();
    } catch (const DataError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

// ---------------------------------------------------------------------------
// detect_heads

TEST(DetectHeads, GazetteerFindsSystems) {
    Lexicons lex;
    lex.gazetteer_heads = {"system", "sensor"};
    auto heads = detect_heads(document("d", {fms()}), Recognizer::gazetteer(), lex);
    ASSERT_EQ(heads.size(), 1u);
    EXPECT_EQ(heads[0].token_index, 7);
    EXPECT_EQ(heads[0].source, HeadSource::gazetteer);
}

TEST(DetectHeads, GazetteerReturnsEveryMatchingNoun) {
    Lexicons lex;
    lex.gazetteer_heads = {"manufacturing", "system"};
    auto heads = detect_heads(document("d", {fms()}), Recognizer::gazetteer(), lex);
    ASSERT_EQ(heads.size(), 2u);
    EXPECT_EQ(heads[0].token_index, 6);
    EXPECT_EQ(heads[1].token_index, 7);
}

TEST(DetectHeads, AnnotationReturnsExactlyTheSpans) {
    auto rec = Recognizer::annotations({{"d", "1", 7}});
    auto heads = detect_heads(document("d", {fms()}), rec, Lexicons{});
    ASSERT_EQ(heads.size(), 1u);
    EXPECT_EQ(heads[0], (HeadCandidate{"d", "1", 7, HeadSource::annotation}));
    EXPECT_TRUE(detect_heads(document("other", {fms()}), rec, Lexicons{}).empty());
}

TEST(DetectHeads, NoGazetteerNounGivesEmpty) {
    Lexicons lex;
    lex.gazetteer_heads = {"robot"};
    EXPECT_TRUE(detect_heads(document("d", {fms()}), Recognizer::gazetteer(), lex).empty());
}

TEST(DetectHeads, AnnotationOutOfRangeIsError) {
    auto rec = Recognizer::annotations({{"d", "1", 42}});
    EXPECT_THROW(detect_heads(document("d", {fms()}), rec, Lexicons{}), DataError);
    auto missing_sentence = Recognizer::annotations({{"d", "9", 1}});
    EXPECT_THROW(detect_heads(document("d", {fms()}), missing_sentence, Lexicons{}), DataError);
}

TEST(DetectHeads, EmptyGazetteerIsError) {
    EXPECT_THROW(detect_heads(document("d", {fms()}), Recognizer::gazetteer(), Lexicons{}), ConfigError);
}

TEST(DetectHeads, HeuristicSkipsModifierNouns) {
    auto heads = detect_heads(document("d", {fms()}), Recognizer::heuristic(), Lexicons{});
    ASSERT_EQ(heads.size(), 1u);
    EXPECT_EQ(heads[0].token_index, 7);
    EXPECT_EQ(heads[0].source, HeadSource::heuristic);
}

// ---------------------------------------------------------------------------
// expand_term

TEST(ExpandTerm, CoordinatedModifiersSplit) {
    auto s = fms();
    auto ms = expand_term({"d", "1", 7, HeadSource::annotation}, s);
    EXPECT_EQ(texts(ms, s), (std::vector<std::string>{"flexible manufacturing systems",
                                                      "reconfigurable manufacturing systems"}));
    EXPECT_EQ(normalized(ms, s, lexicons()),
              (std::vector<std::string>{"flexible manufacturing system", "reconfigurable manufacturing system"}));
}

TEST(ExpandTerm, BareHead) {
    auto s = sentence({{"Blockchain", "blockchain", "NOUN", 2, "nsubj"}, {"works", "work", "VERB", 0, "ROOT"}});
    auto ms = expand_term({"d", "1", 1, HeadSource::annotation}, s);
    ASSERT_EQ(ms.size(), 1u);
    EXPECT_EQ(ms[0].token_indices, std::vector<int>{1});
}

TEST(ExpandTerm, AppositiveAbbreviationBecomesAlias) {
    auto s = iot();
    auto ms = expand_term({"d", "1", 2, HeadSource::annotation}, s);
    ASSERT_EQ(ms.size(), 2u);
    EXPECT_FALSE(ms[0].alias_for);
    ASSERT_TRUE(ms[1].alias_for);
    EXPECT_EQ(*ms[1].alias_for, 0u);
    EXPECT_EQ(texts(ms, s)[1], "IoT");
    EXPECT_EQ(normalize_term(ms[0], s, lexicons()).term, "internet of things");
}

TEST(ExpandTerm, AllCapsAppositiveWithoutParentheses) {
    auto s = sentence({{"Radio", "radio", "NOUN", 3, "compound"},
                       {"identification", "identification", "NOUN", 3, "compound"},
                       {"tags", "tag", "NOUN", 5, "nsubj"},
                       {"RFID", "RFID", "PROPN", 3, "appos"},
                       {"help", "help", "VERB", 0, "ROOT"}});
    auto ms = expand_term({"d", "1", 3, HeadSource::annotation}, s);
    ASSERT_EQ(ms.size(), 2u);
    EXPECT_TRUE(ms[1].alias_for);
    // A lowercase, unparenthesized appositive is not an abbreviation.
    auto plain = sentence({{"tags", "tag", "NOUN", 3, "nsubj"},
                           {"labels", "label", "NOUN", 1, "appos"},
                           {"help", "help", "VERB", 0, "ROOT"}});
    EXPECT_EQ(expand_term({"d", "1", 1, HeadSource::annotation}, plain).size(), 1u);
}

TEST(ExpandTerm, ConjoinedBareHeadsShareModifiers) {
    auto s = sentence({{"Smart", "smart", "ADJ", 2, "amod"},
                       {"sensors", "sensor", "NOUN", 5, "nsubj"},
                       {"and", "and", "CCONJ", 2, "cc"},
                       {"actuators", "actuator", "NOUN", 2, "conj"},
                       {"monitor", "monitor", "VERB", 0, "ROOT"}});
    auto ms = expand_term({"d", "1", 2, HeadSource::annotation}, s);
    EXPECT_EQ(normalized(ms, s, lexicons()), (std::vector<std::string>{"smart sensor", "smart actuator"}));
    EXPECT_EQ(ms[1].head_index, 4);
}

TEST(ExpandTerm, ConjoinedHeadWithOwnModifiers) {
    auto s = sentence({{"Digital", "digital", "ADJ", 2, "amod"},
                       {"twins", "twin", "NOUN", 6, "nsubj"},
                       {"and", "and", "CCONJ", 2, "cc"},
                       {"augmented", "augmented", "ADJ", 5, "amod"},
                       {"reality", "reality", "NOUN", 2, "conj"},
                       {"help", "help", "VERB", 0, "ROOT"}});
    auto ms = expand_term({"d", "1", 2, HeadSource::annotation}, s);
    EXPECT_EQ(normalized(ms, s, lexicons()), (std::vector<std::string>{"digital twin", "augmented reality"}));
}

TEST(ExpandTerm, TransitiveModifierChain) {
    // additive -amod-> manufacturing -compound-> system: depth two survives.
    auto s = sentence({{"additive", "additive", "ADJ", 2, "amod"},
                       {"manufacturing", "manufacturing", "NOUN", 3, "compound"},
                       {"systems", "system", "NOUN", 4, "nsubj"},
                       {"print", "print", "VERB", 0, "ROOT"},
                       {"today", "today", "NOUN", 4, "npadvmod"}});
    auto ms = expand_term({"d", "1", 3, HeadSource::annotation}, s);
    ASSERT_EQ(ms.size(), 1u);
    EXPECT_EQ(ms[0].token_indices, (std::vector<int>{1, 2, 3}));
}

TEST(ExpandTerm, NmodAndNpadvmodAreModifiers) {
    EXPECT_TRUE(is_modifier_relation("amod"));
    EXPECT_TRUE(is_modifier_relation("compound"));
    EXPECT_TRUE(is_modifier_relation("npadvmod"));
    EXPECT_TRUE(is_modifier_relation("nmod"));
    EXPECT_TRUE(is_modifier_relation("nmod:poss"));
    EXPECT_FALSE(is_modifier_relation("det"));
    EXPECT_FALSE(is_modifier_relation("prep"));
    EXPECT_FALSE(is_modifier_relation("conj"));
}

TEST(ExpandTerm, CycleIsDataError) {
    Sentence s;
    s.sent_id = "1";
    s.tokens = {{1, "a", "a", "NOUN", 2, "compound"}, {2, "b", "b", "NOUN", 1, "compound"},
                {3, "c", "c", "VERB", 0, "ROOT"}};
    EXPECT_THROW(expand_term({"d", "1", 1, HeadSource::annotation}, s), DataError);
    EXPECT_THROW(expand_term({"d", "1", 9, HeadSource::annotation}, s), DataError);
}

TEST(ExpandTerm, NestedHeadsProduceTwoMentions) {
    Lexicons lex;
    lex.gazetteer_heads = {"sensor", "network"};
    std::istringstream in(one_sentence);
    auto doc = parse_conllu(in)[0];
    auto terms = extract_document(doc, Recognizer::gazetteer(), lex);
    EXPECT_EQ(terms.sentences[0], (std::set<std::string>{"sensor", "sensor network"}));
}

// ---------------------------------------------------------------------------
// normalize_term

TEST(NormalizeTerm, NovelThreeDPrinter) {
    auto s = sentence({{"A", "a", "DET", 4, "det"},
                       {"novel", "novel", "ADJ", 4, "amod"},
                       {"3D", "3d", "PROPN", 4, "compound"},
                       {"printer", "printer", "NOUN", 5, "nsubj"},
                       {"works", "work", "VERB", 0, "ROOT"}});
    auto ms = expand_term({"d", "1", 4, HeadSource::annotation}, s);
    EXPECT_EQ(normalized(ms, s, lexicons()), std::vector<std::string>{"3d printer"});
}

TEST(NormalizeTerm, ThreeDPrintersLemmatized) {
    auto s = sentence({{"3D", "3D", "PROPN", 2, "compound"},
                       {"Printers", "printer", "NOUN", 3, "nsubj"},
                       {"work", "work", "VERB", 0, "ROOT"}});
    TermMention m{"d", "1", 2, {1, 2}, "", {}, {}};
    EXPECT_EQ(normalize_term(m, s, lexicons()).term, "3d printer");
    auto no_lemma = sentence({{"3D", "", "PROPN", 2, "compound"},
                              {"Printers", "", "NOUN", 3, "nsubj"},
                              {"work", "", "VERB", 0, "ROOT"}});
    EXPECT_EQ(normalize_term(m, no_lemma, lexicons()).term, "3d printer");
}

TEST(NormalizeTerm, BlacklistedConceptRejected) {
    auto s = sentence({{"Smart", "smart", "ADJ", 2, "amod"},
                       {"Manufacturing", "manufacturing", "NOUN", 3, "nsubj"},
                       {"grows", "grow", "VERB", 0, "ROOT"}});
    TermMention m{"d", "1", 2, {1, 2}, "", {}, {}};
    auto r = normalize_term(m, s, lexicons());
    EXPECT_FALSE(r);
    EXPECT_EQ(r.rejected, Rejection::blacklisted);
}

TEST(NormalizeTerm, LeadingWordsStrippedFromFrontOnly) {
    auto s = sentence({{"first", "first", "ADJ", 4, "amod"},
                       {"novel", "novel", "ADJ", 4, "amod"},
                       {"new", "new", "ADJ", 4, "amod"},
                       {"robot", "robot", "NOUN", 5, "nsubj"},
                       {"runs", "run", "VERB", 0, "ROOT"}});
    TermMention m{"d", "1", 4, {1, 2, 3, 4}, "", {}, {}};
    EXPECT_EQ(normalize_term(m, s, lexicons()).term, "robot");
    auto mid = sentence({{"mobile", "mobile", "ADJ", 3, "amod"},
                         {"novel", "novel", "ADJ", 3, "amod"},
                         {"robot", "robot", "NOUN", 4, "nsubj"},
                         {"runs", "run", "VERB", 0, "ROOT"}});
    TermMention m2{"d", "1", 3, {1, 2, 3}, "", {}, {}};
    EXPECT_EQ(normalize_term(m2, mid, lexicons()).term, "mobile novel robot");
}

TEST(NormalizeTerm, OnlyLeadingWordsIsEmpty) {
    auto s = sentence({{"Novel", "novel", "NOUN", 2, "nsubj"}, {"x", "x", "VERB", 0, "ROOT"}});
    TermMention m{"d", "1", 1, {1}, "", {}, {}};
    auto r = normalize_term(m, s, lexicons());
    EXPECT_EQ(r.rejected, Rejection::empty);
}

TEST(NormalizeTerm, SuffixRuleNeedsFollowingTokens) {
    auto alone = sentence({{"Internet", "internet", "PROPN", 2, "nsubj"}, {"grows", "grow", "VERB", 0, "ROOT"}});
    TermMention m{"d", "1", 1, {1}, "", {}, {}};
    EXPECT_EQ(normalize_term(m, alone, lexicons()).term, "internet");
    auto s = iot();
    TermMention full{"d", "1", 2, {2}, "", {}, {}};
    EXPECT_EQ(normalize_term(full, s, lexicons()).term, "internet of things");
    EXPECT_EQ(normalize_term(full, s, Lexicons{}).term, "internet");
}

// ---------------------------------------------------------------------------
// extract_document

TEST(ExtractDocument, RepeatedTermCollapses) {
    auto s = sentence({{"3D", "3d", "PROPN", 2, "compound"},
                       {"printers", "printer", "NOUN", 3, "nsubj"},
                       {"beat", "beat", "VERB", 0, "ROOT"},
                       {"3D", "3d", "PROPN", 5, "compound"},
                       {"printers", "printer", "NOUN", 3, "dobj"}});
    auto rec = Recognizer::annotations({{"d", "1", 2}, {"d", "1", 5}});
    auto terms = extract_document(document("d", {s}), rec, lexicons());
    EXPECT_EQ(terms.sentences[0], std::set<std::string>{"3d printer"});
}

TEST(ExtractDocument, TwoSentencesDisjointSets) {
    auto s1 = sentence({{"Wireless", "wireless", "ADJ", 3, "amod"},
                        {"sensor", "sensor", "NOUN", 3, "compound"},
                        {"networks", "network", "NOUN", 4, "nsubj"},
                        {"grow", "grow", "VERB", 0, "ROOT"}},
                       "1");
    auto s2 = sentence({{"Cloud", "cloud", "NOUN", 2, "compound"},
                        {"computing", "computing", "NOUN", 3, "nsubj"},
                        {"scales", "scale", "VERB", 0, "ROOT"}},
                       "2");
    Lexicons lex = lexicons();
    lex.gazetteer_heads = {"network", "computing"};
    auto terms = extract_document(document("d", {s1, s2}), Recognizer::gazetteer(), lex);
    EXPECT_EQ(terms.terms(), (std::set<std::string>{"cloud computing", "wireless sensor network"}));
    EXPECT_EQ(terms.sentences[0], std::set<std::string>{"wireless sensor network"});
    EXPECT_EQ(terms.sentences[1], std::set<std::string>{"cloud computing"});
}

TEST(ExtractDocument, AllBlacklistedGivesEmpty) {
    auto s = sentence({{"Smart", "smart", "ADJ", 2, "amod"},
                       {"manufacturing", "manufacturing", "NOUN", 3, "nsubj"},
                       {"grows", "grow", "VERB", 0, "ROOT"}});
    ExtractionStats stats;
    auto terms = extract_document(document("d", {s}), Recognizer::annotations({{"d", "1", 2}}), lexicons(), &stats);
    EXPECT_TRUE(terms.terms().empty());
    EXPECT_EQ(stats.rejections.at("blacklisted"), 1u);
    EXPECT_EQ(stats.accepted, 0u);
}

TEST(ExtractDocument, AliasResolvesToExpansion) {
    // "IoT" is a separate mention in the second sentence and maps to the expansion.
    auto s2 = sentence({{"IoT", "IoT", "PROPN", 2, "nsubj"}, {"grows", "grow", "VERB", 0, "ROOT"}}, "2");
    auto rec = Recognizer::annotations({{"d", "1", 2}, {"d", "2", 1}});
    ExtractionStats stats;
    auto terms = extract_document(document("d", {iot(), s2}), rec, lexicons(), &stats);
    EXPECT_EQ(terms.sentences[0], std::set<std::string>{"internet of things"});
    EXPECT_EQ(terms.sentences[1], std::set<std::string>{"internet of things"});
    EXPECT_EQ(terms.aliases.at("iot"), "internet of things");
    EXPECT_EQ(stats.alias_mentions, 1u);
}

// ---------------------------------------------------------------------------
// Corpus level

namespace {

struct Fixture {
    std::vector<ParsedDocument> parsed;
    corpus::DocumentSet corpus;
    Recognizer recognizer = Recognizer::gazetteer();
    Lexicons lex;
};

Fixture load_fixture() {
    Fixture f;
    std::ifstream conllu(testkit::fixture("corpus.conllu"));
    f.parsed = parse_conllu(conllu, "corpus.conllu");
    f.corpus = corpus::load_corpus(testkit::fixture("corpus.jsonl"), corpus::Format::jsonl);
    f.corpus = corpus::filter_years(corpus::deduplicate(f.corpus), {});
    std::ifstream ann(testkit::fixture("annotations.jsonl"));
    f.recognizer = Recognizer::annotations(read_annotations(ann, "annotations.jsonl"));
    f.lex = Lexicons::defaults();
    f.lex.blacklist_concepts(corpus::default_concept_terms());
    std::ifstream bl(testkit::data_file("blacklist.txt"));
    f.lex.add_blacklist(bl);
    return f;
}

} // namespace

TEST(ExtractCorpus, GoldenOutputByteIdentical) {
    auto f = load_fixture();
    auto result = extract_corpus(f.parsed, f.corpus, f.recognizer, f.lex, 1);
    std::ostringstream out;
    write_terms_jsonl(out, result.documents);
    EXPECT_EQ(out.str(), testkit::read_file(testkit::fixture("golden_terms.jsonl")));
    EXPECT_EQ(result.skipped_non_extractable, 1u);
    EXPECT_EQ(result.missing_parse, 0u);
}

TEST(ExtractCorpus, ThreadCountDoesNotChangeOutput) {
    auto f = load_fixture();
    auto one = extract_corpus(f.parsed, f.corpus, f.recognizer, f.lex, 1);
    for (unsigned t : {2u, 3u, 8u}) {
        auto many = extract_corpus(f.parsed, f.corpus, f.recognizer, f.lex, t);
        EXPECT_EQ(many.documents, one.documents) << t;
        EXPECT_EQ(many.stats.accepted, one.stats.accepted);
    }
}

TEST(ExtractCorpus, OutputInvariants) {
    auto f = load_fixture();
    Lexicons gaz = f.lex;
    std::ifstream g(testkit::data_file("gazetteer.txt"));
    gaz.add_gazetteer(g);
    for (const auto* lex : {&f.lex, &gaz}) {
        const auto rec = lex == &gaz ? Recognizer::gazetteer() : f.recognizer;
        for (const auto& doc : f.parsed) {
            for (const auto& cand : detect_heads(doc, rec, *lex)) {
                const auto* s = doc.find_sentence(cand.sent_id);
                for (const auto& m : expand_term(cand, *s)) {
                    ASSERT_FALSE(m.token_indices.empty());
                    for (std::size_t i = 1; i < m.token_indices.size(); ++i)
                        EXPECT_LT(m.token_indices[i - 1], m.token_indices[i]);
                    for (int i : m.token_indices) EXPECT_TRUE(s->contains(i));
                    // the mention keeps its own head token
                    EXPECT_NE(std::find(m.token_indices.begin(), m.token_indices.end(), m.head_index),
                              m.token_indices.end());
                    auto r = normalize_term(m, *s, *lex);
                    if (!r) continue;
                    EXPECT_EQ(r.term, techmap::text::to_lower(r.term));
                    EXPECT_EQ(r.term.find("  "), std::string::npos);
                    EXPECT_FALSE(lex->blacklist.count(r.term));
                    EXPECT_FALSE(lex->leading_words.count(r.term.substr(0, r.term.find(' '))));
                }
            }
        }
    }
}

TEST(ExtractCorpus, ParseWithoutCorpusRecordWarns) {
    auto f = load_fixture();
    f.parsed.push_back(document("ghost", {fms()}));
    auto result = extract_corpus(f.parsed, f.corpus, f.recognizer, f.lex, 1);
    ASSERT_FALSE(result.diagnostics.empty());
    EXPECT_NE(result.diagnostics.warnings[0].find("ghost"), std::string::npos);
}

TEST(TermsJsonl, RoundTrip) {
    auto f = load_fixture();
    auto result = extract_corpus(f.parsed, f.corpus, f.recognizer, f.lex, 1);
    std::ostringstream out;
    write_terms_jsonl(out, result.documents);
    std::istringstream in(out.str());
    EXPECT_EQ(read_terms_jsonl(in, "terms"), result.documents);
    std::istringstream bad("{\"doc_id\":\"a\"}\n");
    EXPECT_THROW(read_terms_jsonl(bad, "terms"), DataError);
}

TEST(ExtractionReport, CountsRejectionsByReason) {
    auto f = load_fixture();
    auto result = extract_corpus(f.parsed, f.corpus, f.recognizer, f.lex, 1);
    // smart manufacturing (d03) and digital manufacturing (d09)
    EXPECT_EQ(result.stats.rejections.at("blacklisted"), 2u);
    EXPECT_EQ(result.stats.alias_mentions, 3u);
    std::ostringstream out;
    write_extraction_report(out, result);
    EXPECT_NE(out.str().find("\"blacklisted\": 2"), std::string::npos);
}
