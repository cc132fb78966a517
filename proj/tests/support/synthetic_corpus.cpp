#include "synthetic_corpus.hpp"

#include <json.hpp>

#include <fstream>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace techmap::testkit {

namespace {

const std::vector<std::string> heads{
    "system",  "network",   "sensor",    "robot",    "platform", "device",   "twin",      "printer",
    "vehicle", "algorithm", "controller", "interface", "analytics", "computing", "learning", "reality",
    "blockchain", "model",  "architecture", "framework", "service", "protocol", "camera", "actuator",
    "machine", "database",  "software",  "application", "cloud",  "gateway", "scanner",   "drone",
    "exoskeleton", "tag",   "reader",    "engine",   "simulator", "optimizer", "classifier", "detector"};
const std::vector<std::string> nouns{
    "sensor",  "data",     "edge",      "fog",       "cloud",    "vision",   "laser",     "supply",
    "energy",  "quality",  "maintenance", "process", "production", "logistics", "safety", "signal",
    "image",   "voice",    "gesture",   "motion",    "traffic",  "power",    "battery",   "thermal",
    "pressure", "vibration", "acoustic", "radio",    "satellite", "mobile",   "web",       "service",
    "agent",   "knowledge", "ontology",  "decision", "scheduling", "planning", "inventory", "warehouse",
    "assembly", "welding", "machining", "inspection", "calibration", "simulation", "control", "feedback",
    "security", "privacy", "identity",  "payment",   "contract", "ledger",   "token",     "crypto",
    "neural",  "deep",     "swarm",     "fleet"};
const std::vector<std::string> adjectives{
    "wireless", "digital",    "smart",     "autonomous", "collaborative", "industrial", "cyber",
    "virtual",  "augmented",  "predictive", "adaptive",  "distributed",   "embedded",   "mobile",
    "intelligent", "connected", "modular",  "flexible",  "reconfigurable", "additive",  "robotic",
    "automated", "remote",     "real",      "hybrid",    "cognitive",     "secure",     "scalable",
    "open",     "lightweight", "low",       "high",      "optical",       "electric",   "hydraulic",
    "pneumatic", "quantum",    "semantic",  "generative", "federated"};

struct Term {
    int adjective = -1; // index or -1
    int noun = -1;
    int head = 0;
};

} // namespace

SyntheticCorpus write_synthetic_corpus(const std::filesystem::path& dir, const SyntheticCorpusSpec& spec) {
    std::filesystem::create_directories(dir);
    std::mt19937_64 rng(spec.seed);

    std::vector<Term> vocab;
    std::set<std::tuple<int, int, int>> seen;
    std::uniform_int_distribution<int> hd(0, static_cast<int>(heads.size()) - 1);
    std::uniform_int_distribution<int> nd(-1, static_cast<int>(nouns.size()) - 1);
    std::uniform_int_distribution<int> ad(-1, static_cast<int>(adjectives.size()) - 1);
    while (vocab.size() < spec.vocabulary) {
        Term t{ad(rng), nd(rng), hd(rng)};
        if (t.adjective < 0 && t.noun < 0) continue;
        if (t.noun >= 0 && nouns[static_cast<std::size_t>(t.noun)] == heads[static_cast<std::size_t>(t.head)]) continue;
        if (seen.insert({t.adjective, t.noun, t.head}).second) vocab.push_back(t);
    }
    std::vector<double> weights;
    for (std::size_t r = 0; r < vocab.size(); ++r) weights.push_back(1.0 / (static_cast<double>(r) + 10.0));
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());

    SyntheticCorpus out;
    out.corpus = dir / "corpus.jsonl";
    out.conllu = dir / "corpus.conllu";
    out.gazetteer = dir / "gazetteer.txt";
    std::ofstream corpus(out.corpus), conllu(out.conllu), gaz(out.gazetteer);
    if (!corpus || !conllu || !gaz) throw std::runtime_error("cannot write synthetic corpus");
    for (const auto& h : heads) gaz << h << '\n';

    static const std::vector<std::string> verbs{"supports", "improves", "enables", "replaces", "extends"};
    std::uniform_int_distribution<int> nsent(1, 6), nterms(1, 3), year(spec.first_year, spec.last_year);
    std::uniform_int_distribution<std::size_t> verb(0, verbs.size() - 1);
    std::bernoulli_distribution plural(0.4);
    std::set<std::size_t> used;

    struct Tok {
        std::string form, lemma, upos;
        int head;
        std::string rel;
    };

    for (std::size_t d = 0; d < spec.documents; ++d) {
        const std::string id = "s" + std::to_string(d);
        conllu << "# newdoc id = " << id << '\n';
        std::string abstract;
        const int sentences = nsent(rng);
        for (int s = 1; s <= sentences; ++s) {
            ++out.sentences;
            std::vector<Tok> toks;
            // Appends one phrase; returns the index of its head token.
            auto phrase = [&](std::size_t term) {
                used.insert(term);
                const auto& t = vocab[term];
                const int base = static_cast<int>(toks.size());
                int head_index = base + 1 + (t.adjective >= 0) + (t.noun >= 0);
                if (t.adjective >= 0)
                    toks.push_back({adjectives[static_cast<std::size_t>(t.adjective)],
                                    adjectives[static_cast<std::size_t>(t.adjective)], "ADJ", head_index, "amod"});
                if (t.noun >= 0)
                    toks.push_back({nouns[static_cast<std::size_t>(t.noun)], nouns[static_cast<std::size_t>(t.noun)],
                                    "NOUN", head_index, "compound"});
                const auto& h = heads[static_cast<std::size_t>(t.head)];
                toks.push_back({plural(rng) ? h + "s" : h, h, "NOUN", 0, ""});
                return head_index;
            };
            const int k = nterms(rng);
            const int h1 = phrase(pick(rng));
            toks.push_back({verbs[verb(rng)], "verb", "VERB", 0, "ROOT"});
            const int root = static_cast<int>(toks.size());
            toks[static_cast<std::size_t>(h1 - 1)].head = root;
            toks[static_cast<std::size_t>(h1 - 1)].rel = "nsubj";
            if (k >= 2) {
                const int h2 = phrase(pick(rng));
                toks[static_cast<std::size_t>(h2 - 1)].head = root;
                toks[static_cast<std::size_t>(h2 - 1)].rel = "dobj";
            }
            if (k >= 3) {
                toks.push_back({"with", "with", "ADP", root, "prep"});
                const int prep = static_cast<int>(toks.size());
                const int h3 = phrase(pick(rng));
                toks[static_cast<std::size_t>(h3 - 1)].head = prep;
                toks[static_cast<std::size_t>(h3 - 1)].rel = "pobj";
            }
            toks.push_back({".", ".", "PUNCT", root, "punct"});

            conllu << "# sent_id = " << s << '\n';
            std::string text;
            for (std::size_t i = 0; i < toks.size(); ++i) {
                const auto& t = toks[i];
                conllu << i + 1 << '\t' << t.form << '\t' << t.lemma << '\t' << t.upos << "\t_\t_\t" << t.head << '\t'
                       << t.rel << "\t_\t_\n";
                if (t.form != "." && !text.empty()) text += ' ';
                text += t.form;
            }
            conllu << '\n';
            if (!abstract.empty()) abstract += ' ';
            abstract += text;
        }
        nlohmann::json rec{{"id", id},
                           {"title", "Synthetic study " + std::to_string(d)},
                           {"abstract", abstract},
                           {"year", year(rng)},
                           {"author_keywords", nlohmann::json::array()},
                           {"first_author_country", nullptr},
                           {"retracted", false}};
        corpus << rec.dump() << '\n';
    }
    out.distinct_terms = used.size();
    return out;
}

} // namespace techmap::testkit
