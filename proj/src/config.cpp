#include "techmap/config.hpp"

#include "techmap/error.hpp"
#include "techmap/hash.hpp"
#include "techmap/text.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace techmap::config {

const std::vector<KeySpec>& known_keys() {
    static const std::vector<KeySpec> keys{
        {"corpus", "paths", "", "corpus file (JSONL or CSV)"},
        {"corpus_format", "paths", "jsonl", "jsonl or csv"},
        {"conllu", "paths", "", "dependency parses of the abstracts (CoNLL-U)"},
        {"annotations", "paths", "", "head annotations (JSONL), for recognizer = annotation"},
        {"concept_terms", "paths", "", "concept-term table; empty uses the built-in list"},
        {"gazetteer", "paths", "", "head-noun gazetteer"},
        {"blacklist", "paths", "", "blacklisted terms"},
        {"leading_words", "paths", "", "extra leading words to strip"},
        {"suffix_rules", "paths", "", "head suffix rules"},
        {"output_dir", "paths", "techmap_out", "output directory"},

        {"min_year", "ingest", "2011", "earliest publication year kept"},
        {"max_year", "ingest", "", "latest publication year kept; empty for open-ended"},
        {"match_mode", "ingest", "word", "concept matching: word or substring"},
        {"skip_malformed", "ingest", "false", "skip malformed corpus records instead of failing"},

        {"recognizer", "extract", "gazetteer", "head recognizer: gazetteer, annotation or heuristic"},
        {"blacklist_concepts", "extract", "true", "blacklist the concept search terms"},

        {"period_length", "graph", "2", "years per period"},
        {"first_year", "graph", "", "first period start; empty uses the earliest document"},
        {"last_year", "graph", "", "last period end; empty uses the latest document"},
        {"semantic_relation", "graph", "prefix_suffix", "prefix_suffix, prefix or contiguous"},
        {"min_total_weight", "graph", "0", "drop nodes with less incident weight"},

        {"resolution", "analyze", "1.0", "Louvain resolution"},
        {"ev_tol", "analyze", "1e-9", "eigenvector convergence tolerance"},
        {"ev_max_iter", "analyze", "10000", "eigenvector iteration limit"},
        {"ev_per_component", "analyze", "false", "normalize eigenvector centrality per component"},
        {"strong_threshold", "analyze", "0.5", "strong bridging tier threshold"},
        {"medium_threshold", "analyze", "0.25", "medium bridging tier threshold"},
        {"delta_mode", "analyze", "window", "centrality delta: window or cumulative"},
        {"delta_from", "analyze", "", "earlier delta period label; empty uses the second-to-last"},
        {"delta_to", "analyze", "", "later delta period label; empty uses the last"},
        {"recluster_periods", "analyze", "false", "re-cluster every period for the trend series"},

        {"k_repulsion", "layout", "10.0", "repulsion constant"},
        {"gravity", "layout", "1.0", "gravity constant"},
        {"edge_weight_influence", "layout", "1.0", "exponent on edge weights"},
        {"jitter_tolerance", "layout", "1.0", "speed adaptation tolerance"},
        {"theta", "layout", "0.5", "Barnes-Hut opening angle"},
        {"barnes_hut", "layout", "false", "approximate repulsion with a quadtree"},
        {"layout_max_iter", "layout", "1000", "iteration limit"},
        {"layout_eps", "layout", "", "displacement threshold; empty uses 1e-3 * sqrt(n)"},

        {"gexf", "export", "true", "write export/graph.gexf"},
        {"json", "export", "true", "write export/graph.json"},

        {"seed", "run", "42", "random seed for clustering and layout"},
        {"threads", "run", "0", "worker threads; 0 uses all cores"},
        {"top_k", "run", "10", "rows per ranking in the report"},
    };
    return keys;
}

namespace {

const KeySpec* spec_for(const std::string& key) {
    for (const auto& k : known_keys())
        if (k.key == key) return &k;
    return nullptr;
}

} // namespace

RawConfig parse_ini(std::istream& in, const std::string& source, const std::filesystem::path& base) {
    RawConfig raw;
    std::vector<std::string> problems;
    std::set<std::string> sections;
    for (const auto& k : known_keys()) sections.insert(k.section);
    std::string section;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        const auto t = std::string(text::trim(line));
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        const std::string where = source + ":" + std::to_string(n) + ": ";
        if (t.front() == '[') {
            if (t.back() != ']') {
                problems.push_back(where + "unterminated section header");
                continue;
            }
            section = std::string(text::trim(std::string_view(t).substr(1, t.size() - 2)));
            if (!sections.count(section)) problems.push_back(where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            problems.push_back(where + "expected key = value");
            continue;
        }
        const std::string key(text::trim(std::string_view(t).substr(0, eq)));
        const std::string value(text::trim(std::string_view(t).substr(eq + 1)));
        const auto* spec = spec_for(key);
        if (!spec) {
            problems.push_back(where + "unknown key \"" + key + "\"");
            continue;
        }
        if (spec->section != section)
            problems.push_back(where + "key \"" + key + "\" belongs in [" + spec->section + "]");
        if (raw.entries.count(key)) problems.push_back(where + "duplicate key \"" + key + "\"");
        raw.entries[key] = {spec->section, value, base};
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
    return raw;
}

RawConfig load_ini(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"cannot read config file " + path.string()});
    return parse_ini(in, path.string(), path.parent_path());
}

std::string to_ini(const RawConfig& raw) {
    std::ostringstream out;
    std::string section;
    for (const auto& k : known_keys()) {
        if (k.section != section) {
            section = k.section;
            out << (out.tellp() > 0 ? "\n" : "") << '[' << section << "]\n";
        }
        auto it = raw.entries.find(k.key);
        out << k.key << " = " << (it != raw.entries.end() ? it->second.value : k.default_value) << '\n';
    }
    return out.str();
}

namespace {

class Reader {
public:
    Reader(const RawConfig& raw, std::vector<std::string>& problems) : raw_(raw), problems_(problems) {}

    std::string str(const std::string& key) const {
        auto it = raw_.entries.find(key);
        return it != raw_.entries.end() ? it->second.value : spec_for(key)->default_value;
    }

    std::optional<std::filesystem::path> path(const std::string& key) const {
        const auto v = str(key);
        if (v.empty()) return std::nullopt;
        std::filesystem::path p(v);
        auto it = raw_.entries.find(key);
        if (p.is_relative() && it != raw_.entries.end() && !it->second.base.empty()) p = it->second.base / p;
        return p.lexically_normal();
    }

    bool boolean(const std::string& key) const {
        const auto v = text::to_lower(str(key));
        if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
        if (v == "false" || v == "no" || v == "0" || v == "off") return false;
        problems_.push_back(key + ": expected true or false, got \"" + str(key) + "\"");
        return false;
    }

    std::optional<long long> integer(const std::string& key, long long lo, long long hi) const {
        const auto v = str(key);
        if (v.empty()) return std::nullopt;
        auto n = text::parse_int(v);
        if (!n || *n < lo || *n > hi) {
            problems_.push_back(key + ": expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                "], got \"" + v + "\"");
            return std::nullopt;
        }
        return n;
    }

    std::optional<double> real(const std::string& key) const {
        const auto v = str(key);
        if (v.empty()) return std::nullopt;
        auto d = text::parse_double(v);
        if (!d || !std::isfinite(*d)) {
            problems_.push_back(key + ": expected a number, got \"" + v + "\"");
            return std::nullopt;
        }
        return d;
    }

    template <typename Fn>
    auto choice(const std::string& key, Fn&& parse) const -> std::optional<decltype(parse(std::string()))> {
        try {
            return parse(str(key));
        } catch (const ConfigError& e) {
            for (const auto& p : e.problems()) problems_.push_back(key + ": " + p);
            return std::nullopt;
        } catch (const Error& e) {
            problems_.push_back(key + ": " + e.what());
            return std::nullopt;
        }
    }

private:
    const RawConfig& raw_;
    std::vector<std::string>& problems_;
};

} // namespace

PipelineConfig resolve(RawConfig raw, const std::map<std::string, std::string>& overrides, bool require_inputs) {
    std::vector<std::string> problems;
    for (const auto& [key, value] : overrides) {
        const auto* spec = spec_for(key);
        if (!spec) {
            problems.push_back("unknown option --" + key);
            continue;
        }
        raw.entries[key] = {spec->section, value, std::filesystem::current_path()};
    }

    Reader r(raw, problems);
    PipelineConfig c;

    auto input = [&](const std::string& key, bool required, bool must_exist) {
        auto p = r.path(key);
        if (!p) {
            if (required) problems.push_back(key + ": required");
            return p;
        }
        if (must_exist && !std::filesystem::is_regular_file(*p))
            problems.push_back(key + ": file not found: " + p->string());
        return p;
    };
    c.corpus = input("corpus", require_inputs, require_inputs).value_or("");
    if (auto f = r.choice("corpus_format", corpus::parse_format)) c.corpus_format = *f;
    c.conllu = input("conllu", require_inputs, require_inputs).value_or("");
    c.annotations = input("annotations", false, true);
    c.concept_terms = input("concept_terms", false, true);
    c.gazetteer = input("gazetteer", false, true);
    c.blacklist = input("blacklist", false, true);
    c.leading_words = input("leading_words", false, true);
    c.suffix_rules = input("suffix_rules", false, true);
    if (auto o = r.path("output_dir")) c.output_dir = *o;
    else problems.push_back("output_dir: required");

    if (auto v = r.integer("min_year", 0, 9999)) c.years.min_year = static_cast<int>(*v);
    if (auto v = r.integer("max_year", 0, 9999)) c.years.max_year = static_cast<int>(*v);
    if (c.years.max_year && *c.years.max_year < c.years.min_year) problems.push_back("max_year: before min_year");
    const auto mode = text::to_lower(r.str("match_mode"));
    if (mode == "word") c.match_mode = corpus::MatchMode::word;
    else if (mode == "substring") c.match_mode = corpus::MatchMode::substring;
    else problems.push_back("match_mode: expected word or substring, got \"" + r.str("match_mode") + "\"");
    c.skip_malformed = r.boolean("skip_malformed");

    if (auto h = r.choice("recognizer", extract::parse_head_source)) c.recognizer = *h;
    if (c.recognizer == extract::HeadSource::annotation && !c.annotations)
        problems.push_back("annotations: required when recognizer = annotation");
    if (c.recognizer == extract::HeadSource::gazetteer && !c.gazetteer)
        problems.push_back("gazetteer: required when recognizer = gazetteer");
    c.blacklist_concepts = r.boolean("blacklist_concepts");

    if (auto v = r.integer("period_length", 1, 100)) c.period_length = static_cast<int>(*v);
    if (auto v = r.integer("first_year", 0, 9999)) c.first_year = static_cast<int>(*v);
    if (auto v = r.integer("last_year", 0, 9999)) c.last_year = static_cast<int>(*v);
    if (c.first_year.has_value() != c.last_year.has_value())
        problems.push_back("first_year and last_year must be given together");
    else if (c.first_year && *c.last_year < *c.first_year)
        problems.push_back("last_year: before first_year");
    if (auto s = r.choice("semantic_relation", graph::parse_semantic_relation)) c.semantic_relation = *s;
    if (auto v = r.real("min_total_weight")) {
        if (*v < 0.0) problems.push_back("min_total_weight: must be nonnegative");
        c.min_total_weight = *v;
    }

    auto& a = c.analysis;
    if (auto v = r.real("resolution")) {
        if (!(*v > 0.0)) problems.push_back("resolution: must be positive");
        a.resolution = *v;
    }
    if (auto v = r.real("ev_tol")) {
        if (!(*v > 0.0)) problems.push_back("ev_tol: must be positive");
        a.eigenvector.tol = *v;
    }
    if (auto v = r.integer("ev_max_iter", 1, 100000000)) a.eigenvector.max_iter = static_cast<int>(*v);
    a.eigenvector.per_component = r.boolean("ev_per_component");
    if (auto v = r.real("strong_threshold")) a.bridging.strong = *v;
    if (auto v = r.real("medium_threshold")) a.bridging.medium = *v;
    if (!(a.bridging.medium > 0.0) || !(a.bridging.medium < a.bridging.strong))
        problems.push_back("medium_threshold/strong_threshold: need 0 < medium < strong");
    if (auto m = r.choice("delta_mode", analyze::parse_delta_mode)) a.delta_mode = *m;
    if (auto v = r.str("delta_from"); !v.empty()) c.delta_from = v;
    if (auto v = r.str("delta_to"); !v.empty()) c.delta_to = v;
    if (c.delta_from.has_value() != c.delta_to.has_value())
        problems.push_back("delta_from and delta_to must be given together");
    a.recluster_periods = r.boolean("recluster_periods");
    a.relation = c.semantic_relation;

    auto& l = c.layout;
    if (auto v = r.real("k_repulsion")) l.k_repulsion = *v;
    if (auto v = r.real("gravity")) l.gravity = *v;
    if (auto v = r.real("edge_weight_influence")) l.edge_weight_influence = *v;
    if (auto v = r.real("jitter_tolerance")) l.jitter_tolerance = *v;
    if (auto v = r.real("theta")) l.theta = *v;
    l.use_barnes_hut = r.boolean("barnes_hut");
    try {
        l.validate();
    } catch (const ConfigError& e) {
        problems.insert(problems.end(), e.problems().begin(), e.problems().end());
    }
    if (auto v = r.integer("layout_max_iter", 1, 100000000)) c.layout_stop.max_iter = static_cast<int>(*v);
    if (auto v = r.real("layout_eps")) {
        if (!(*v > 0.0)) problems.push_back("layout_eps: must be positive");
        c.layout_stop.eps = *v;
    }

    c.export_gexf = r.boolean("gexf");
    c.export_json = r.boolean("json");

    if (auto v = r.integer("seed", 0, std::numeric_limits<long long>::max())) c.seed = static_cast<std::uint64_t>(*v);
    if (auto v = r.integer("threads", 0, 1024)) c.threads = static_cast<unsigned>(*v);
    if (auto v = r.integer("top_k", 1, 1000000)) c.top_k = static_cast<std::size_t>(*v);
    a.seed = c.seed;
    l.threads = c.threads;

    if (!problems.empty()) throw ConfigError(std::move(problems));

    auto hashed = raw;
    hashed.entries.erase("output_dir");
    c.hash = sha256_hex(to_ini(hashed));
    return c;
}

} // namespace techmap::config
