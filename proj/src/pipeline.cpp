#include "techmap/pipeline.hpp"

#include "techmap/conllu.hpp"
#include "techmap/export.hpp"
#include "techmap/graph_io.hpp"
#include "techmap/hash.hpp"
#include "techmap/layout.hpp"
#include "techmap/parallel.hpp"
#include "techmap/report.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <ostream>

namespace techmap::pipeline {

namespace fs = std::filesystem;
using config::PipelineConfig;

const std::vector<std::string>& stage_names() {
    static const std::vector<std::string> names{"ingest", "extract", "build", "analyze", "layout", "export"};
    return names;
}

namespace {

std::string comment(const PipelineConfig& c, const std::string& stage) {
    return "seed=" + std::to_string(c.seed) + " config=" + c.hash + " stage=" + stage;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw DataError("cannot write " + p.string());
    return out;
}

std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot read " + p.string());
    return in;
}

/// Collects what a stage read and wrote, then writes manifest.json.
class Stage {
public:
    Stage(const PipelineConfig& c, std::string name) : c_(c), name_(std::move(name)), dir_(c.output_dir / name_) {
        fs::create_directories(dir_);
        fs::remove(dir_ / "manifest.json");
        result_.stage = name_;
    }

    const fs::path& dir() const { return dir_; }
    Diagnostics& diag() { return result_.diagnostics; }
    std::string header() const { return comment(c_, name_); }

    /// External input file, recorded under a config key.
    void input(const std::string& key, const fs::path& p) { inputs_[key] = sha256_file(p); }

    /// Output of an earlier stage; fails if that stage has not run or its
    /// outputs changed afterwards.
    fs::path upstream(const std::string& stage, const std::string& file) {
        const fs::path manifest = c_.output_dir / stage / "manifest.json";
        if (!fs::exists(manifest)) throw StageError("run " + stage + " first", stage);
        nlohmann::json m;
        try {
            auto in = open_in(manifest);
            m = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception&) {
            throw StageError("manifest of " + stage + " is unreadable; run " + stage + " again", stage);
        }
        const std::string rel = stage + "/" + file;
        const auto& outs = m.at("outputs");
        if (!outs.contains(rel)) throw StageError(stage + " did not produce " + file + "; run " + stage + " again", stage);
        const fs::path p = c_.output_dir / rel;
        const auto sha = fs::exists(p) ? sha256_file(p) : std::string();
        if (sha != outs.at(rel).get<std::string>())
            throw StageError(rel + " changed since " + stage + " ran; run " + stage + " again", stage);
        inputs_[rel] = sha;
        return p;
    }

    void output(const std::string& file) { outputs_.push_back(file); }

    StageResult finish() {
        nlohmann::ordered_json m;
        m["stage"] = name_;
        m["version"] = exporter::version;
        m["seed"] = c_.seed;
        m["config_hash"] = c_.hash;
        m["inputs"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : inputs_) m["inputs"][k] = v;
        m["outputs"] = nlohmann::ordered_json::object();
        for (const auto& f : outputs_) {
            const std::string rel = name_ + "/" + f;
            m["outputs"][rel] = sha256_file(dir_ / f);
            result_.outputs.push_back(rel);
        }
        m["warnings"] = result_.diagnostics.warnings;
        auto out = open_out(dir_ / "manifest.json");
        out << m.dump(2) << '\n';
        result_.outputs.push_back(name_ + "/manifest.json");
        return result_;
    }

private:
    const PipelineConfig& c_;
    std::string name_;
    fs::path dir_;
    std::map<std::string, std::string> inputs_;
    std::vector<std::string> outputs_;
    StageResult result_;
};

std::vector<corpus::ConceptTerm> concept_terms(const PipelineConfig& c, Stage& s) {
    if (!c.concept_terms) return corpus::default_concept_terms();
    s.input("concept_terms", *c.concept_terms);
    return corpus::load_concept_terms(*c.concept_terms);
}

} // namespace

StageResult run_ingest(const PipelineConfig& c) {
    Stage s(c, "ingest");
    if (c.corpus.empty()) throw ConfigError({"corpus: required"});
    s.input("corpus", c.corpus);
    corpus::LoadReport load;
    auto set = corpus::load_corpus(c.corpus, c.corpus_format, {c.skip_malformed}, &load);
    const std::size_t loaded = set.documents.size();
    corpus::DedupReport dedup;
    set = corpus::deduplicate(set, &dedup);
    std::size_t out_of_window = 0;
    set = corpus::filter_years(set, c.years, &out_of_window);
    set = corpus::tag_search_terms(set, concept_terms(c, s), c.match_mode);

    {
        auto out = open_out(s.dir() / "corpus.jsonl");
        corpus::write_jsonl(out, set);
    }
    s.output("corpus.jsonl");
    {
        auto out = open_out(s.dir() / "histogram.csv");
        out << "# " << s.header() << '\n';
        corpus::write_histogram_csv(out, corpus::term_year_histogram(set));
    }
    s.output("histogram.csv");

    std::size_t non_extractable = 0;
    for (const auto& d : set.documents) non_extractable += d.extractable ? 0 : 1;
    nlohmann::ordered_json r;
    r["loaded"] = loaded;
    r["skipped"] = nlohmann::ordered_json::array();
    for (const auto& k : load.skipped) r["skipped"].push_back({{"line", k.line}, {"reason", k.reason}});
    r["removed"] = nlohmann::ordered_json::array();
    for (const auto& k : dedup.removals)
        r["removed"].push_back({{"id", k.id}, {"reason", k.reason}, {"kept_id", k.kept_id}});
    r["out_of_window"] = out_of_window;
    r["kept"] = set.documents.size();
    r["non_extractable"] = non_extractable;
    {
        auto out = open_out(s.dir() / "ingest_report.json");
        out << r.dump(2) << '\n';
    }
    s.output("ingest_report.json");

    if (!load.skipped.empty()) s.diag().warn(std::to_string(load.skipped.size()) + " malformed records skipped");
    if (non_extractable > 0) s.diag().warn(std::to_string(non_extractable) + " documents have no abstract");
    if (set.documents.empty()) s.diag().warn("corpus is empty after deduplication and year filtering");
    return s.finish();
}

StageResult run_extract(const PipelineConfig& c) {
    Stage s(c, "extract");
    const auto corpus_path = s.upstream("ingest", "corpus.jsonl");
    auto corpus_in = open_in(corpus_path);
    const auto set = corpus::read_jsonl(corpus_in, corpus_path.string());

    if (c.conllu.empty()) throw ConfigError({"conllu: required"});
    s.input("conllu", c.conllu);
    auto conllu_in = open_in(c.conllu);
    const auto parsed = extract::parse_conllu(conllu_in, c.conllu.string());

    auto lex = extract::Lexicons::defaults();
    auto load = [&](const std::optional<fs::path>& p, const std::string& key, auto&& add) {
        if (!p) return;
        s.input(key, *p);
        auto in = open_in(*p);
        add(in, p->string());
    };
    load(c.gazetteer, "gazetteer", [&](std::istream& in, const std::string&) { lex.add_gazetteer(in); });
    load(c.blacklist, "blacklist", [&](std::istream& in, const std::string&) { lex.add_blacklist(in); });
    load(c.leading_words, "leading_words", [&](std::istream& in, const std::string&) { lex.add_leading_words(in); });
    load(c.suffix_rules, "suffix_rules",
         [&](std::istream& in, const std::string& src) { lex.add_suffix_rules(in, src); });
    if (c.blacklist_concepts) lex.blacklist_concepts(concept_terms(c, s));

    extract::Recognizer recognizer = extract::Recognizer::gazetteer();
    if (c.recognizer == extract::HeadSource::annotation) {
        if (!c.annotations) throw ConfigError({"annotations: required when recognizer = annotation"});
        s.input("annotations", *c.annotations);
        auto in = open_in(*c.annotations);
        recognizer = extract::Recognizer::annotations(extract::read_annotations(in, c.annotations->string()));
    } else if (c.recognizer == extract::HeadSource::heuristic) {
        recognizer = extract::Recognizer::heuristic();
    }

    auto result = extract::extract_corpus(parsed, set, recognizer, lex, resolve_threads(c.threads));
    {
        auto out = open_out(s.dir() / "terms.jsonl");
        extract::write_terms_jsonl(out, result.documents);
    }
    s.output("terms.jsonl");
    {
        auto out = open_out(s.dir() / "extraction_report.json");
        extract::write_extraction_report(out, result);
    }
    s.output("extraction_report.json");
    for (auto& w : result.diagnostics.warnings) s.diag().warn(std::move(w));
    if (result.missing_parse > 0)
        s.diag().warn(std::to_string(result.missing_parse) + " corpus documents have no parse");
    return s.finish();
}

StageResult run_build(const PipelineConfig& c) {
    Stage s(c, "build");
    const auto terms_path = s.upstream("extract", "terms.jsonl");
    auto in = open_in(terms_path);
    const auto docs = extract::read_terms_jsonl(in, terms_path.string());

    const auto scheme = c.first_year ? graph::PeriodScheme::consecutive(*c.first_year, *c.last_year, c.period_length)
                                     : graph::scheme_for(docs, c.period_length);
    auto g = graph::build_cooccurrence(docs, scheme, &s.diag(), resolve_threads(c.threads));
    const auto pairs = graph::detect_semantic_pairs(g, c.semantic_relation);
    g = graph::calibrate_semantic_weights(std::move(g), pairs, &s.diag());
    if (c.min_total_weight > 0.0) g = graph::filter(g, c.min_total_weight);
    if (g.empty()) s.diag().warn("graph is empty");

    graph::save_graph(s.dir(), g, s.header());
    for (const char* f : {"nodes.csv", "edges.csv", "graph_meta.json"}) s.output(f);
    return s.finish();
}

namespace {

graph::TechnologyGraph load_built(Stage& s) {
    for (const char* f : {"nodes.csv", "edges.csv", "graph_meta.json"}) s.upstream("build", f);
    return graph::load_graph(s.dir().parent_path() / "build");
}

std::size_t period_index(const graph::TechnologyGraph& g, const std::string& key, const std::string& label) {
    const auto& ps = g.scheme().periods();
    for (std::size_t i = 0; i < ps.size(); ++i)
        if (ps[i].label() == label) return i;
    throw ConfigError({key + ": no period labelled \"" + label + "\""});
}

} // namespace

StageResult run_analyze(const PipelineConfig& c) {
    Stage s(c, "analyze");
    const auto g = load_built(s);
    auto options = c.analysis;
    if (c.delta_from) {
        options.delta_from = period_index(g, "delta_from", *c.delta_from);
        options.delta_to = period_index(g, "delta_to", *c.delta_to);
    }
    auto r = analyze::analyze_graph(g, options);
    for (const auto& w : r.diagnostics.warnings) s.diag().warn(w);

    const auto write = [&](const std::string& file, auto&& fn) {
        auto out = open_out(s.dir() / file);
        fn(out);
        s.output(file);
    };
    write("node_metrics.csv",
          [&](std::ostream& o) { report::write_node_metrics_csv(o, report::node_metrics(g, r), s.header()); });
    write("ri_matrix.csv", [&](std::ostream& o) { report::write_ri_csv(o, r.ri, s.header()); });
    write("trends.csv", [&](std::ostream& o) {
        report::write_trends_csv(o, r.trends, static_cast<std::size_t>(r.clusters.cluster_count()), s.header());
    });
    write("bridging.csv",
          [&](std::ostream& o) { report::write_bridging_csv(o, g, r.clusters, r.bridges, s.header()); });
    write("summary.json", [&](std::ostream& o) { report::write_summary_json(o, report::summarize(g, r, options)); });
    return s.finish();
}

StageResult run_layout(const PipelineConfig& c) {
    Stage s(c, "layout");
    const auto g = load_built(s);
    std::vector<layout::Vec2> positions;
    nlohmann::ordered_json info;
    if (g.empty()) {
        s.diag().warn("graph is empty; no layout computed");
        info["iterations"] = 0;
        info["converged"] = true;
    } else {
        const auto r = layout::run(g, c.layout, c.layout_stop, c.seed);
        positions = r.positions;
        info["iterations"] = r.iterations;
        info["converged"] = r.converged;
        if (!r.converged)
            s.diag().warn("layout stopped after " + std::to_string(r.iterations) + " iterations without converging");
    }
    {
        auto out = open_out(s.dir() / "positions.csv");
        layout::write_positions_csv(out, g, positions, s.header());
    }
    s.output("positions.csv");
    {
        auto out = open_out(s.dir() / "layout_info.json");
        out << info.dump(2) << '\n';
    }
    s.output("layout_info.json");
    return s.finish();
}

StageResult run_export(const PipelineConfig& c) {
    Stage s(c, "export");
    const auto g = load_built(s);
    const auto metrics_path = s.upstream("analyze", "node_metrics.csv");
    const auto positions_path = s.upstream("layout", "positions.csv");
    auto min = open_in(metrics_path);
    const auto metrics = report::read_node_metrics_csv(min, metrics_path.string());
    auto pin = open_in(positions_path);
    const auto positions = layout::read_positions_csv(pin, g, positions_path.string());
    const exporter::ExportMeta meta{c.seed, c.hash};

    if (c.export_gexf) {
        auto out = open_out(s.dir() / "graph.gexf");
        exporter::write_gexf(out, g, metrics, positions, meta);
        s.output("graph.gexf");
    }
    if (c.export_json) {
        auto out = open_out(s.dir() / "graph.json");
        exporter::write_json(out, g, metrics, positions, meta);
        s.output("graph.json");
    }
    if (!c.export_gexf && !c.export_json) s.diag().warn("all export formats are disabled");
    return s.finish();
}

StageResult run_stage(const std::string& name, const PipelineConfig& c) {
    if (name == "ingest") return run_ingest(c);
    if (name == "extract") return run_extract(c);
    if (name == "build") return run_build(c);
    if (name == "analyze") return run_analyze(c);
    if (name == "layout") return run_layout(c);
    if (name == "export") return run_export(c);
    throw ConfigError({"unknown stage \"" + name + "\""});
}

std::vector<StageResult> run_pipeline(const PipelineConfig& c) {
    std::vector<StageResult> out;
    for (const auto& name : stage_names()) out.push_back(run_stage(name, c));
    return out;
}

void run_report(const PipelineConfig& c, std::ostream& out) {
    const fs::path dir = c.output_dir / "analyze";
    if (!fs::exists(dir / "manifest.json")) throw StageError("run analyze first", "analyze");
    auto sin = open_in(dir / "summary.json");
    const auto summary = report::read_summary_json(sin, (dir / "summary.json").string());
    auto min = open_in(dir / "node_metrics.csv");
    const auto metrics = report::read_node_metrics_csv(min, (dir / "node_metrics.csv").string());
    report::print_report(out, summary, metrics, c.top_k);
    const auto problems = verify_manifests(c.output_dir);
    out << '\n' << (problems.empty() ? "manifest chain: ok" : "manifest chain: BROKEN") << '\n';
    for (const auto& p : problems) out << "  " << p << '\n';
}

std::vector<std::string> verify_manifests(const fs::path& output_dir) {
    std::vector<std::string> problems;
    for (const auto& stage : stage_names()) {
        const fs::path manifest = output_dir / stage / "manifest.json";
        if (!fs::exists(manifest)) continue;
        nlohmann::json m;
        try {
            auto in = open_in(manifest);
            m = nlohmann::json::parse(in);
        } catch (const std::exception& e) {
            problems.push_back(stage + ": unreadable manifest");
            continue;
        }
        auto check = [&](const std::string& rel, const std::string& recorded, const std::string& what) {
            const fs::path p = output_dir / rel;
            if (!fs::exists(p)) problems.push_back(stage + ": " + what + " " + rel + " is missing");
            else if (sha256_file(p) != recorded) problems.push_back(stage + ": " + what + " " + rel + " has changed");
        };
        for (const auto& [rel, sha] : m.at("outputs").items()) check(rel, sha.get<std::string>(), "output");
        for (const auto& [key, sha] : m.at("inputs").items())
            if (key.find('/') != std::string::npos) check(key, sha.get<std::string>(), "input");
    }
    return problems;
}

int exit_code(const std::exception& e) {
    if (dynamic_cast<const NumericalError*>(&e)) return 3;
    if (dynamic_cast<const DataError*>(&e)) return 2;
    if (dynamic_cast<const fs::filesystem_error*>(&e)) return 2;
    return 1;
}

} // namespace techmap::pipeline
