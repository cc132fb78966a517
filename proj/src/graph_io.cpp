#include "techmap/graph_io.hpp"

#include "techmap/csv.hpp"
#include "techmap/text.hpp"

#include <json.hpp>

#include <fstream>
#include <optional>
#include <ostream>

namespace techmap::graph {

namespace {

std::vector<std::string> bucket_names(const PeriodScheme& scheme) {
    std::vector<std::string> names;
    for (const auto& p : scheme.periods()) names.push_back(p.label());
    names.emplace_back("overflow");
    return names;
}

void comment_line(std::ostream& out, const std::string& comment) {
    if (!comment.empty()) out << "# " << comment << '\n';
}

double number(const std::string& s, const std::string& source, std::size_t line) {
    auto v = text::parse_double(s);
    if (!v) throw DataError("invalid number \"" + s + "\"", source, line);
    return *v;
}

} // namespace

void write_nodes_csv(std::ostream& out, const TechnologyGraph& g, const std::string& comment) {
    comment_line(out, comment);
    std::vector<std::string> header{"node_id", "label"};
    for (const auto& b : bucket_names(g.scheme())) header.push_back("occ_" + b);
    out << csv::join_row(header) << '\n';
    for (const auto& n : g.nodes()) {
        out << n.id << ',' << csv::escape(n.label);
        for (auto c : n.occurrences) out << ',' << c;
        out << '\n';
    }
}

void write_edges_csv(std::ostream& out, const TechnologyGraph& g, const std::string& comment) {
    comment_line(out, comment);
    std::vector<std::string> header{"u_label", "v_label", "cooc_weight", "semantic_weight"};
    for (const auto& b : bucket_names(g.scheme())) header.push_back("cooc_" + b);
    out << csv::join_row(header) << '\n';
    for (const auto& e : g.edges()) {
        out << csv::escape(g.nodes()[e.u].label) << ',' << csv::escape(g.nodes()[e.v].label) << ','
            << text::format_double(e.cooc_weight) << ',' << text::format_double(e.semantic_weight);
        for (double w : e.period_cooc) out << ',' << text::format_double(w);
        out << '\n';
    }
}

void write_meta_json(std::ostream& out, const TechnologyGraph& g) {
    nlohmann::ordered_json j;
    j["periods"] = nlohmann::json::array();
    for (const auto& p : g.scheme().periods()) j["periods"].push_back({p.start_year, p.end_year});
    j["calibration"] = g.calibration();
    j["calibration_text"] = text::format_double(g.calibration());
    j["semantic_pairs"] = g.semantic_pairs();
    j["nodes"] = g.node_count();
    j["edges"] = g.edge_count();
    out << j.dump(2) << '\n';
}

TechnologyGraph read_graph(std::istream& nodes_csv, std::istream& edges_csv, std::istream& meta_json,
                           const std::string& source) {
    std::vector<Period> periods;
    std::optional<double> calibration;
    std::size_t semantic_pairs = 0;
    try {
        const auto meta = nlohmann::json::parse(meta_json);
        for (const auto& p : meta.at("periods")) periods.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
        calibration = text::parse_double(meta.at("calibration_text").get<std::string>());
        semantic_pairs = meta.at("semantic_pairs").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed graph metadata: ") + e.what(), source + "/graph_meta.json");
    }
    PeriodScheme scheme(std::move(periods));
    const std::size_t buckets = scheme.buckets();
    if (!calibration) throw DataError("invalid calibration value", source + "/graph_meta.json");

    const std::string nsrc = source + "/nodes.csv";
    csv::Reader nr(nodes_csv, nsrc);
    auto nh = nr.next();
    if (!nh || nh->size() != 2 + buckets) throw DataError("node header does not match period scheme", nsrc, nr.line());
    std::vector<TermNode> nodes;
    std::unordered_map<std::string, NodeId> by_label;
    while (auto row = nr.next()) {
        if (row->size() != 2 + buckets) throw DataError("wrong field count", nsrc, nr.line());
        TermNode n;
        auto id = text::parse_int((*row)[0]);
        if (!id) throw DataError("invalid node id", nsrc, nr.line());
        n.id = static_cast<NodeId>(*id);
        n.label = (*row)[1];
        for (std::size_t b = 0; b < buckets; ++b) {
            auto c = text::parse_int((*row)[2 + b]);
            if (!c) throw DataError("invalid occurrence count", nsrc, nr.line());
            n.occurrences.push_back(*c);
        }
        by_label.emplace(n.label, n.id);
        nodes.push_back(std::move(n));
    }

    const std::string esrc = source + "/edges.csv";
    csv::Reader er(edges_csv, esrc);
    auto eh = er.next();
    if (!eh || eh->size() != 4 + buckets) throw DataError("edge header does not match period scheme", esrc, er.line());
    std::vector<WeightedEdge> edges;
    while (auto row = er.next()) {
        if (row->size() != 4 + buckets) throw DataError("wrong field count", esrc, er.line());
        auto u = by_label.find((*row)[0]);
        auto v = by_label.find((*row)[1]);
        if (u == by_label.end() || v == by_label.end()) throw DataError("edge references unknown node", esrc, er.line());
        WeightedEdge e;
        e.u = std::min(u->second, v->second);
        e.v = std::max(u->second, v->second);
        e.cooc_weight = number((*row)[2], esrc, er.line());
        e.semantic_weight = number((*row)[3], esrc, er.line());
        for (std::size_t b = 0; b < buckets; ++b) e.period_cooc.push_back(number((*row)[4 + b], esrc, er.line()));
        edges.push_back(std::move(e));
    }
    return TechnologyGraph::from_parts(std::move(scheme), std::move(nodes), std::move(edges), *calibration,
                                       semantic_pairs);
}

void save_graph(const std::filesystem::path& dir, const TechnologyGraph& g, const std::string& comment) {
    std::filesystem::create_directories(dir);
    std::ofstream n(dir / "nodes.csv", std::ios::binary), e(dir / "edges.csv", std::ios::binary),
        m(dir / "graph_meta.json", std::ios::binary);
    if (!n || !e || !m) throw DataError("cannot write graph files", dir.string());
    write_nodes_csv(n, g, comment);
    write_edges_csv(e, g, comment);
    write_meta_json(m, g);
}

TechnologyGraph load_graph(const std::filesystem::path& dir) {
    std::ifstream n(dir / "nodes.csv", std::ios::binary), e(dir / "edges.csv", std::ios::binary),
        m(dir / "graph_meta.json", std::ios::binary);
    if (!n || !e || !m) throw DataError("graph files missing", dir.string());
    return read_graph(n, e, m, dir.string());
}

} // namespace techmap::graph
