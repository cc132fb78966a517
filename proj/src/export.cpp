#include "techmap/export.hpp"

#include "techmap/error.hpp"
#include "techmap/text.hpp"

#include <json.hpp>

#include <ostream>

namespace techmap::exporter {

using graph::TechnologyGraph;
using text::format_double;

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char ch : s) {
        const auto c = static_cast<unsigned char>(ch);
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default:
            if (c < 0x20 && c != '\t' && c != '\n' && c != '\r') break;
            out += ch;
        }
    }
    return out;
}

namespace {

void check_inputs(const TechnologyGraph& g, const report::NodeMetricsTable& metrics,
                  const std::vector<layout::Vec2>& positions) {
    if (metrics.rows.size() != g.node_count() || positions.size() != g.node_count())
        throw DataError("metrics or positions do not match the graph");
    for (const auto& n : g.nodes())
        if (metrics.rows[n.id].label != n.label)
            throw DataError("node metrics out of order at \"" + n.label + "\"");
}

std::string attr(const std::string& name, const std::string& value) {
    return " " + name + "=\"" + xml_escape(value) + "\"";
}

} // namespace

void write_gexf(std::ostream& out, const TechnologyGraph& g, const report::NodeMetricsTable& metrics,
                const std::vector<layout::Vec2>& positions, const ExportMeta& meta) {
    check_inputs(g, metrics, positions);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<gexf xmlns=\"http://gexf.net/1.3\" xmlns:viz=\"http://gexf.net/1.3/viz\""
        << " xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\""
        << " xsi:schemaLocation=\"http://gexf.net/1.3 http://gexf.net/1.3/gexf.xsd\" version=\"1.3\">\n"
        << "  <meta>\n"
        << "    <creator>techmap " << xml_escape(meta.version) << "</creator>\n"
        << "    <description>technology map; seed=" << meta.seed << " config=" << xml_escape(meta.config_hash)
        << "</description>\n"
        << "  </meta>\n"
        << "  <graph mode=\"static\" defaultedgetype=\"undirected\" idtype=\"integer\">\n"
        << "    <attributes class=\"node\" mode=\"static\">\n"
        << "      <attribute id=\"cluster\" title=\"cluster\" type=\"integer\"/>\n"
        << "      <attribute id=\"weighted_degree\" title=\"weighted_degree\" type=\"double\"/>\n"
        << "      <attribute id=\"eigenvector\" title=\"eigenvector\" type=\"double\"/>\n";
    for (const auto& p : metrics.periods)
        out << "      <attribute" << attr("id", "degree_" + p) << attr("title", "degree " + p) << " type=\"double\"/>\n";
    out << "    </attributes>\n"
        << "    <attributes class=\"edge\" mode=\"static\">\n"
        << "      <attribute id=\"cooc_weight\" title=\"cooc_weight\" type=\"double\"/>\n"
        << "      <attribute id=\"semantic_weight\" title=\"semantic_weight\" type=\"double\"/>\n"
        << "      <attribute id=\"kind\" title=\"kind\" type=\"string\"/>\n"
        << "    </attributes>\n"
        << "    <nodes>\n";
    for (const auto& n : g.nodes()) {
        const auto& m = metrics.rows[n.id];
        out << "      <node" << attr("id", std::to_string(n.id)) << attr("label", n.label) << ">\n"
            << "        <attvalues>\n"
            << "          <attvalue for=\"cluster\"" << attr("value", std::to_string(m.cluster)) << "/>\n"
            << "          <attvalue for=\"weighted_degree\"" << attr("value", format_double(m.weighted_degree)) << "/>\n"
            << "          <attvalue for=\"eigenvector\"" << attr("value", format_double(m.eigenvector)) << "/>\n";
        for (std::size_t p = 0; p < metrics.periods.size(); ++p)
            out << "          <attvalue" << attr("for", "degree_" + metrics.periods[p])
                << attr("value", format_double(m.period_degree[p])) << "/>\n";
        out << "        </attvalues>\n"
            << "        <viz:position" << attr("x", format_double(positions[n.id].x))
            << attr("y", format_double(positions[n.id].y)) << " z=\"0.0\"/>\n"
            << "      </node>\n";
    }
    out << "    </nodes>\n"
        << "    <edges>\n";
    for (std::size_t i = 0; i < g.edges().size(); ++i) {
        const auto& e = g.edges()[i];
        out << "      <edge" << attr("id", std::to_string(i)) << attr("source", std::to_string(e.u))
            << attr("target", std::to_string(e.v)) << attr("weight", format_double(e.weight())) << ">\n"
            << "        <attvalues>\n"
            << "          <attvalue for=\"cooc_weight\"" << attr("value", format_double(e.cooc_weight)) << "/>\n"
            << "          <attvalue for=\"semantic_weight\"" << attr("value", format_double(e.semantic_weight)) << "/>\n"
            << "          <attvalue for=\"kind\"" << attr("value", e.kind()) << "/>\n"
            << "        </attvalues>\n"
            << "      </edge>\n";
    }
    out << "    </edges>\n"
        << "  </graph>\n"
        << "</gexf>\n";
}

void write_json(std::ostream& out, const TechnologyGraph& g, const report::NodeMetricsTable& metrics,
                const std::vector<layout::Vec2>& positions, const ExportMeta& meta) {
    check_inputs(g, metrics, positions);
    using ojson = nlohmann::ordered_json;
    ojson j;
    auto& m = j["meta"];
    m["version"] = meta.version;
    m["seed"] = meta.seed;
    m["config_hash"] = meta.config_hash;
    m["periods"] = ojson::array();
    for (const auto& p : g.scheme().periods()) m["periods"].push_back({p.start_year, p.end_year});
    m["calibration"] = g.calibration();
    m["semantic_pairs"] = g.semantic_pairs();

    j["nodes"] = ojson::array();
    for (const auto& n : g.nodes()) {
        const auto& row = metrics.rows[n.id];
        ojson node;
        node["id"] = n.id;
        node["label"] = n.label;
        node["x"] = positions[n.id].x;
        node["y"] = positions[n.id].y;
        node["cluster"] = row.cluster;
        ojson mt;
        mt["weighted_degree"] = row.weighted_degree;
        mt["eigenvector"] = row.eigenvector;
        mt["intra_share"] = row.intra_share ? ojson(*row.intra_share) : ojson(nullptr);
        mt["period_degree"] = row.period_degree;
        mt["period_eigenvector"] = row.period_eigenvector;
        mt["delta"] = row.delta ? ojson(*row.delta) : ojson(nullptr);
        node["metrics"] = std::move(mt);
        node["occurrences"] = n.occurrences;
        j["nodes"].push_back(std::move(node));
    }
    j["edges"] = ojson::array();
    for (const auto& e : g.edges()) {
        ojson edge;
        edge["source"] = e.u;
        edge["target"] = e.v;
        edge["weight"] = e.weight();
        edge["kind"] = e.kind();
        edge["cooc_weight"] = e.cooc_weight;
        edge["semantic_weight"] = e.semantic_weight;
        edge["periods"] = e.period_cooc;
        j["edges"].push_back(std::move(edge));
    }
    out << j.dump(1) << '\n';
}

JsonImport read_json(std::istream& in, const std::string& source) {
    try {
        const auto j = nlohmann::json::parse(in);
        JsonImport r;
        const auto& m = j.at("meta");
        r.meta.version = m.at("version").get<std::string>();
        r.meta.seed = m.at("seed").get<std::uint64_t>();
        r.meta.config_hash = m.at("config_hash").get<std::string>();
        std::vector<graph::Period> periods;
        for (const auto& p : m.at("periods")) periods.push_back({p.at(0).get<int>(), p.at(1).get<int>()});

        std::vector<graph::TermNode> nodes;
        for (const auto& n : j.at("nodes")) {
            graph::TermNode t;
            t.id = n.at("id").get<graph::NodeId>();
            t.label = n.at("label").get<std::string>();
            t.occurrences = n.at("occurrences").get<std::vector<std::int64_t>>();
            r.positions.push_back({n.at("x").get<double>(), n.at("y").get<double>()});
            r.clusters.push_back(n.at("cluster").get<int>());
            nodes.push_back(std::move(t));
        }
        std::vector<graph::WeightedEdge> edges;
        for (const auto& e : j.at("edges")) {
            graph::WeightedEdge w;
            w.u = e.at("source").get<graph::NodeId>();
            w.v = e.at("target").get<graph::NodeId>();
            w.cooc_weight = e.at("cooc_weight").get<double>();
            w.semantic_weight = e.at("semantic_weight").get<double>();
            w.period_cooc = e.at("periods").get<std::vector<double>>();
            edges.push_back(std::move(w));
        }
        r.graph = TechnologyGraph::from_parts(graph::PeriodScheme(std::move(periods)), std::move(nodes),
                                              std::move(edges), m.at("calibration").get<double>(),
                                              m.at("semantic_pairs").get<std::size_t>());
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed graph JSON: ") + e.what(), source);
    }
}

} // namespace techmap::exporter
