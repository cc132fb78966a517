#include "techmap/report.hpp"

#include "techmap/csv.hpp"
#include "techmap/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <functional>
#include <iomanip>
#include <ostream>

namespace techmap::report {

namespace {

using text::format_double;

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

void comment_line(std::ostream& out, const std::string& comment) {
    if (!comment.empty()) out << "# " << comment << '\n';
}

double number(const std::string& s, const std::string& source, std::size_t line) {
    auto v = text::parse_double(s);
    if (!v) throw DataError("invalid number \"" + s + "\"", source, line);
    return *v;
}

} // namespace

NodeMetricsTable node_metrics(const TechnologyGraph& g, const AnalysisReport& r) {
    NodeMetricsTable t;
    for (const auto& p : g.scheme().periods()) t.periods.push_back(p.label());
    t.has_delta = !r.delta.empty();
    for (const auto& n : g.nodes()) {
        NodeMetrics m;
        m.label = n.label;
        m.cluster = r.clusters.membership.at(n.id);
        m.weighted_degree = r.weighted_degree.at(n.id);
        m.eigenvector = r.eigenvector.values.at(n.id);
        m.intra_share = r.intra.per_node.at(n.id);
        for (std::size_t p = 0; p < t.periods.size(); ++p) {
            m.period_degree.push_back(r.trends.node_degree.at(p).at(n.id));
            m.period_eigenvector.push_back(r.period_eigenvector.at(p).at(n.id));
        }
        if (t.has_delta) m.delta = r.delta.at(n.id);
        t.rows.push_back(std::move(m));
    }
    return t;
}

void write_node_metrics_csv(std::ostream& out, const NodeMetricsTable& t, const std::string& comment) {
    comment_line(out, comment);
    std::vector<std::string> header{"label", "cluster", "weighted_degree", "eigenvector", "intra_share"};
    for (const auto& p : t.periods) header.push_back("deg_" + p);
    for (const auto& p : t.periods) header.push_back("ev_" + p);
    if (t.has_delta) header.emplace_back("delta");
    out << csv::join_row(header) << '\n';
    for (const auto& m : t.rows) {
        out << csv::escape(m.label) << ',' << m.cluster << ',' << format_double(m.weighted_degree) << ','
            << format_double(m.eigenvector) << ',' << opt(m.intra_share);
        for (double d : m.period_degree) out << ',' << format_double(d);
        for (double e : m.period_eigenvector) out << ',' << format_double(e);
        if (t.has_delta) out << ',' << opt(m.delta);
        out << '\n';
    }
}

NodeMetricsTable read_node_metrics_csv(std::istream& in, const std::string& source) {
    csv::Reader r(in, source);
    auto header = r.next();
    if (!header || header->size() < 5 || (*header)[0] != "label")
        throw DataError("not a node metrics table", source, r.line());
    NodeMetricsTable t;
    std::size_t col = 5;
    while (col < header->size() && (*header)[col].rfind("deg_", 0) == 0) t.periods.push_back((*header)[col++].substr(4));
    const std::size_t np = t.periods.size();
    for (std::size_t p = 0; p < np; ++p, ++col)
        if (col >= header->size() || (*header)[col] != "ev_" + t.periods[p])
            throw DataError("node metrics header has mismatched period columns", source, r.line());
    t.has_delta = col < header->size() && (*header)[col] == "delta";
    const std::size_t width = 5 + 2 * np + (t.has_delta ? 1 : 0);
    if (header->size() != width) throw DataError("unexpected node metrics columns", source, r.line());

    while (auto row = r.next()) {
        const auto& f = *row;
        if (f.size() != width) throw DataError("wrong field count", source, r.line());
        NodeMetrics m;
        m.label = f[0];
        auto c = text::parse_int(f[1]);
        if (!c) throw DataError("invalid cluster id", source, r.line());
        m.cluster = static_cast<int>(*c);
        m.weighted_degree = number(f[2], source, r.line());
        m.eigenvector = number(f[3], source, r.line());
        if (!f[4].empty()) m.intra_share = number(f[4], source, r.line());
        for (std::size_t p = 0; p < np; ++p) m.period_degree.push_back(number(f[5 + p], source, r.line()));
        for (std::size_t p = 0; p < np; ++p) m.period_eigenvector.push_back(number(f[5 + np + p], source, r.line()));
        if (t.has_delta && !f[width - 1].empty()) m.delta = number(f[width - 1], source, r.line());
        t.rows.push_back(std::move(m));
    }
    return t;
}

void write_ri_csv(std::ostream& out, const analyze::RIMatrix& m, const std::string& comment) {
    comment_line(out, comment);
    out << "cluster_a,cluster_b,weight,size_a,size_b,ri,bin\n";
    for (std::size_t a = 0; a < m.size(); ++a)
        for (std::size_t b = 0; b < m.size(); ++b)
            out << a << ',' << b << ',' << format_double(m.weight[a][b]) << ',' << format_double(m.sizes[a]) << ','
                << format_double(m.sizes[b]) << ',' << format_double(m.ri[a][b]) << ',' << to_string(m.bins[a][b])
                << '\n';
}

void write_trends_csv(std::ostream& out, const analyze::TrendSeries& t, std::size_t clusters,
                      const std::string& comment) {
    comment_line(out, comment);
    out << "period,empty";
    for (std::size_t c = 0; c < clusters; ++c) out << ",cluster_" << c;
    out << '\n';
    for (std::size_t p = 0; p < t.periods.size(); ++p) {
        out << t.periods[p].label() << ',' << (t.empty[p] ? "true" : "false");
        for (std::size_t c = 0; c < clusters; ++c) out << ',' << format_double(t.shares[p][c]);
        out << '\n';
    }
}

void write_bridging_csv(std::ostream& out, const TechnologyGraph& g, const analyze::ClusterAssignment& c,
                        const std::vector<analyze::Bridge>& bridges, const std::string& comment) {
    comment_line(out, comment);
    out << "label,cluster,foreign_cluster,tier,ratio\n";
    for (const auto& b : bridges)
        out << csv::escape(g.nodes()[b.node].label) << ',' << c.membership[b.node] << ',' << b.cluster << ','
            << to_string(b.tier) << ',' << format_double(b.ratio) << '\n';
}

// ---------------------------------------------------------------------------

AnalysisSummary summarize(const TechnologyGraph& g, const AnalysisReport& r, const analyze::AnalysisOptions& o) {
    AnalysisSummary s;
    s.nodes = g.node_count();
    s.edges = g.edge_count();
    s.clusters = r.clusters.cluster_count();
    s.modularity_q = r.clusters.modularity_q;
    s.level_modularity = r.clusters.level_modularity;
    s.resolution = o.resolution;
    s.seed = o.seed;
    s.mean_intra_share = r.intra.mean;
    s.eigenvector_iterations = r.eigenvector.iterations;
    s.eigenvector_residual = r.eigenvector.residual;
    if (r.delta_periods) {
        const auto& ps = g.scheme().periods();
        s.delta_periods = std::make_pair(ps[r.delta_periods->first].label(), ps[r.delta_periods->second].label());
    }
    s.delta_mode = o.delta_mode == analyze::DeltaMode::window ? "window" : "cumulative";
    s.warnings = r.diagnostics.warnings;
    return s;
}

void write_summary_json(std::ostream& out, const AnalysisSummary& s) {
    nlohmann::ordered_json j;
    j["nodes"] = s.nodes;
    j["edges"] = s.edges;
    j["clusters"] = s.clusters;
    j["modularity_q"] = format_double(s.modularity_q);
    auto levels = nlohmann::json::array();
    for (double q : s.level_modularity) levels.push_back(format_double(q));
    j["level_modularity"] = levels;
    j["resolution"] = format_double(s.resolution);
    j["seed"] = s.seed;
    j["mean_intra_share"] = format_double(s.mean_intra_share);
    j["eigenvector_iterations"] = s.eigenvector_iterations;
    j["eigenvector_residual"] = format_double(s.eigenvector_residual);
    if (s.delta_periods) j["delta_periods"] = {s.delta_periods->first, s.delta_periods->second};
    else j["delta_periods"] = nullptr;
    j["delta_mode"] = s.delta_mode;
    j["warnings"] = s.warnings;
    out << j.dump(2) << '\n';
}

AnalysisSummary read_summary_json(std::istream& in, const std::string& source) {
    try {
        const auto j = nlohmann::json::parse(in);
        auto num = [&](const char* key) {
            auto v = text::parse_double(j.at(key).get<std::string>());
            if (!v) throw DataError(std::string("invalid number for ") + key, source);
            return *v;
        };
        AnalysisSummary s;
        s.nodes = j.at("nodes").get<std::size_t>();
        s.edges = j.at("edges").get<std::size_t>();
        s.clusters = j.at("clusters").get<int>();
        s.modularity_q = num("modularity_q");
        for (const auto& q : j.at("level_modularity")) s.level_modularity.push_back(*text::parse_double(q.get<std::string>()));
        s.resolution = num("resolution");
        s.seed = j.at("seed").get<std::uint64_t>();
        s.mean_intra_share = num("mean_intra_share");
        s.eigenvector_iterations = j.at("eigenvector_iterations").get<int>();
        s.eigenvector_residual = num("eigenvector_residual");
        if (!j.at("delta_periods").is_null())
            s.delta_periods = std::make_pair(j["delta_periods"].at(0).get<std::string>(),
                                             j["delta_periods"].at(1).get<std::string>());
        s.delta_mode = j.at("delta_mode").get<std::string>();
        s.warnings = j.at("warnings").get<std::vector<std::string>>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed analysis summary: ") + e.what(), source);
    }
}

// ---------------------------------------------------------------------------

namespace {

std::vector<RankedNode> ranked(const NodeMetricsTable& t, std::size_t k, bool descending,
                               const std::function<std::optional<double>(const NodeMetrics&)>& value) {
    std::vector<RankedNode> all;
    for (const auto& m : t.rows)
        if (auto v = value(m)) all.push_back({m.label, *v});
    std::sort(all.begin(), all.end(), [&](const RankedNode& a, const RankedNode& b) {
        if (a.value != b.value) return descending ? a.value > b.value : a.value < b.value;
        return a.label < b.label;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

} // namespace

std::vector<RankedNode> top_k(const NodeMetricsTable& t, std::size_t k, double NodeMetrics::*field) {
    return ranked(t, k, true, [field](const NodeMetrics& m) { return std::optional<double>(m.*field); });
}

std::vector<RankedNode> risers(const NodeMetricsTable& t, std::size_t k) {
    return ranked(t, k, true, [](const NodeMetrics& m) {
        return m.delta && *m.delta > 0.0 ? m.delta : std::nullopt;
    });
}

std::vector<RankedNode> fallers(const NodeMetricsTable& t, std::size_t k) {
    return ranked(t, k, false, [](const NodeMetrics& m) {
        return m.delta && *m.delta < 0.0 ? m.delta : std::nullopt;
    });
}

void print_report(std::ostream& out, const AnalysisSummary& s, const NodeMetricsTable& t, std::size_t k) {
    auto section = [&](const std::string& title, const std::vector<RankedNode>& rows) {
        out << '\n' << title << '\n';
        if (rows.empty()) out << "  (none)\n";
        for (std::size_t i = 0; i < rows.size(); ++i)
            out << "  " << std::setw(2) << i + 1 << ". " << rows[i].label << "  " << format_double(rows[i].value)
                << '\n';
    };
    if (s.nodes == 0) out << "warning: the graph is empty\n";
    out << "nodes:              " << s.nodes << '\n'
        << "edges:              " << s.edges << '\n'
        << "clusters:           " << s.clusters << '\n'
        << "modularity Q:       " << format_double(s.modularity_q) << '\n'
        << "mean intra-cluster: " << format_double(s.mean_intra_share) << '\n'
        << "resolution / seed:  " << format_double(s.resolution) << " / " << s.seed << '\n';
    if (s.delta_periods)
        out << "delta:              " << s.delta_periods->first << " -> " << s.delta_periods->second << " ("
            << s.delta_mode << ")\n";
    section("top " + std::to_string(k) + " by weighted degree", top_k(t, k, &NodeMetrics::weighted_degree));
    section("top " + std::to_string(k) + " by eigenvector centrality", top_k(t, k, &NodeMetrics::eigenvector));
    if (t.has_delta) {
        section("fastest risers", risers(t, k));
        section("fastest fallers", fallers(t, k));
    }
    for (const auto& w : s.warnings) out << "warning: " << w << '\n';
}

} // namespace techmap::report
