#pragma once

#include "techmap/analyze.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace techmap::report {

using analyze::AnalysisReport;
using graph::TechnologyGraph;

/// One row of the node metrics table, keyed by label.
struct NodeMetrics {
    std::string label;
    int cluster = 0;
    double weighted_degree = 0.0;
    double eigenvector = 0.0;
    std::optional<double> intra_share;
    std::vector<double> period_degree;
    std::vector<double> period_eigenvector;
    std::optional<double> delta;

    bool operator==(const NodeMetrics&) const = default;
};

struct NodeMetricsTable {
    std::vector<std::string> periods; // period labels
    bool has_delta = false;
    std::vector<NodeMetrics> rows;    // by node id

    bool operator==(const NodeMetricsTable&) const = default;
};

NodeMetricsTable node_metrics(const TechnologyGraph& g, const AnalysisReport& r);

/// label,cluster,weighted_degree,eigenvector,intra_share,deg_<p>...,ev_<p>...,delta
void write_node_metrics_csv(std::ostream& out, const NodeMetricsTable& t, const std::string& comment = {});
NodeMetricsTable read_node_metrics_csv(std::istream& in, const std::string& source = "<node_metrics>");

/// cluster_a,cluster_b,weight,size_a,size_b,ri,bin
void write_ri_csv(std::ostream& out, const analyze::RIMatrix& m, const std::string& comment = {});
/// period,empty,cluster_0,...
void write_trends_csv(std::ostream& out, const analyze::TrendSeries& t, std::size_t clusters,
                      const std::string& comment = {});
/// label,cluster,foreign_cluster,tier,ratio
void write_bridging_csv(std::ostream& out, const TechnologyGraph& g, const analyze::ClusterAssignment& c,
                        const std::vector<analyze::Bridge>& bridges, const std::string& comment = {});

/// Scalar results of an analysis (modularity, counts, options used).
struct AnalysisSummary {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    int clusters = 0;
    double modularity_q = 0.0;
    std::vector<double> level_modularity;
    double resolution = 1.0;
    std::uint64_t seed = 0;
    double mean_intra_share = 0.0;
    int eigenvector_iterations = 0;
    double eigenvector_residual = 0.0;
    std::optional<std::pair<std::string, std::string>> delta_periods;
    std::string delta_mode;
    std::vector<std::string> warnings;
};

AnalysisSummary summarize(const TechnologyGraph& g, const AnalysisReport& r, const analyze::AnalysisOptions& o);
void write_summary_json(std::ostream& out, const AnalysisSummary& s);
AnalysisSummary read_summary_json(std::istream& in, const std::string& source = "<summary>");

struct RankedNode {
    std::string label;
    double value = 0.0;
};

/// Top k rows by value descending, ties by label ascending.
std::vector<RankedNode> top_k(const NodeMetricsTable& t, std::size_t k, double NodeMetrics::*field);
/// Largest positive and most negative deltas.
std::vector<RankedNode> risers(const NodeMetricsTable& t, std::size_t k);
std::vector<RankedNode> fallers(const NodeMetricsTable& t, std::size_t k);

/// Human-readable summary for the report command.
void print_report(std::ostream& out, const AnalysisSummary& s, const NodeMetricsTable& t, std::size_t k = 10);

} // namespace techmap::report
