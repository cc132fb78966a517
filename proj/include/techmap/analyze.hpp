#pragma once

#include "techmap/error.hpp"
#include "techmap/graph.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace techmap::analyze {

using graph::NodeId;
using graph::TechnologyGraph;

/// Symmetric adjacency in CSR form over combined (cooc + semantic) weights.
struct Adjacency {
    std::vector<std::size_t> offsets; // size n + 1
    std::vector<NodeId> targets;
    std::vector<double> weights;

    std::size_t size() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
    static Adjacency from(const TechnologyGraph& g);
};

/// Sum of combined incident edge weights per node.
std::vector<double> weighted_degree(const TechnologyGraph& g);

// ---------------------------------------------------------------------------
// Eigenvector centrality

struct EigenvectorOptions {
    double tol = 1e-9;
    int max_iter = 10000;
    /// Normalize each connected component separately instead of globally.
    bool per_component = false;
};

struct EigenvectorResult {
    std::vector<double> values; // max-normalized to 1
    int iterations = 0;
    double residual = 0.0;
};

/// Power iteration on A + I (same eigenvectors as A, no oscillation on
/// bipartite graphs) from a uniform start, max-normalized every step, until
/// successive iterates differ by less than tol in max-norm. Throws DataError
/// on an empty graph and NumericalError when max_iter is exhausted.
EigenvectorResult eigenvector_centrality(const TechnologyGraph& g, const EigenvectorOptions& options = {});

// ---------------------------------------------------------------------------
// Communities

struct ClusterAssignment {
    std::vector<int> membership; // node id -> cluster id (0 = largest by weighted degree)
    double modularity_q = 0.0;
    double resolution = 1.0;
    std::uint64_t seed = 0;
    /// Modularity after each aggregation level.
    std::vector<double> level_modularity;

    int cluster_count() const;
    std::vector<std::vector<NodeId>> members() const;
};

/// Q = sum_c [ in_c / 2m - resolution * (tot_c / 2m)^2 ].
double modularity(const TechnologyGraph& g, const std::vector<int>& membership, double resolution = 1.0);

/// Two-phase Louvain: seeded node order, moves to the neighbouring community
/// with the largest positive gain (ties to the lowest community id), then
/// aggregation, until a level makes no move. Throws DataError on an edgeless
/// graph.
ClusterAssignment louvain(const TechnologyGraph& g, double resolution = 1.0, std::uint64_t seed = 42);

/// Every node in its own cluster; used when the graph has no edges.
ClusterAssignment singleton_clusters(const TechnologyGraph& g, double resolution, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Cluster relations

struct IntraClusterShare {
    std::vector<std::optional<double>> per_node; // nullopt for isolated nodes
    double mean = 0.0;                           // over non-isolated nodes
};

IntraClusterShare intra_cluster_share(const TechnologyGraph& g, const ClusterAssignment& clusters);

/// Cluster size = sum of member weighted degrees.
std::vector<double> cluster_sizes(const TechnologyGraph& g, const ClusterAssignment& clusters);

struct LinkShare {
    double share = 0.0;
    double size_normalized = 0.0;
};

/// Indexed by cluster id. All zeros for an isolated node.
std::vector<LinkShare> cluster_link_shares(const TechnologyGraph& g, const ClusterAssignment& clusters, NodeId node);

enum class Tier { strong, medium };
std::string to_string(Tier t);

struct BridgingThresholds {
    double strong = 0.5;
    double medium = 0.25;
};

struct Bridge {
    NodeId node = 0;
    int cluster = 0; // foreign cluster
    Tier tier = Tier::medium;
    /// Foreign size-normalized share over own-cluster size-normalized share.
    double ratio = 0.0;
};

/// Ordered by node id, then cluster id.
std::vector<Bridge> bridging_technologies(const TechnologyGraph& g, const ClusterAssignment& clusters,
                                          const BridgingThresholds& thresholds = {});

enum class RIBin { low, mid, high, self };
std::string to_string(RIBin b);

struct RIMatrix {
    std::vector<double> sizes;
    std::vector<std::vector<double>> weight; // W(A,B); diagonal holds internal weight
    std::vector<std::vector<double>> ri;     // W(A,B) / (size A * size B); diagonal 0
    std::vector<std::vector<RIBin>> bins;

    std::size_t size() const noexcept { return sizes.size(); }
};

/// Off-diagonal bins are terciles of the pairwise ri values by rank (tied
/// values share the bin of their first rank).
RIMatrix cluster_ri_matrix(const TechnologyGraph& g, const ClusterAssignment& clusters);

// ---------------------------------------------------------------------------
// Time

struct TrendSeries {
    std::vector<graph::Period> periods;
    std::vector<std::vector<double>> shares;       // [period][cluster]
    std::vector<std::vector<double>> node_degree;  // [period][full-graph node id]
    std::vector<bool> empty;                       // period had no weight
};

/// Per period: slice, weighted degree on the slice, summed per full-graph
/// cluster and divided by the slice's total degree.
TrendSeries cluster_share_timeseries(const TechnologyGraph& g, const ClusterAssignment& clusters,
                                     graph::SemanticRelation relation = graph::SemanticRelation::prefix_suffix);

/// Sensitivity variant: each slice is clustered on its own and every slice
/// cluster is credited to the full-graph cluster holding most of its degree.
TrendSeries cluster_share_timeseries_reclustered(const TechnologyGraph& g, const ClusterAssignment& clusters,
                                                 double resolution, std::uint64_t seed,
                                                 graph::SemanticRelation relation =
                                                     graph::SemanticRelation::prefix_suffix);

enum class DeltaMode { window, cumulative };
DeltaMode parse_delta_mode(const std::string& name);

/// Slice for one period index; cumulative mode includes all earlier periods.
TechnologyGraph period_graph(const TechnologyGraph& g, std::size_t period, DeltaMode mode,
                             graph::SemanticRelation relation = graph::SemanticRelation::prefix_suffix);

/// Eigenvector centrality of a sub-graph mapped back to the full graph's node
/// ids; nodes absent from the sub-graph read 0.
std::vector<double> mapped_eigenvector(const TechnologyGraph& full, const TechnologyGraph& part,
                                       const EigenvectorOptions& options = {});

/// ev_b - ev_a per full-graph node, each computed on its own slice.
std::vector<double> centrality_delta(const TechnologyGraph& g, std::size_t period_a, std::size_t period_b,
                                     DeltaMode mode = DeltaMode::window, const EigenvectorOptions& options = {},
                                     graph::SemanticRelation relation = graph::SemanticRelation::prefix_suffix);

// ---------------------------------------------------------------------------
// Everything at once

struct AnalysisOptions {
    double resolution = 1.0;
    std::uint64_t seed = 42;
    EigenvectorOptions eigenvector;
    BridgingThresholds bridging;
    DeltaMode delta_mode = DeltaMode::window;
    /// Period indices for the centrality delta; default: last two periods.
    std::optional<std::size_t> delta_from;
    std::optional<std::size_t> delta_to;
    graph::SemanticRelation relation = graph::SemanticRelation::prefix_suffix;
    bool recluster_periods = false;
};

struct AnalysisReport {
    ClusterAssignment clusters;
    std::vector<double> weighted_degree;
    EigenvectorResult eigenvector;
    IntraClusterShare intra;
    std::vector<Bridge> bridges;
    RIMatrix ri;
    TrendSeries trends;
    std::vector<std::vector<double>> period_eigenvector; // [period][node]
    std::optional<std::pair<std::size_t, std::size_t>> delta_periods;
    std::vector<double> delta; // empty when fewer than two periods
    Diagnostics diagnostics;
};

AnalysisReport analyze_graph(const TechnologyGraph& g, const AnalysisOptions& options = {});

} // namespace techmap::analyze
