#include "techmap/analyze.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace techmap::analyze {

namespace {

void check_cover(const TechnologyGraph& g, const ClusterAssignment& clusters) {
    if (clusters.membership.size() != g.node_count()) throw DataError("cluster assignment does not cover the graph");
    for (int c : clusters.membership)
        if (c < 0) throw DataError("negative cluster id in assignment");
}

} // namespace

IntraClusterShare intra_cluster_share(const TechnologyGraph& g, const ClusterAssignment& clusters) {
    check_cover(g, clusters);
    const auto& m = clusters.membership;
    std::vector<double> total(g.node_count(), 0.0), inside(g.node_count(), 0.0);
    for (const auto& e : g.edges()) {
        const double w = e.weight();
        total[e.u] += w;
        total[e.v] += w;
        if (m[e.u] == m[e.v]) {
            inside[e.u] += w;
            inside[e.v] += w;
        }
    }
    IntraClusterShare out;
    out.per_node.resize(g.node_count());
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t v = 0; v < g.node_count(); ++v) {
        if (!(total[v] > 0.0)) continue;
        out.per_node[v] = inside[v] / total[v];
        sum += *out.per_node[v];
        ++counted;
    }
    out.mean = counted ? sum / static_cast<double>(counted) : 0.0;
    return out;
}

std::vector<double> cluster_sizes(const TechnologyGraph& g, const ClusterAssignment& clusters) {
    check_cover(g, clusters);
    std::vector<double> size(static_cast<std::size_t>(clusters.cluster_count()), 0.0);
    const auto deg = weighted_degree(g);
    for (std::size_t v = 0; v < g.node_count(); ++v) size[clusters.membership[v]] += deg[v];
    return size;
}

namespace {

std::vector<LinkShare> link_shares(const Adjacency& adj, const std::vector<int>& membership,
                                   const std::vector<double>& sizes, NodeId node) {
    std::vector<LinkShare> out(sizes.size());
    double total = 0.0;
    for (std::size_t k = adj.offsets[node]; k < adj.offsets[node + 1]; ++k) {
        out[membership[adj.targets[k]]].share += adj.weights[k];
        total += adj.weights[k];
    }
    if (!(total > 0.0)) return std::vector<LinkShare>(sizes.size());
    for (std::size_t c = 0; c < out.size(); ++c) {
        out[c].share /= total;
        out[c].size_normalized = sizes[c] > 0.0 ? out[c].share / sizes[c] : 0.0;
    }
    return out;
}

} // namespace

std::vector<LinkShare> cluster_link_shares(const TechnologyGraph& g, const ClusterAssignment& clusters, NodeId node) {
    if (node >= g.node_count()) throw DataError("unknown node id " + std::to_string(node));
    const auto sizes = cluster_sizes(g, clusters);
    return link_shares(Adjacency::from(g), clusters.membership, sizes, node);
}

std::string to_string(Tier t) { return t == Tier::strong ? "strong" : "medium"; }

std::vector<Bridge> bridging_technologies(const TechnologyGraph& g, const ClusterAssignment& clusters,
                                          const BridgingThresholds& thresholds) {
    if (!(thresholds.medium > 0.0) || !(thresholds.medium < thresholds.strong))
        throw ConfigError({"bridging thresholds need 0 < medium < strong"});
    const auto sizes = cluster_sizes(g, clusters);
    const auto adj = Adjacency::from(g);
    std::vector<Bridge> out;
    for (NodeId v = 0; v < g.node_count(); ++v) {
        const auto shares = link_shares(adj, clusters.membership, sizes, v);
        const int own = clusters.membership[v];
        const double own_norm = shares[own].size_normalized;
        for (std::size_t c = 0; c < shares.size(); ++c) {
            if (static_cast<int>(c) == own || !(shares[c].share > 0.0)) continue;
            const double ratio = own_norm > 0.0 ? shares[c].size_normalized / own_norm
                                                : std::numeric_limits<double>::infinity();
            if (ratio >= thresholds.strong) out.push_back({v, static_cast<int>(c), Tier::strong, ratio});
            else if (ratio >= thresholds.medium) out.push_back({v, static_cast<int>(c), Tier::medium, ratio});
        }
    }
    return out;
}

std::string to_string(RIBin b) {
    switch (b) {
    case RIBin::low: return "low";
    case RIBin::mid: return "mid";
    case RIBin::high: return "high";
    case RIBin::self: return "self";
    }
    return "self";
}

RIMatrix cluster_ri_matrix(const TechnologyGraph& g, const ClusterAssignment& clusters) {
    RIMatrix r;
    r.sizes = cluster_sizes(g, clusters);
    const std::size_t k = r.sizes.size();
    r.weight.assign(k, std::vector<double>(k, 0.0));
    r.ri.assign(k, std::vector<double>(k, 0.0));
    r.bins.assign(k, std::vector<RIBin>(k, RIBin::self));
    const auto& m = clusters.membership;
    for (const auto& e : g.edges()) {
        const auto a = static_cast<std::size_t>(m[e.u]), b = static_cast<std::size_t>(m[e.v]);
        r.weight[a][b] += e.weight();
        if (a != b) r.weight[b][a] += e.weight();
    }
    std::vector<double> values;
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) {
            const double denom = r.sizes[a] * r.sizes[b];
            const double v = denom > 0.0 ? r.weight[a][b] / denom : 0.0;
            r.ri[a][b] = r.ri[b][a] = v;
            values.push_back(v);
        }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) {
            const auto rank = static_cast<std::size_t>(std::lower_bound(values.begin(), values.end(), r.ri[a][b]) - values.begin());
            const std::size_t t = 3 * rank / n;
            r.bins[a][b] = r.bins[b][a] = t == 0 ? RIBin::low : t == 1 ? RIBin::mid : RIBin::high;
        }
    return r;
}

// ---------------------------------------------------------------------------

namespace {

// Full-graph id for each node of a slice.
std::vector<NodeId> to_full(const TechnologyGraph& full, const TechnologyGraph& part) {
    std::vector<NodeId> ids;
    ids.reserve(part.node_count());
    for (const auto& n : part.nodes()) {
        auto id = full.find(n.label);
        if (!id) throw DataError("slice node \"" + n.label + "\" missing from the full graph");
        ids.push_back(*id);
    }
    return ids;
}

TrendSeries empty_series(const TechnologyGraph& g, std::size_t clusters) {
    TrendSeries t;
    t.periods = g.scheme().periods();
    t.shares.assign(t.periods.size(), std::vector<double>(clusters, 0.0));
    t.node_degree.assign(t.periods.size(), std::vector<double>(g.node_count(), 0.0));
    t.empty.assign(t.periods.size(), true);
    return t;
}

} // namespace

TrendSeries cluster_share_timeseries(const TechnologyGraph& g, const ClusterAssignment& clusters,
                                     graph::SemanticRelation relation) {
    check_cover(g, clusters);
    auto t = empty_series(g, static_cast<std::size_t>(clusters.cluster_count()));
    for (std::size_t p = 0; p < t.periods.size(); ++p) {
        const auto part = graph::slice(g, std::vector<std::size_t>{p}, relation);
        const auto ids = to_full(g, part);
        const auto deg = weighted_degree(part);
        const double total = std::accumulate(deg.begin(), deg.end(), 0.0);
        for (std::size_t v = 0; v < deg.size(); ++v) t.node_degree[p][ids[v]] = deg[v];
        if (!(total > 0.0)) continue;
        t.empty[p] = false;
        for (std::size_t v = 0; v < deg.size(); ++v) t.shares[p][clusters.membership[ids[v]]] += deg[v];
        for (auto& s : t.shares[p]) s /= total;
    }
    return t;
}

TrendSeries cluster_share_timeseries_reclustered(const TechnologyGraph& g, const ClusterAssignment& clusters,
                                                 double resolution, std::uint64_t seed,
                                                 graph::SemanticRelation relation) {
    check_cover(g, clusters);
    const auto k = static_cast<std::size_t>(clusters.cluster_count());
    auto t = empty_series(g, k);
    for (std::size_t p = 0; p < t.periods.size(); ++p) {
        const auto part = graph::slice(g, std::vector<std::size_t>{p}, relation);
        const auto ids = to_full(g, part);
        const auto deg = weighted_degree(part);
        const double total = std::accumulate(deg.begin(), deg.end(), 0.0);
        for (std::size_t v = 0; v < deg.size(); ++v) t.node_degree[p][ids[v]] = deg[v];
        if (!(total > 0.0)) continue;
        t.empty[p] = false;
        const auto local = louvain(part, resolution, seed);
        const auto lk = static_cast<std::size_t>(local.cluster_count());
        // overlap[local][full] in slice degree
        std::vector<std::vector<double>> overlap(lk, std::vector<double>(k, 0.0));
        std::vector<double> local_sum(lk, 0.0);
        for (std::size_t v = 0; v < deg.size(); ++v) {
            overlap[local.membership[v]][clusters.membership[ids[v]]] += deg[v];
            local_sum[local.membership[v]] += deg[v];
        }
        for (std::size_t c = 0; c < lk; ++c) {
            const auto target = static_cast<std::size_t>(
                std::max_element(overlap[c].begin(), overlap[c].end()) - overlap[c].begin());
            t.shares[p][target] += local_sum[c] / total;
        }
    }
    return t;
}

DeltaMode parse_delta_mode(const std::string& name) {
    if (name == "window") return DeltaMode::window;
    if (name == "cumulative") return DeltaMode::cumulative;
    throw ConfigError({"unknown delta mode \"" + name + "\" (expected window or cumulative)"});
}

TechnologyGraph period_graph(const TechnologyGraph& g, std::size_t period, DeltaMode mode,
                             graph::SemanticRelation relation) {
    std::vector<std::size_t> periods;
    if (mode == DeltaMode::cumulative)
        for (std::size_t p = 0; p < period; ++p) periods.push_back(p);
    periods.push_back(period);
    return graph::slice(g, periods, relation);
}

std::vector<double> mapped_eigenvector(const TechnologyGraph& full, const TechnologyGraph& part,
                                       const EigenvectorOptions& options) {
    std::vector<double> out(full.node_count(), 0.0);
    if (part.empty()) return out;
    const auto ids = to_full(full, part);
    const auto ev = eigenvector_centrality(part, options);
    for (std::size_t v = 0; v < ids.size(); ++v) out[ids[v]] = ev.values[v];
    return out;
}

std::vector<double> centrality_delta(const TechnologyGraph& g, std::size_t period_a, std::size_t period_b,
                                     DeltaMode mode, const EigenvectorOptions& options,
                                     graph::SemanticRelation relation) {
    const auto a = mapped_eigenvector(g, period_graph(g, period_a, mode, relation), options);
    const auto b = mapped_eigenvector(g, period_graph(g, period_b, mode, relation), options);
    std::vector<double> out(g.node_count());
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = b[v] - a[v];
    return out;
}

// ---------------------------------------------------------------------------

AnalysisReport analyze_graph(const TechnologyGraph& g, const AnalysisOptions& options) {
    AnalysisReport r;
    auto& diag = r.diagnostics;
    const auto& scheme = g.scheme();
    r.weighted_degree = weighted_degree(g);

    if (g.empty()) {
        diag.warn("graph has no nodes; analysis outputs are empty");
        r.trends = empty_series(g, 0);
        return r;
    }
    r.eigenvector = eigenvector_centrality(g, options.eigenvector);
    if (g.edge_count() == 0) {
        diag.warn("graph has no edges; every node forms its own cluster");
        r.clusters = singleton_clusters(g, options.resolution, options.seed);
    } else {
        r.clusters = louvain(g, options.resolution, options.seed);
    }
    r.intra = intra_cluster_share(g, r.clusters);
    r.bridges = bridging_technologies(g, r.clusters, options.bridging);
    r.ri = cluster_ri_matrix(g, r.clusters);
    r.trends = options.recluster_periods
                   ? cluster_share_timeseries_reclustered(g, r.clusters, options.resolution, options.seed,
                                                          options.relation)
                   : cluster_share_timeseries(g, r.clusters, options.relation);
    for (std::size_t p = 0; p < r.trends.periods.size(); ++p)
        if (r.trends.empty[p]) diag.warn("period " + r.trends.periods[p].label() + " has no links");

    for (std::size_t p = 0; p < scheme.size(); ++p)
        r.period_eigenvector.push_back(
            mapped_eigenvector(g, graph::slice(g, std::vector<std::size_t>{p}, options.relation), options.eigenvector));

    if (options.delta_from || options.delta_to) {
        if (!options.delta_from || !options.delta_to)
            throw ConfigError({"delta_from and delta_to must be given together"});
        if (*options.delta_from >= scheme.size() || *options.delta_to >= scheme.size())
            throw ConfigError({"delta period index out of range (scheme has " + std::to_string(scheme.size()) +
                               " periods)"});
        r.delta_periods = std::make_pair(*options.delta_from, *options.delta_to);
    } else if (scheme.size() >= 2) {
        r.delta_periods = std::make_pair(scheme.size() - 2, scheme.size() - 1);
    } else {
        diag.warn("fewer than two periods; no centrality delta");
    }
    if (r.delta_periods) {
        const auto [a, b] = *r.delta_periods;
        if (options.delta_mode == DeltaMode::window) {
            r.delta.resize(g.node_count());
            for (std::size_t v = 0; v < g.node_count(); ++v)
                r.delta[v] = r.period_eigenvector[b][v] - r.period_eigenvector[a][v];
        } else {
            r.delta = centrality_delta(g, a, b, DeltaMode::cumulative, options.eigenvector, options.relation);
        }
    }
    return r;
}

} // namespace techmap::analyze
