#include "techmap/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace techmap::analyze {

Adjacency Adjacency::from(const TechnologyGraph& g) {
    const std::size_t n = g.node_count();
    Adjacency a;
    a.offsets.assign(n + 1, 0);
    for (const auto& e : g.edges()) {
        ++a.offsets[e.u + 1];
        ++a.offsets[e.v + 1];
    }
    std::partial_sum(a.offsets.begin(), a.offsets.end(), a.offsets.begin());
    a.targets.resize(a.offsets[n]);
    a.weights.resize(a.offsets[n]);
    std::vector<std::size_t> fill(a.offsets.begin(), a.offsets.end() - 1);
    for (const auto& e : g.edges()) {
        const double w = e.weight();
        a.targets[fill[e.u]] = e.v;
        a.weights[fill[e.u]++] = w;
        a.targets[fill[e.v]] = e.u;
        a.weights[fill[e.v]++] = w;
    }
    return a;
}

std::vector<double> weighted_degree(const TechnologyGraph& g) {
    std::vector<double> deg(g.node_count(), 0.0);
    for (const auto& e : g.edges()) {
        deg[e.u] += e.weight();
        deg[e.v] += e.weight();
    }
    return deg;
}

namespace {

// Power iteration on (A + I) restricted to `nodes`; writes into `out`.
void power_iterate(const Adjacency& adj, const std::vector<NodeId>& nodes, const EigenvectorOptions& opt,
                   std::vector<double>& out, EigenvectorResult& stats) {
    const std::size_t n = adj.size();
    std::vector<double> x(n, 0.0), y(n, 0.0);
    for (auto v : nodes) x[v] = 1.0;
    double diff = 0.0;
    for (int it = 1; it <= opt.max_iter; ++it) {
        double peak = 0.0;
        for (auto v : nodes) {
            double s = x[v];
            for (std::size_t k = adj.offsets[v]; k < adj.offsets[v + 1]; ++k) s += adj.weights[k] * x[adj.targets[k]];
            y[v] = s;
            peak = std::max(peak, s);
        }
        diff = 0.0;
        for (auto v : nodes) {
            y[v] /= peak;
            diff = std::max(diff, std::abs(y[v] - x[v]));
        }
        std::swap(x, y);
        if (diff < opt.tol) {
            // exact max of 1 after the final rescale
            double m = 0.0;
            for (auto v : nodes) m = std::max(m, x[v]);
            for (auto v : nodes) out[v] = x[v] / m;
            stats.iterations = std::max(stats.iterations, it);
            stats.residual = std::max(stats.residual, diff);
            return;
        }
    }
    throw NumericalError("eigenvector centrality did not converge after " + std::to_string(opt.max_iter) +
                             " iterations",
                         diff);
}

} // namespace

EigenvectorResult eigenvector_centrality(const TechnologyGraph& g, const EigenvectorOptions& options) {
    if (g.empty()) throw DataError("eigenvector centrality of an empty graph");
    if (!(options.tol > 0.0) || options.max_iter < 1)
        throw ConfigError({"eigenvector tol must be positive and max_iter at least 1"});
    const auto adj = Adjacency::from(g);
    EigenvectorResult r;
    r.values.assign(g.node_count(), 0.0);

    if (!options.per_component) {
        std::vector<NodeId> all(g.node_count());
        std::iota(all.begin(), all.end(), NodeId{0});
        power_iterate(adj, all, options, r.values, r);
        return r;
    }

    // isolated nodes stay at 0
    std::vector<int> seen(g.node_count(), 0);
    for (NodeId s = 0; s < g.node_count(); ++s) {
        if (seen[s] || adj.offsets[s] == adj.offsets[s + 1]) continue;
        std::vector<NodeId> comp{s};
        seen[s] = 1;
        for (std::size_t i = 0; i < comp.size(); ++i)
            for (std::size_t k = adj.offsets[comp[i]]; k < adj.offsets[comp[i] + 1]; ++k)
                if (!seen[adj.targets[k]]) {
                    seen[adj.targets[k]] = 1;
                    comp.push_back(adj.targets[k]);
                }
        std::sort(comp.begin(), comp.end());
        power_iterate(adj, comp, options, r.values, r);
    }
    return r;
}

} // namespace techmap::analyze
