#include "techmap/analyze.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <random>

namespace techmap::analyze {

int ClusterAssignment::cluster_count() const {
    int m = -1;
    for (int c : membership) m = std::max(m, c);
    return m + 1;
}

std::vector<std::vector<NodeId>> ClusterAssignment::members() const {
    std::vector<std::vector<NodeId>> out(static_cast<std::size_t>(cluster_count()));
    for (std::size_t v = 0; v < membership.size(); ++v) out[static_cast<std::size_t>(membership[v])].push_back(static_cast<NodeId>(v));
    return out;
}

double modularity(const TechnologyGraph& g, const std::vector<int>& membership, double resolution) {
    if (membership.size() != g.node_count()) throw DataError("cluster assignment does not cover the graph");
    int k = 0;
    for (int c : membership) k = std::max(k, c + 1);
    std::vector<double> in(static_cast<std::size_t>(k), 0.0), tot(static_cast<std::size_t>(k), 0.0);
    double m2 = 0.0;
    for (const auto& e : g.edges()) {
        const double w = e.weight();
        m2 += 2.0 * w;
        tot[membership[e.u]] += w;
        tot[membership[e.v]] += w;
        if (membership[e.u] == membership[e.v]) in[membership[e.u]] += 2.0 * w;
    }
    if (m2 <= 0.0) return 0.0;
    double q = 0.0;
    for (int c = 0; c < k; ++c) q += in[c] / m2 - resolution * (tot[c] / m2) * (tot[c] / m2);
    return q;
}

namespace {

// Weighted graph of communities. `loop` holds A_ii (twice the internal weight).
struct Level {
    std::vector<std::vector<std::pair<int, double>>> adj; // excludes self loops
    std::vector<double> loop;
    std::vector<double> k;

    std::size_t size() const { return adj.size(); }
};

// Uniform integer in [0, bound) without modulo bias; std distributions are
// implementation-defined, so results would differ across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do x = rng(); while (x >= limit);
    return x % bound;
}

std::vector<int> shuffled(std::size_t n, std::mt19937_64& rng) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[bounded(rng, i)]);
    return order;
}

// One local-moving phase. Returns true if any node changed community.
bool local_moves(const Level& lv, double resolution, double m2, std::mt19937_64& rng, std::vector<int>& comm) {
    const std::size_t n = lv.size();
    comm.resize(n);
    std::iota(comm.begin(), comm.end(), 0);
    std::vector<double> tot = lv.k;
    std::vector<double> link(n, 0.0);
    std::vector<int> touched;
    const auto order = shuffled(n, rng);
    bool any = false;

    for (bool moved = true; moved;) {
        moved = false;
        for (int i : order) {
            const double ki = lv.k[i];
            touched.clear();
            for (const auto& [j, w] : lv.adj[i]) {
                const int c = comm[j];
                if (link[c] == 0.0) touched.push_back(c);
                link[c] += w;
            }
            const int old = comm[i];
            tot[old] -= ki;
            const double eps = 1e-12 * (ki > 0.0 ? ki : 1.0);
            double best_gain = link[old] - resolution * tot[old] * ki / m2;
            int best = old;
            std::sort(touched.begin(), touched.end());
            for (int c : touched) {
                if (c == old) continue;
                const double gain = link[c] - resolution * tot[c] * ki / m2;
                // candidates ascend, so an equal gain keeps the lower id
                if (gain > best_gain + eps) {
                    best_gain = gain;
                    best = c;
                }
            }
            tot[best] += ki;
            comm[i] = best;
            for (int c : touched) link[c] = 0.0;
            if (best != old) moved = any = true;
        }
    }
    return any;
}

Level aggregate(const Level& lv, const std::vector<int>& comm, int count) {
    Level out;
    out.adj.resize(static_cast<std::size_t>(count));
    out.loop.assign(static_cast<std::size_t>(count), 0.0);
    out.k.assign(static_cast<std::size_t>(count), 0.0);
    std::vector<std::map<int, double>> acc(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < lv.size(); ++i) {
        const int ci = comm[i];
        out.loop[ci] += lv.loop[i];
        out.k[ci] += lv.k[i];
        for (const auto& [j, w] : lv.adj[i]) {
            const int cj = comm[j];
            if (cj == ci) out.loop[ci] += w; // seen from both ends: 2 x internal weight
            else acc[ci][cj] += w;
        }
    }
    for (int c = 0; c < count; ++c) out.adj[c].assign(acc[c].begin(), acc[c].end());
    return out;
}

// Relabel so ids follow descending total weighted degree, ties by smallest member.
std::vector<int> canonical_order(const TechnologyGraph& g, const std::vector<int>& membership) {
    int k = 0;
    for (int c : membership) k = std::max(k, c + 1);
    const auto deg = weighted_degree(g);
    std::vector<double> size(static_cast<std::size_t>(k), 0.0);
    std::vector<std::size_t> first(static_cast<std::size_t>(k), membership.size());
    for (std::size_t v = 0; v < membership.size(); ++v) {
        size[membership[v]] += deg[v];
        first[membership[v]] = std::min(first[membership[v]], v);
    }
    std::vector<int> ids;
    for (int c = 0; c < k; ++c)
        if (first[c] < membership.size()) ids.push_back(c);
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
        if (size[a] != size[b]) return size[a] > size[b];
        return first[a] < first[b];
    });
    std::vector<int> rename(static_cast<std::size_t>(k), -1);
    for (std::size_t r = 0; r < ids.size(); ++r) rename[ids[r]] = static_cast<int>(r);
    std::vector<int> out(membership.size());
    for (std::size_t v = 0; v < membership.size(); ++v) out[v] = rename[membership[v]];
    return out;
}

} // namespace

ClusterAssignment louvain(const TechnologyGraph& g, double resolution, std::uint64_t seed) {
    if (g.edge_count() == 0) throw DataError("louvain needs at least one edge");
    if (!(resolution > 0.0)) throw ConfigError({"resolution must be positive"});

    Level lv;
    lv.adj.resize(g.node_count());
    lv.loop.assign(g.node_count(), 0.0);
    lv.k.assign(g.node_count(), 0.0);
    double m2 = 0.0;
    for (const auto& e : g.edges()) {
        const double w = e.weight();
        lv.adj[e.u].emplace_back(static_cast<int>(e.v), w);
        lv.adj[e.v].emplace_back(static_cast<int>(e.u), w);
        lv.k[e.u] += w;
        lv.k[e.v] += w;
        m2 += 2.0 * w;
    }

    ClusterAssignment out;
    out.resolution = resolution;
    out.seed = seed;
    out.membership.resize(g.node_count());
    std::iota(out.membership.begin(), out.membership.end(), 0);

    std::mt19937_64 rng(seed);
    std::vector<int> comm;
    while (local_moves(lv, resolution, m2, rng, comm)) {
        // dense ids in order of first appearance
        std::vector<int> dense(lv.size(), -1);
        int count = 0;
        for (auto& c : comm) {
            if (dense[c] < 0) dense[c] = count++;
            c = dense[c];
        }
        for (auto& c : out.membership) c = comm[c];
        out.level_modularity.push_back(modularity(g, out.membership, resolution));
        if (count == static_cast<int>(lv.size())) break;
        lv = aggregate(lv, comm, count);
    }

    out.membership = canonical_order(g, out.membership);
    out.modularity_q = modularity(g, out.membership, resolution);
    if (out.level_modularity.empty()) out.level_modularity.push_back(out.modularity_q);
    return out;
}

ClusterAssignment singleton_clusters(const TechnologyGraph& g, double resolution, std::uint64_t seed) {
    ClusterAssignment out;
    out.resolution = resolution;
    out.seed = seed;
    out.membership.resize(g.node_count());
    std::iota(out.membership.begin(), out.membership.end(), 0);
    out.modularity_q = modularity(g, out.membership, resolution);
    out.level_modularity.push_back(out.modularity_q);
    return out;
}

} // namespace techmap::analyze
