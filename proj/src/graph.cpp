#include "techmap/graph.hpp"

#include "techmap/parallel.hpp"
#include "techmap/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace techmap::graph {

std::string Period::label() const { return std::to_string(start_year) + "-" + std::to_string(end_year); }

PeriodScheme::PeriodScheme(std::vector<Period> periods) : periods_(std::move(periods)) {
    for (std::size_t i = 0; i < periods_.size(); ++i) {
        if (periods_[i].end_year < periods_[i].start_year)
            throw ConfigError({"period " + periods_[i].label() + " ends before it starts"});
        if (i > 0 && periods_[i].start_year <= periods_[i - 1].end_year)
            throw ConfigError({"periods " + periods_[i - 1].label() + " and " + periods_[i].label() +
                               " overlap or are out of order"});
    }
}

PeriodScheme PeriodScheme::consecutive(int first_year, int last_year, int length) {
    if (length < 1) throw ConfigError({"period length must be at least 1 year"});
    std::vector<Period> p;
    for (int y = first_year; y <= last_year; y += length) p.push_back({y, std::min(last_year, y + length - 1)});
    return PeriodScheme(std::move(p));
}

std::size_t PeriodScheme::bucket(int year) const noexcept {
    for (std::size_t i = 0; i < periods_.size(); ++i)
        if (periods_[i].contains(year)) return i;
    return periods_.size();
}

std::optional<std::size_t> PeriodScheme::index_of(const Period& p) const noexcept {
    for (std::size_t i = 0; i < periods_.size(); ++i)
        if (periods_[i] == p) return i;
    return std::nullopt;
}

std::int64_t TermNode::total_occurrences() const {
    return std::accumulate(occurrences.begin(), occurrences.end(), std::int64_t{0});
}

std::string WeightedEdge::kind() const {
    if (is_cooccurrence() && is_semantic()) return "both";
    return is_semantic() ? "semantic" : "cooccurrence";
}

// ---------------------------------------------------------------------------

namespace {

std::uint64_t edge_key(NodeId a, NodeId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

} // namespace

TechnologyGraph::TechnologyGraph(PeriodScheme scheme) : scheme_(std::move(scheme)) {}

std::optional<NodeId> TechnologyGraph::find(const std::string& label) const {
    auto it = by_label_.find(label);
    if (it == by_label_.end()) return std::nullopt;
    return it->second;
}

const WeightedEdge* TechnologyGraph::edge(NodeId a, NodeId b) const {
    auto it = edge_index_.find(edge_key(a, b));
    return it == edge_index_.end() ? nullptr : &edges_[it->second];
}

double TechnologyGraph::total_cooc_weight() const {
    double s = 0;
    for (const auto& e : edges_) s += e.cooc_weight;
    return s;
}

double TechnologyGraph::total_semantic_weight() const {
    double s = 0;
    for (const auto& e : edges_) s += e.semantic_weight;
    return s;
}

NodeId TechnologyGraph::add_node(const std::string& label) {
    auto [it, inserted] = by_label_.emplace(label, static_cast<NodeId>(nodes_.size()));
    if (inserted) nodes_.push_back({it->second, label, std::vector<std::int64_t>(scheme_.buckets(), 0)});
    return it->second;
}

WeightedEdge& TechnologyGraph::edge_ref(NodeId a, NodeId b) {
    if (a == b) throw DataError("self-loop on node \"" + nodes_.at(a).label + "\"");
    if (a > b) std::swap(a, b);
    auto [it, inserted] = edge_index_.emplace(edge_key(a, b), edges_.size());
    if (inserted) {
        if (!edges_.empty() && (edges_.back().u > a || (edges_.back().u == a && edges_.back().v > b)))
            edges_sorted_ = false;
        edges_.push_back({a, b, 0.0, std::vector<double>(scheme_.buckets(), 0.0), 0.0});
    }
    return edges_[it->second];
}

void TechnologyGraph::add_cooccurrence(NodeId a, NodeId b, double weight, std::size_t bucket) {
    auto& e = edge_ref(a, b);
    e.cooc_weight += weight;
    e.period_cooc.at(bucket) += weight;
}

void TechnologyGraph::add_occurrence(NodeId n, std::size_t bucket) { ++nodes_.at(n).occurrences.at(bucket); }

void TechnologyGraph::set_semantic(NodeId a, NodeId b, double weight) { edge_ref(a, b).semantic_weight = weight; }

void TechnologyGraph::clear_semantic() {
    bool any_semantic_only = false;
    for (auto& e : edges_) {
        if (e.cooc_weight <= 0.0) any_semantic_only = true;
        e.semantic_weight = 0.0;
    }
    if (any_semantic_only) {
        edges_.erase(std::remove_if(edges_.begin(), edges_.end(), [](const WeightedEdge& e) { return e.weight() <= 0.0; }),
                     edges_.end());
        edge_index_.clear();
        for (std::size_t i = 0; i < edges_.size(); ++i) edge_index_.emplace(edge_key(edges_[i].u, edges_[i].v), i);
    }
    calibration_ = 0.0;
    semantic_pairs_ = 0;
}

void TechnologyGraph::set_calibration(double s, std::size_t pairs) {
    calibration_ = s;
    semantic_pairs_ = pairs;
}

void finalize(TechnologyGraph& g) {
    if (g.edges_sorted_) return;
    std::sort(g.edges_.begin(), g.edges_.end(),
              [](const WeightedEdge& x, const WeightedEdge& y) { return std::tie(x.u, x.v) < std::tie(y.u, y.v); });
    g.edge_index_.clear();
    for (std::size_t i = 0; i < g.edges_.size(); ++i) g.edge_index_.emplace(edge_key(g.edges_[i].u, g.edges_[i].v), i);
    g.edges_sorted_ = true;
}

TechnologyGraph TechnologyGraph::from_parts(PeriodScheme scheme, std::vector<TermNode> nodes,
                                            std::vector<WeightedEdge> edges, double calibration,
                                            std::size_t semantic_pairs) {
    TechnologyGraph g(std::move(scheme));
    const auto buckets = g.scheme_.buckets();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        auto& n = nodes[i];
        if (n.id != i) throw DataError("node ids must be dense and ordered");
        if (n.occurrences.size() != buckets) throw DataError("node \"" + n.label + "\" has wrong bucket count");
        if (!g.by_label_.emplace(n.label, n.id).second) throw DataError("duplicate node label \"" + n.label + "\"");
    }
    g.nodes_ = std::move(nodes);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        auto& e = edges[i];
        if (e.u >= e.v || e.v >= g.nodes_.size()) throw DataError("invalid edge endpoints");
        if (e.period_cooc.size() != buckets) throw DataError("edge has wrong bucket count");
        if (!(e.weight() > 0.0) || e.cooc_weight < 0.0 || e.semantic_weight < 0.0)
            throw DataError("edge weights must be nonnegative with a positive total");
        if (!g.edge_index_.emplace(edge_key(e.u, e.v), i).second) throw DataError("duplicate edge");
    }
    g.edges_ = std::move(edges);
    g.edges_sorted_ = false;
    finalize(g);
    g.calibration_ = calibration;
    g.semantic_pairs_ = semantic_pairs;
    return g;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<TermPair, double>> document_link_weights(const extract::DocumentTerms& terms) {
    const auto all = terms.terms();
    if (all.size() < 2) return {};
    std::vector<std::string> u(all.begin(), all.end());
    const std::size_t n = u.size();
    // raw counts in a dense upper triangle over the sorted term list
    std::vector<double> raw(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) raw[i * n + j] = 1.0;
    for (const auto& s : terms.sentences) {
        std::vector<std::size_t> idx;
        idx.reserve(s.size());
        for (const auto& t : s)
            idx.push_back(static_cast<std::size_t>(std::lower_bound(u.begin(), u.end(), t) - u.begin()));
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = a + 1; b < idx.size(); ++b) raw[idx[a] * n + idx[b]] += 1.0;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) total += raw[i * n + j];

    std::vector<std::pair<TermPair, double>> out;
    out.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out.push_back({{u[i], u[j]}, raw[i * n + j] / total});
    return out;
}

PeriodScheme scheme_for(const std::vector<extract::DocumentTerms>& docs, int length) {
    if (docs.empty()) return {};
    int lo = docs.front().year, hi = lo;
    for (const auto& d : docs) {
        lo = std::min(lo, d.year);
        hi = std::max(hi, d.year);
    }
    return PeriodScheme::consecutive(lo, hi, length);
}

TechnologyGraph build_cooccurrence(const std::vector<extract::DocumentTerms>& docs, const PeriodScheme& scheme,
                                   Diagnostics* diag, unsigned threads) {
    std::vector<std::vector<std::pair<TermPair, double>>> links(docs.size());
    parallel_for(docs.size(), threads, [&](std::size_t i) { links[i] = document_link_weights(docs[i]); });

    TechnologyGraph g(scheme);
    std::size_t overflow = 0;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        const auto& d = docs[i];
        const std::size_t bucket = scheme.bucket(d.year);
        if (bucket == scheme.size()) ++overflow;
        // nodes first, in the document's sorted term order
        for (const auto& t : d.terms()) g.add_occurrence(g.add_node(t), bucket);
        for (const auto& [pair, w] : links[i])
            g.add_cooccurrence(*g.find(pair.first), *g.find(pair.second), w, bucket);
    }
    if (overflow > 0 && diag)
        diag->warn(std::to_string(overflow) + " documents fall outside the period scheme (overflow bucket)");
    finalize(g);
    return g;
}

// ---------------------------------------------------------------------------

SemanticRelation parse_semantic_relation(const std::string& name) {
    const auto n = text::to_lower(name);
    if (n == "prefix_suffix") return SemanticRelation::prefix_suffix;
    if (n == "prefix") return SemanticRelation::prefix_only;
    if (n == "contiguous") return SemanticRelation::contiguous;
    throw ConfigError({"unknown semantic relation \"" + name + "\" (expected prefix_suffix, prefix or contiguous)"});
}

std::set<std::pair<NodeId, NodeId>> detect_semantic_pairs(const TechnologyGraph& g, SemanticRelation relation) {
    std::set<std::pair<NodeId, NodeId>> out;
    for (const auto& node : g.nodes()) {
        const auto words = text::split_ws(node.label);
        const std::size_t k = words.size();
        auto try_span = [&](std::size_t from, std::size_t len) {
            std::vector<std::string> part(words.begin() + static_cast<std::ptrdiff_t>(from),
                                          words.begin() + static_cast<std::ptrdiff_t>(from + len));
            if (auto other = g.find(text::join(part, " ")); other && *other != node.id)
                out.insert(std::minmax(node.id, *other));
        };
        for (std::size_t len = 1; len < k; ++len) {
            if (relation == SemanticRelation::contiguous) {
                for (std::size_t from = 0; from + len <= k; ++from) try_span(from, len);
                continue;
            }
            try_span(0, len);
            if (relation == SemanticRelation::prefix_suffix) try_span(k - len, len);
        }
    }
    return out;
}

TechnologyGraph calibrate_semantic_weights(TechnologyGraph g, const std::set<std::pair<NodeId, NodeId>>& pairs,
                                           Diagnostics* diag) {
    g.clear_semantic();
    if (pairs.empty()) {
        if (diag) diag->warn("no semantic pairs; calibration skipped");
        return g;
    }
    const double total = g.total_cooc_weight();
    if (!(total > 0.0)) {
        if (diag) diag->warn("no co-occurrence weight to calibrate against; semantic links skipped");
        return g;
    }
    const double s = total / static_cast<double>(pairs.size());
    for (const auto& [a, b] : pairs) g.set_semantic(a, b, s);
    g.set_calibration(s, pairs.size());
    finalize(g);
    return g;
}

// ---------------------------------------------------------------------------

TechnologyGraph slice(const TechnologyGraph& g, const std::vector<std::size_t>& periods, SemanticRelation relation,
                      Diagnostics* diag) {
    const auto& scheme = g.scheme();
    std::vector<bool> keep_bucket(scheme.buckets(), false);
    for (auto p : periods) {
        if (p >= scheme.size()) throw ConfigError({"unknown period index " + std::to_string(p)});
        keep_bucket[p] = true;
    }

    std::vector<TermNode> nodes;
    std::vector<NodeId> remap(g.node_count(), static_cast<NodeId>(-1));
    for (const auto& n : g.nodes()) {
        TermNode out{static_cast<NodeId>(nodes.size()), n.label, std::vector<std::int64_t>(scheme.buckets(), 0)};
        std::int64_t total = 0;
        for (std::size_t b = 0; b < scheme.buckets(); ++b)
            if (keep_bucket[b]) total += (out.occurrences[b] = n.occurrences[b]);
        if (total <= 0) continue;
        remap[n.id] = out.id;
        nodes.push_back(std::move(out));
    }
    std::vector<WeightedEdge> edges;
    for (const auto& e : g.edges()) {
        WeightedEdge out{remap[e.u], remap[e.v], 0.0, std::vector<double>(scheme.buckets(), 0.0), 0.0};
        for (std::size_t b = 0; b < scheme.buckets(); ++b)
            if (keep_bucket[b]) out.cooc_weight += (out.period_cooc[b] = e.period_cooc[b]);
        if (!(out.cooc_weight > 0.0)) continue;
        edges.push_back(std::move(out));
    }
    auto sliced = TechnologyGraph::from_parts(scheme, std::move(nodes), std::move(edges), 0.0, 0);
    const auto pairs = detect_semantic_pairs(sliced, relation);
    return calibrate_semantic_weights(std::move(sliced), pairs, diag);
}

TechnologyGraph slice(const TechnologyGraph& g, const Period& period, SemanticRelation relation, Diagnostics* diag) {
    auto idx = g.scheme().index_of(period);
    if (!idx) throw ConfigError({"period " + period.label() + " is not part of the scheme"});
    return slice(g, std::vector<std::size_t>{*idx}, relation, diag);
}

TechnologyGraph filter(const TechnologyGraph& g, double min_total_weight) {
    if (min_total_weight < 0.0) throw ConfigError({"min_total_weight must be nonnegative"});
    std::vector<double> strength(g.node_count(), 0.0);
    for (const auto& e : g.edges()) {
        strength[e.u] += e.weight();
        strength[e.v] += e.weight();
    }
    std::vector<TermNode> nodes;
    std::vector<NodeId> remap(g.node_count(), static_cast<NodeId>(-1));
    for (const auto& n : g.nodes()) {
        if (strength[n.id] < min_total_weight) continue;
        remap[n.id] = static_cast<NodeId>(nodes.size());
        nodes.push_back(n);
        nodes.back().id = remap[n.id];
    }
    std::vector<WeightedEdge> edges;
    std::size_t semantic = 0;
    for (const auto& e : g.edges()) {
        if (remap[e.u] == static_cast<NodeId>(-1) || remap[e.v] == static_cast<NodeId>(-1)) continue;
        edges.push_back(e);
        edges.back().u = remap[e.u];
        edges.back().v = remap[e.v];
        if (e.is_semantic()) ++semantic;
    }
    return TechnologyGraph::from_parts(g.scheme(), std::move(nodes), std::move(edges), g.calibration(),
                                       semantic > 0 ? semantic : 0);
}

} // namespace techmap::graph
