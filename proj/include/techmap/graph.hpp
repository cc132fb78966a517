#pragma once

#include "techmap/error.hpp"
#include "techmap/extract.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace techmap::graph {

using NodeId = std::uint32_t;

/// Inclusive range of publication years.
struct Period {
    int start_year = 0;
    int end_year = 0;

    bool contains(int year) const noexcept { return year >= start_year && year <= end_year; }
    std::string label() const; // "2013-2014"

    bool operator==(const Period&) const = default;
};

/// Non-overlapping periods in ascending order. Years outside every period fall
/// into an overflow bucket at index size().
class PeriodScheme {
public:
    PeriodScheme() = default;
    explicit PeriodScheme(std::vector<Period> periods);

    /// Consecutive windows of `length` years from first_year through
    /// last_year; the final window may be cut short.
    static PeriodScheme consecutive(int first_year, int last_year, int length = 2);

    const std::vector<Period>& periods() const noexcept { return periods_; }
    std::size_t size() const noexcept { return periods_.size(); }
    bool empty() const noexcept { return periods_.empty(); }
    /// Bucket index for a year; size() for the overflow bucket.
    std::size_t bucket(int year) const noexcept;
    /// Number of buckets including overflow.
    std::size_t buckets() const noexcept { return periods_.size() + 1; }
    std::optional<std::size_t> index_of(const Period& p) const noexcept;

    bool operator==(const PeriodScheme&) const = default;

private:
    std::vector<Period> periods_;
};

struct TermNode {
    NodeId id = 0;
    std::string label;
    /// Documents mentioning the term, per bucket (overflow last).
    std::vector<std::int64_t> occurrences;

    std::int64_t total_occurrences() const;
    bool operator==(const TermNode&) const = default;
};

struct WeightedEdge {
    NodeId u = 0; // u < v
    NodeId v = 0;
    double cooc_weight = 0.0;
    std::vector<double> period_cooc; // per bucket, overflow last
    double semantic_weight = 0.0;

    double weight() const noexcept { return cooc_weight + semantic_weight; }
    bool is_cooccurrence() const noexcept { return cooc_weight > 0.0; }
    bool is_semantic() const noexcept { return semantic_weight > 0.0; }
    /// "cooccurrence", "semantic" or "both"
    std::string kind() const;

    bool operator==(const WeightedEdge&) const = default;
};

/// Undirected weighted term graph. Nodes are dense and ordered by id; edges
/// are kept sorted by (u, v).
class TechnologyGraph {
public:
    TechnologyGraph() = default;
    explicit TechnologyGraph(PeriodScheme scheme);

    const PeriodScheme& scheme() const noexcept { return scheme_; }
    const std::vector<TermNode>& nodes() const noexcept { return nodes_; }
    const std::vector<WeightedEdge>& edges() const noexcept { return edges_; }
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }

    std::optional<NodeId> find(const std::string& label) const;
    const WeightedEdge* edge(NodeId a, NodeId b) const;

    double calibration() const noexcept { return calibration_; }
    std::size_t semantic_pairs() const noexcept { return semantic_pairs_; }

    double total_cooc_weight() const;
    double total_semantic_weight() const;

    /// Returns the id for label, creating the node if needed.
    NodeId add_node(const std::string& label);
    /// Adds co-occurrence weight to the (a, b) edge in bucket `bucket`.
    void add_cooccurrence(NodeId a, NodeId b, double weight, std::size_t bucket);
    void add_occurrence(NodeId n, std::size_t bucket);
    /// Replaces the semantic weight of the (a, b) edge, creating it if needed.
    void set_semantic(NodeId a, NodeId b, double weight);
    void clear_semantic();
    void set_calibration(double s, std::size_t pairs);

    /// Restores a graph verbatim; validates invariants and throws DataError.
    static TechnologyGraph from_parts(PeriodScheme scheme, std::vector<TermNode> nodes,
                                      std::vector<WeightedEdge> edges, double calibration,
                                      std::size_t semantic_pairs);

    bool operator==(const TechnologyGraph& o) const {
        return scheme_ == o.scheme_ && nodes_ == o.nodes_ && edges_ == o.edges_ &&
               calibration_ == o.calibration_ && semantic_pairs_ == o.semantic_pairs_;
    }

private:
    WeightedEdge& edge_ref(NodeId a, NodeId b);

    PeriodScheme scheme_;
    std::vector<TermNode> nodes_;
    std::vector<WeightedEdge> edges_;
    std::unordered_map<std::string, NodeId> by_label_;
    std::unordered_map<std::uint64_t, std::size_t> edge_index_;
    bool edges_sorted_ = true;
    double calibration_ = 0.0;
    std::size_t semantic_pairs_ = 0;

    friend void finalize(TechnologyGraph&);
};

/// Sorts edges by (u, v); called by builders once assembly is complete.
void finalize(TechnologyGraph& g);

// ---------------------------------------------------------------------------

using TermPair = std::pair<std::string, std::string>; // first < second

/// Link weights contributed by one document: every pair in the document set
/// gets one raw count, plus one per sentence in which the pair co-occurs;
/// raw counts are divided by their sum. Empty when fewer than two terms.
std::vector<std::pair<TermPair, double>> document_link_weights(const extract::DocumentTerms& terms);

/// Default scheme for a corpus: two-year windows from the earliest year.
PeriodScheme scheme_for(const std::vector<extract::DocumentTerms>& docs, int length = 2);

/// Accumulates per-document link weights in document order. Documents in
/// the overflow bucket are counted and warned about.
TechnologyGraph build_cooccurrence(const std::vector<extract::DocumentTerms>& docs, const PeriodScheme& scheme,
                                   Diagnostics* diag = nullptr, unsigned threads = 1);

enum class SemanticRelation { prefix_suffix, prefix_only, contiguous };

SemanticRelation parse_semantic_relation(const std::string& name);

/// Pairs (a, b) with a < b whose token sequences contain one another under
/// `relation` (default: strict contiguous prefix or suffix).
std::set<std::pair<NodeId, NodeId>> detect_semantic_pairs(const TechnologyGraph& g,
                                                          SemanticRelation relation = SemanticRelation::prefix_suffix);

/// Sets every semantic pair's weight to s = total cooc weight / |pairs|.
/// Existing semantic weights are cleared first. With no pairs (or zero cooc
/// weight) the graph keeps no semantic links and a warning is recorded.
TechnologyGraph calibrate_semantic_weights(TechnologyGraph g, const std::set<std::pair<NodeId, NodeId>>& pairs,
                                           Diagnostics* diag = nullptr);

/// Sub-network of the given periods (by scheme index): nodes with
/// occurrences and edges with cooc weight there. Semantic links are
/// re-detected and re-calibrated. Throws ConfigError for unknown indices.
TechnologyGraph slice(const TechnologyGraph& g, const std::vector<std::size_t>& periods,
                      SemanticRelation relation = SemanticRelation::prefix_suffix, Diagnostics* diag = nullptr);
TechnologyGraph slice(const TechnologyGraph& g, const Period& period,
                      SemanticRelation relation = SemanticRelation::prefix_suffix, Diagnostics* diag = nullptr);

/// Removes nodes whose total incident weight is below the threshold.
TechnologyGraph filter(const TechnologyGraph& g, double min_total_weight);

} // namespace techmap::graph
