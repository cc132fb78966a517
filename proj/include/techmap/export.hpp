#pragma once

#include "techmap/graph.hpp"
#include "techmap/layout.hpp"
#include "techmap/report.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace techmap::exporter {

inline constexpr const char* version = "0.1.0";

struct ExportMeta {
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string version = exporter::version;

    bool operator==(const ExportMeta&) const = default;
};

/// GEXF 1.3 with viz positions. Node attributes: cluster, weighted_degree,
/// eigenvector, degree per period. Edge attributes: cooc_weight,
/// semantic_weight, kind; the combined weight is the native edge weight.
void write_gexf(std::ostream& out, const graph::TechnologyGraph& g, const report::NodeMetricsTable& metrics,
                const std::vector<layout::Vec2>& positions, const ExportMeta& meta);

/// {meta, nodes:[{id,label,x,y,cluster,metrics,occurrences}],
///  edges:[{source,target,weight,kind,cooc_weight,semantic_weight,periods}]}
/// Keys keep insertion order; doubles are written in shortest round-trip form.
void write_json(std::ostream& out, const graph::TechnologyGraph& g, const report::NodeMetricsTable& metrics,
                const std::vector<layout::Vec2>& positions, const ExportMeta& meta);

struct JsonImport {
    graph::TechnologyGraph graph;
    std::vector<layout::Vec2> positions;
    std::vector<int> clusters;
    ExportMeta meta;
};

/// Inverse of write_json. Throws DataError on structural problems.
JsonImport read_json(std::istream& in, const std::string& source = "<json>");

/// Escapes &, <, >, " and ' and drops characters XML 1.0 does not allow.
std::string xml_escape(const std::string& s);

} // namespace techmap::exporter
