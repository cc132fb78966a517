#pragma once

#include "techmap/graph.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace techmap::graph {

/// Dump layout inside a directory: nodes.csv, edges.csv, graph_meta.json.
/// Weights are written with 17 significant digits so a restore is bit-exact.
/// `comment`, when non-empty, is written as a leading '# ' line of each CSV.
void write_nodes_csv(std::ostream& out, const TechnologyGraph& g, const std::string& comment = {});
void write_edges_csv(std::ostream& out, const TechnologyGraph& g, const std::string& comment = {});
void write_meta_json(std::ostream& out, const TechnologyGraph& g);

TechnologyGraph read_graph(std::istream& nodes_csv, std::istream& edges_csv, std::istream& meta_json,
                           const std::string& source = "<graph>");

void save_graph(const std::filesystem::path& dir, const TechnologyGraph& g, const std::string& comment = {});
TechnologyGraph load_graph(const std::filesystem::path& dir);

} // namespace techmap::graph
