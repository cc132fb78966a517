#pragma once

#include "techmap/graph.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace techmap::layout {

using graph::TechnologyGraph;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Vec2&) const = default;
};

struct LayoutParams {
    double k_repulsion = 10.0;
    double gravity = 1.0;
    double edge_weight_influence = 1.0;
    double jitter_tolerance = 1.0;
    double theta = 0.5;
    bool use_barnes_hut = false;
    unsigned threads = 1;

    /// Throws ConfigError listing every invalid field.
    void validate() const;
};

struct LayoutState {
    std::vector<Vec2> positions;
    std::vector<Vec2> force;      // last step's force, for swing/traction
    std::vector<double> mass;     // unweighted degree + 1
    double speed = 1.0;
    double speed_efficiency = 1.0;
    double last_displacement = 0.0; // max per-node move in the last step
};

/// Seeded uniform positions in a disk of radius sqrt(n); coincident points
/// are jittered apart. Throws DataError on an empty graph.
LayoutState initialize(const TechnologyGraph& g, std::uint64_t seed);

/// Repulsion only (no attraction or gravity); exact or Barnes-Hut.
std::vector<Vec2> repulsion_forces(const std::vector<Vec2>& positions, const std::vector<double>& mass,
                                   double k_repulsion, bool barnes_hut, double theta, unsigned threads = 1);

/// Total force per node (repulsion + attraction + gravity) at the current positions.
std::vector<Vec2> forces(const LayoutState& state, const TechnologyGraph& g, const LayoutParams& params);

/// One iteration with adaptive global speed and per-node swing damping.
/// Throws NumericalError if a coordinate becomes non-finite.
void step(LayoutState& state, const TechnologyGraph& g, const LayoutParams& params);

struct StopCriteria {
    int max_iter = 1000;
    /// Default 1e-3 * sqrt(n).
    std::optional<double> eps;
};

struct LayoutResult {
    std::vector<Vec2> positions;
    int iterations = 0;
    bool converged = false;
};

LayoutResult run(const TechnologyGraph& g, const LayoutParams& params, const StopCriteria& stop,
                 std::uint64_t seed);
/// Continues from an existing state.
LayoutResult run(LayoutState& state, const TechnologyGraph& g, const LayoutParams& params, const StopCriteria& stop);

/// label,x,y
void write_positions_csv(std::ostream& out, const TechnologyGraph& g, const std::vector<Vec2>& positions,
                         const std::string& comment = {});
/// Positions keyed by node id of `g`; throws DataError on unknown or missing labels.
std::vector<Vec2> read_positions_csv(std::istream& in, const TechnologyGraph& g, const std::string& source = "<positions>");

} // namespace techmap::layout
