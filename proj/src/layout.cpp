#include "techmap/layout.hpp"

#include "techmap/csv.hpp"
#include "techmap/error.hpp"
#include "techmap/parallel.hpp"
#include "techmap/text.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace techmap::layout {

void LayoutParams::validate() const {
    std::vector<std::string> problems;
    if (!(k_repulsion > 0.0) || !std::isfinite(k_repulsion)) problems.push_back("k_repulsion must be positive");
    if (!(gravity >= 0.0) || !std::isfinite(gravity)) problems.push_back("gravity must be nonnegative");
    if (!std::isfinite(edge_weight_influence) || edge_weight_influence < 0.0)
        problems.push_back("edge_weight_influence must be nonnegative");
    if (!(jitter_tolerance > 0.0) || !std::isfinite(jitter_tolerance))
        problems.push_back("jitter_tolerance must be positive");
    if (!(theta > 0.0) || !std::isfinite(theta)) problems.push_back("theta must be positive");
    if (!problems.empty()) throw ConfigError(std::move(problems));
}

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

} // namespace

LayoutState initialize(const TechnologyGraph& g, std::uint64_t seed) {
    if (g.empty()) throw DataError("cannot lay out an empty graph");
    const std::size_t n = g.node_count();
    LayoutState s;
    s.mass.assign(n, 1.0);
    for (const auto& e : g.edges()) {
        s.mass[e.u] += 1.0;
        s.mass[e.v] += 1.0;
    }
    std::mt19937_64 rng(seed);
    const double radius = std::sqrt(static_cast<double>(n));
    s.positions.resize(n);
    for (auto& p : s.positions) {
        const double r = radius * std::sqrt(unit(rng));
        const double a = 2.0 * std::numbers::pi * unit(rng);
        p = {r * std::cos(a), r * std::sin(a)};
    }
    // jitter exact duplicates until all points are distinct
    const double jitter = 1e-6 * std::max(1.0, radius);
    for (bool dup = true; dup;) {
        dup = false;
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto& pa = s.positions[a];
            const auto& pb = s.positions[b];
            return pa.x != pb.x ? pa.x < pb.x : pa.y != pb.y ? pa.y < pb.y : a < b;
        });
        for (std::size_t k = 1; k < n; ++k) {
            auto& p = s.positions[order[k]];
            if (p == s.positions[order[k - 1]]) {
                p.x += jitter * (unit(rng) - 0.5);
                p.y += jitter * (unit(rng) - 0.5);
                dup = true;
            }
        }
    }
    s.force.assign(n, Vec2{});
    return s;
}

namespace {

struct QuadTree {
    struct Cell {
        double cx = 0, cy = 0, half = 0;
        double mass = 0, mx = 0, my = 0;
        int child[4] = {-1, -1, -1, -1};
        std::size_t begin = 0, end = 0; // body range in `order` (leaves only)
        bool leaf = true;
    };
    std::vector<Cell> cells;
    std::vector<std::size_t> order;

    static constexpr int max_depth = 48;

    QuadTree(const std::vector<Vec2>& pos, const std::vector<double>& mass) {
        const std::size_t n = pos.size();
        order.resize(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        double lo_x = std::numeric_limits<double>::max(), lo_y = lo_x;
        double hi_x = std::numeric_limits<double>::lowest(), hi_y = hi_x;
        for (const auto& p : pos) {
            lo_x = std::min(lo_x, p.x);
            hi_x = std::max(hi_x, p.x);
            lo_y = std::min(lo_y, p.y);
            hi_y = std::max(hi_y, p.y);
        }
        Cell root;
        root.cx = 0.5 * (lo_x + hi_x);
        root.cy = 0.5 * (lo_y + hi_y);
        root.half = 0.5 * std::max({hi_x - lo_x, hi_y - lo_y, 1e-12}) * (1.0 + 1e-9);
        cells.push_back(root);
        build(0, 0, n, 0, pos, mass);
    }

    void build(int c, std::size_t begin, std::size_t end, int depth, const std::vector<Vec2>& pos,
               const std::vector<double>& mass) {
        {
            Cell& cell = cells[c];
            cell.begin = begin;
            cell.end = end;
            for (std::size_t k = begin; k < end; ++k) {
                const auto i = order[k];
                cell.mass += mass[i];
                cell.mx += mass[i] * pos[i].x;
                cell.my += mass[i] * pos[i].y;
            }
            if (end - begin <= 1 || depth >= max_depth) return;
            cell.leaf = false;
        }
        const double cx = cells[c].cx, cy = cells[c].cy, h = cells[c].half * 0.5;
        auto quadrant = [&](std::size_t i) { return (pos[i].x >= cx ? 1 : 0) + (pos[i].y >= cy ? 2 : 0); };
        // stable partition into 4 quadrants keeps the traversal order deterministic
        std::size_t bounds[5];
        bounds[0] = begin;
        std::size_t cursor = begin;
        for (int q = 0; q < 4; ++q) {
            auto mid = std::stable_partition(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                                             order.begin() + static_cast<std::ptrdiff_t>(end),
                                             [&](std::size_t i) { return quadrant(i) == q; });
            cursor = static_cast<std::size_t>(mid - order.begin());
            bounds[q + 1] = cursor;
        }
        for (int q = 0; q < 4; ++q) {
            if (bounds[q] == bounds[q + 1]) continue;
            Cell child;
            child.cx = cx + ((q & 1) ? h : -h);
            child.cy = cy + ((q & 2) ? h : -h);
            child.half = h;
            cells.push_back(child);
            const int id = static_cast<int>(cells.size() - 1);
            cells[c].child[q] = id;
            build(id, bounds[q], bounds[q + 1], depth + 1, pos, mass);
        }
    }
};

inline void add_pair(Vec2& f, const Vec2& p, double px, double py, double coeff) {
    const double dx = p.x - px, dy = p.y - py;
    const double d2 = dx * dx + dy * dy;
    if (d2 <= 0.0) return;
    const double factor = coeff / d2; // magnitude coeff / d
    f.x += dx * factor;
    f.y += dy * factor;
}

} // namespace

std::vector<Vec2> repulsion_forces(const std::vector<Vec2>& positions, const std::vector<double>& mass,
                                   double k_repulsion, bool barnes_hut, double theta, unsigned threads) {
    const std::size_t n = positions.size();
    std::vector<Vec2> out(n);
    if (!barnes_hut) {
        parallel_for(n, threads, [&](std::size_t i) {
            Vec2 f;
            const auto& p = positions[i];
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) add_pair(f, p, positions[j].x, positions[j].y, k_repulsion * mass[i] * mass[j]);
            out[i] = f;
        });
        return out;
    }
    const QuadTree tree(positions, mass);
    const double theta2 = theta * theta;
    parallel_for(n, threads, [&](std::size_t i) {
        Vec2 f;
        const auto& p = positions[i];
        std::vector<int> stack{0};
        while (!stack.empty()) {
            const auto& cell = tree.cells[static_cast<std::size_t>(stack.back())];
            stack.pop_back();
            if (cell.leaf) {
                for (std::size_t k = cell.begin; k < cell.end; ++k) {
                    const auto j = tree.order[k];
                    if (j != i) add_pair(f, p, positions[j].x, positions[j].y, k_repulsion * mass[i] * mass[j]);
                }
                continue;
            }
            const double comx = cell.mx / cell.mass, comy = cell.my / cell.mass;
            const double dx = p.x - comx, dy = p.y - comy;
            const double d2 = dx * dx + dy * dy;
            const double width = 2.0 * cell.half;
            if (width * width < theta2 * d2) {
                add_pair(f, p, comx, comy, k_repulsion * mass[i] * cell.mass);
                continue;
            }
            for (int q = 3; q >= 0; --q)
                if (cell.child[q] >= 0) stack.push_back(cell.child[q]);
        }
        out[i] = f;
    });
    return out;
}

std::vector<Vec2> forces(const LayoutState& state, const TechnologyGraph& g, const LayoutParams& params) {
    const auto& pos = state.positions;
    auto f = repulsion_forces(pos, state.mass, params.k_repulsion, params.use_barnes_hut, params.theta,
                              resolve_threads(params.threads));
    for (const auto& e : g.edges()) {
        const double w = params.edge_weight_influence == 1.0   ? e.weight()
                         : params.edge_weight_influence == 0.0 ? 1.0
                                                               : std::pow(e.weight(), params.edge_weight_influence);
        const double dx = pos[e.u].x - pos[e.v].x, dy = pos[e.u].y - pos[e.v].y;
        f[e.u].x -= w * dx;
        f[e.u].y -= w * dy;
        f[e.v].x += w * dx;
        f[e.v].y += w * dy;
    }
    if (params.gravity > 0.0) {
        for (std::size_t i = 0; i < pos.size(); ++i) {
            const double d = std::hypot(pos[i].x, pos[i].y);
            if (d <= 0.0) continue;
            const double factor = params.gravity * state.mass[i] / d;
            f[i].x -= pos[i].x * factor;
            f[i].y -= pos[i].y * factor;
        }
    }
    return f;
}

void step(LayoutState& s, const TechnologyGraph& g, const LayoutParams& params) {
    const std::size_t n = s.positions.size();
    if (n != g.node_count() || s.mass.size() != n || s.force.size() != n)
        throw DataError("layout state does not match the graph");
    const auto f = forces(s, g, params);

    double swinging = 0.0, traction = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& o = s.force[i];
        swinging += s.mass[i] * std::hypot(o.x - f[i].x, o.y - f[i].y);
        traction += s.mass[i] * 0.5 * std::hypot(o.x + f[i].x, o.y + f[i].y);
    }

    // adaptive speed, after the reference ForceAtlas2 implementation
    const double dn = static_cast<double>(n);
    const double estimated = 0.05 * std::sqrt(dn);
    const double min_jt = std::sqrt(estimated);
    const double max_jt = 10.0;
    double jt = params.jitter_tolerance *
                std::max(min_jt, std::min(max_jt, estimated * traction / (dn * dn)));
    const double min_efficiency = 0.05;
    if (traction > 0.0 && swinging / traction > 2.0) {
        if (s.speed_efficiency > min_efficiency) s.speed_efficiency *= 0.5;
        jt = std::max(jt, params.jitter_tolerance);
    }
    const double target = swinging > 0.0 ? jt * s.speed_efficiency * traction / swinging
                                         : std::numeric_limits<double>::infinity();
    if (swinging > jt * traction) {
        if (s.speed_efficiency > min_efficiency) s.speed_efficiency *= 0.7;
    } else if (s.speed < 1000.0) {
        s.speed_efficiency *= 1.3;
    }
    const double max_rise = 0.5;
    s.speed += std::min(target - s.speed, max_rise * s.speed);

    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& o = s.force[i];
        const double node_swing = s.mass[i] * std::hypot(o.x - f[i].x, o.y - f[i].y);
        const double factor = s.speed / (1.0 + std::sqrt(s.speed * node_swing));
        s.positions[i].x += f[i].x * factor;
        s.positions[i].y += f[i].y * factor;
        if (!std::isfinite(s.positions[i].x) || !std::isfinite(s.positions[i].y))
            throw NumericalError("layout diverged at node " + std::to_string(i), factor);
        moved = std::max(moved, std::hypot(f[i].x, f[i].y) * factor);
    }
    s.force = f;
    s.last_displacement = moved;
}

LayoutResult run(LayoutState& state, const TechnologyGraph& g, const LayoutParams& params, const StopCriteria& stop) {
    params.validate();
    if (stop.max_iter < 1) throw ConfigError({"max_iter must be at least 1"});
    const double eps = stop.eps.value_or(1e-3 * std::sqrt(static_cast<double>(g.node_count())));
    LayoutResult r;
    for (int it = 1; it <= stop.max_iter; ++it) {
        step(state, g, params);
        r.iterations = it;
        if (state.last_displacement < eps) {
            r.converged = true;
            break;
        }
    }
    r.positions = state.positions;
    return r;
}

LayoutResult run(const TechnologyGraph& g, const LayoutParams& params, const StopCriteria& stop, std::uint64_t seed) {
    auto state = initialize(g, seed);
    return run(state, g, params, stop);
}

void write_positions_csv(std::ostream& out, const TechnologyGraph& g, const std::vector<Vec2>& positions,
                         const std::string& comment) {
    if (positions.size() != g.node_count()) throw DataError("positions do not match the graph");
    if (!comment.empty()) out << "# " << comment << '\n';
    out << "label,x,y\n";
    for (const auto& n : g.nodes())
        out << csv::escape(n.label) << ',' << text::format_double(positions[n.id].x) << ','
            << text::format_double(positions[n.id].y) << '\n';
}

std::vector<Vec2> read_positions_csv(std::istream& in, const TechnologyGraph& g, const std::string& source) {
    csv::Reader r(in, source);
    auto header = r.next();
    if (!header || *header != std::vector<std::string>{"label", "x", "y"})
        throw DataError("expected header label,x,y", source, r.line());
    std::vector<Vec2> out(g.node_count());
    std::vector<bool> seen(g.node_count(), false);
    while (auto row = r.next()) {
        if (row->size() != 3) throw DataError("wrong field count", source, r.line());
        auto id = g.find((*row)[0]);
        if (!id) throw DataError("unknown node \"" + (*row)[0] + "\"", source, r.line());
        auto x = text::parse_double((*row)[1]);
        auto y = text::parse_double((*row)[2]);
        if (!x || !y) throw DataError("invalid coordinate", source, r.line());
        out[*id] = {*x, *y};
        seen[*id] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        if (!seen[i]) throw DataError("no position for node \"" + g.nodes()[i].label + "\"", source);
    return out;
}

} // namespace techmap::layout
