#pragma once

// The dendrite built over a cell hierarchy: one vertex per cell, one arc per
// parent/child pair, and the metric rho that measures vertices by the
// Hausdorff distance of their cells.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dendrix/cells.hpp"
#include "dendrix/error.hpp"
#include "dendrix/spaces.hpp"

namespace dendrix {

using VertexId = std::size_t;
using EdgeId = std::size_t;

/// Arc from a cell to one of its children. The edge parameter t runs from 0 at
/// `parent` to 1 at `child`.
struct SkeletonEdge {
    VertexId parent = 0;
    VertexId child = 0;
    double length = 0.0;

    friend bool operator==(const SkeletonEdge&, const SkeletonEdge&) = default;
};

/// A point of the dendrite: a vertex, or an interior point of an edge with
/// 0 < t < 1. Obtain edge points through Dendrite::edge_point(), which folds
/// t = 0 and t = 1 onto the endpoint vertices.
class DPoint {
public:
    static DPoint vertex(VertexId v) { return DPoint(v, 0.0, true); }

    bool is_vertex() const { return is_vertex_; }
    VertexId vertex_id() const { return id_; }
    EdgeId edge_id() const { return id_; }
    double t() const { return t_; }

    friend bool operator==(const DPoint&, const DPoint&) = default;

private:
    friend class Dendrite;
    DPoint(std::size_t id, double t, bool is_vertex) : id_(id), t_(t), is_vertex_(is_vertex) {}

    std::size_t id_ = 0;
    double t_ = 0.0;
    bool is_vertex_ = true;
};

class Dendrite {
public:
    /// Assembles a dendrite from explicit parts. Only indices are validated;
    /// tree shape and edge lengths are reported by verify_dendrite().
    static Dendrite from_parts(std::shared_ptr<const MetricSpace> space,
                               std::vector<Subset> members, std::vector<SkeletonEdge> edges,
                               VertexId root) {
        if (!space) throw Error(ErrorCode::BadParams, "dendrite needs a space");
        if (members.empty()) throw Error(ErrorCode::DegenerateSpace, "dendrite has no vertices");
        if (root >= members.size()) throw Error(ErrorCode::IndexOutOfRange, "root", {root});
        for (std::size_t v = 0; v < members.size(); ++v) {
            if (members[v].empty()) throw Error(ErrorCode::EmptySubset, "vertex cell", {v});
            for (std::size_t p : members[v]) {
                if (p >= space->size()) throw Error(ErrorCode::IndexOutOfRange, "member", {v, p});
            }
        }
        for (std::size_t e = 0; e < edges.size(); ++e) {
            if (edges[e].parent >= members.size() || edges[e].child >= members.size()) {
                throw Error(ErrorCode::IndexOutOfRange, "edge endpoint", {e});
            }
        }
        Dendrite d;
        d.space_ = std::move(space);
        d.members_ = std::move(members);
        d.edges_ = std::move(edges);
        d.root_ = root;
        d.index();
        return d;
    }

    const MetricSpace& space() const { return *space_; }
    std::shared_ptr<const MetricSpace> shared_space() const { return space_; }

    std::size_t vertex_count() const { return members_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    VertexId root() const { return root_; }
    const Subset& members(VertexId v) const { return members_.at(v); }
    const std::vector<Subset>& all_members() const { return members_; }
    const SkeletonEdge& edge(EdgeId e) const { return edges_.at(e); }
    const std::vector<SkeletonEdge>& edges() const { return edges_; }
    const std::vector<EdgeId>& incident(VertexId v) const { return incident_.at(v); }
    std::size_t degree(VertexId v) const { return incident(v).size(); }
    bool is_leaf(VertexId v) const { return degree(v) <= 1; }

    /// The vertex whose cell is {point}, if any.
    std::optional<VertexId> leaf_of_point(std::size_t point) const {
        if (point < singleton_of_.size() && singleton_of_[point] != kNone) return singleton_of_[point];
        return std::nullopt;
    }

    std::vector<VertexId> leaves() const {
        std::vector<VertexId> out;
        for (VertexId v = 0; v < vertex_count(); ++v) {
            if (is_leaf(v)) out.push_back(v);
        }
        return out;
    }

    /// Connected and acyclic.
    bool is_tree() const { return is_tree_; }

    DPoint edge_point(EdgeId e, double t) const {
        const auto& edge = this->edge(e);
        if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::BadParams, "edge parameter outside [0,1]");
        if (t == 0.0) return DPoint::vertex(edge.parent);
        if (t == 1.0) return DPoint::vertex(edge.child);
        return DPoint(e, t, false);
    }

    bool contains(const DPoint& p) const {
        if (p.is_vertex()) return p.vertex_id() < vertex_count();
        return p.edge_id() < edge_count() && p.t() > 0.0 && p.t() < 1.0;
    }

    /// rho between two vertices: the Hausdorff distance of their cells.
    double vertex_distance(VertexId u, VertexId v) const {
        if (u == v) return 0.0;
        return hausdorff(*space_, members_.at(u), members_.at(v));
    }

    // -- tree geometry (requires is_tree()) --------------------------------

    std::optional<VertexId> parent_vertex(VertexId v) const {
        require_tree();
        if (v == root_) return std::nullopt;
        return edge_other_end(up_edge_[v], v);
    }
    std::optional<EdgeId> parent_edge(VertexId v) const {
        require_tree();
        if (v == root_) return std::nullopt;
        return up_edge_[v];
    }

    VertexId edge_other_end(EdgeId e, VertexId v) const {
        const auto& edge = this->edge(e);
        return edge.parent == v ? edge.child : edge.parent;
    }

    std::optional<EdgeId> edge_between(VertexId u, VertexId v) const {
        for (EdgeId e : incident(u)) {
            if (edge_other_end(e, u) == v) return e;
        }
        return std::nullopt;
    }

    /// Vertex sequence of the skeleton path from u to v (inclusive).
    std::vector<VertexId> path(VertexId u, VertexId v) const {
        require_tree();
        std::vector<VertexId> up, down;
        while (depth_[u] > depth_[v]) { up.push_back(u); u = *parent_vertex(u); }
        while (depth_[v] > depth_[u]) { down.push_back(v); v = *parent_vertex(v); }
        while (u != v) {
            up.push_back(u);
            down.push_back(v);
            u = *parent_vertex(u);
            v = *parent_vertex(v);
        }
        up.push_back(u);
        up.insert(up.end(), down.rbegin(), down.rend());
        return up;
    }

    /// Arc length of the skeleton path between two vertices.
    double path_length(VertexId u, VertexId v) const {
        const auto p = path(u, v);
        double total = 0.0;
        for (std::size_t k = 0; k + 1 < p.size(); ++k) total += edge(*edge_between(p[k], p[k + 1])).length;
        return total;
    }

    /// Point at arc length `s` along a vertex path, clamped to its ends.
    DPoint point_along(const std::vector<VertexId>& path, double s) const {
        if (path.empty()) throw Error(ErrorCode::BadParams, "empty path");
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
            const EdgeId e = *edge_between(path[k], path[k + 1]);
            const double len = edge(e).length;
            if (s < len) {
                if (s <= 0.0) return DPoint::vertex(path[k]);
                const double frac = s / len;
                return edge_point(e, edge(e).parent == path[k] ? frac : 1.0 - frac);
            }
            s -= len;
        }
        return DPoint::vertex(path.back());
    }

    friend bool operator==(const Dendrite& a, const Dendrite& b) {
        return *a.space_ == *b.space_ && a.members_ == b.members_ && a.edges_ == b.edges_ &&
               a.root_ == b.root_;
    }

private:
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

    Dendrite() = default;

    void require_tree() const {
        if (!is_tree_) throw Error(ErrorCode::BadParams, "skeleton is not a tree");
    }

    void index() {
        const std::size_t n = members_.size();
        incident_.assign(n, {});
        for (EdgeId e = 0; e < edges_.size(); ++e) {
            incident_[edges_[e].parent].push_back(e);
            if (edges_[e].child != edges_[e].parent) incident_[edges_[e].child].push_back(e);
        }
        singleton_of_.assign(space_->size(), kNone);
        for (VertexId v = 0; v < n; ++v) {
            if (members_[v].size() == 1 && singleton_of_[members_[v][0]] == kNone) {
                singleton_of_[members_[v][0]] = v;
            }
        }
        // Breadth-first from the root; a tree reaches every vertex exactly once.
        up_edge_.assign(n, kNone);
        depth_.assign(n, 0);
        std::vector<bool> seen(n, false);
        std::queue<VertexId> frontier;
        frontier.push(root_);
        seen[root_] = true;
        std::size_t reached = 1;
        bool cycle = false;
        while (!frontier.empty()) {
            const VertexId u = frontier.front();
            frontier.pop();
            for (EdgeId e : incident_[u]) {
                if (e == up_edge_[u]) continue;
                const VertexId w = edge_other_end(e, u);
                if (seen[w]) { cycle = true; continue; }
                seen[w] = true;
                ++reached;
                up_edge_[w] = e;
                depth_[w] = depth_[u] + 1;
                frontier.push(w);
            }
        }
        is_tree_ = !cycle && reached == n && edges_.size() + 1 == n;
    }

    std::shared_ptr<const MetricSpace> space_;
    std::vector<Subset> members_;
    std::vector<SkeletonEdge> edges_;
    VertexId root_ = 0;

    std::vector<std::vector<EdgeId>> incident_;
    std::vector<VertexId> singleton_of_;
    std::vector<EdgeId> up_edge_;
    std::vector<std::size_t> depth_;
    bool is_tree_ = false;
};

/// One vertex per cell (same ids as the hierarchy) and one edge per
/// parent/child pair, of length equal to the Hausdorff distance of the two cells.
inline Dendrite build_dendrite(const CellHierarchy& hierarchy, const MetricSpace& space) {
    if (space.size() == 0) throw Error(ErrorCode::DegenerateSpace, "space has no points");
    if (hierarchy.point_count() != space.size()) {
        throw Error(ErrorCode::BadParams, "hierarchy was built from a different space");
    }
    std::vector<Subset> members;
    members.reserve(hierarchy.size());
    for (const Cell& cell : hierarchy.cells()) members.push_back(cell.members);
    std::vector<SkeletonEdge> edges;
    for (CellId id = 0; id < hierarchy.size(); ++id) {
        for (CellId child : hierarchy[id].children) {
            edges.push_back({id, child, hausdorff(space, members[id], members[child])});
        }
    }
    return Dendrite::from_parts(std::make_shared<const MetricSpace>(space), std::move(members),
                                std::move(edges), hierarchy.root());
}

inline Dendrite build_dendrite(const MetricSpace& space) {
    return build_dendrite(build_cell_hierarchy(space), space);
}

namespace detail {

// Extends a vertex metric to edge points by moving along the edges to their
// endpoints first and then jumping between endpoints.
template <typename VertexMetric>
double lift_to_edges(const Dendrite& d, const DPoint& a, const DPoint& b, VertexMetric&& metric) {
    if (!d.contains(a) || !d.contains(b)) throw Error(ErrorCode::IndexOutOfRange, "point not in dendrite");
    if (a.is_vertex() && b.is_vertex()) return metric(a.vertex_id(), b.vertex_id());

    struct Leg { VertexId v; double len; };
    auto legs = [&](const DPoint& p) -> std::vector<Leg> {
        if (p.is_vertex()) return {{p.vertex_id(), 0.0}};
        const auto& e = d.edge(p.edge_id());
        return {{e.parent, p.t() * e.length}, {e.child, (1.0 - p.t()) * e.length}};
    };
    if (!a.is_vertex() && !b.is_vertex() && a.edge_id() == b.edge_id()) {
        return std::abs(a.t() - b.t()) * d.edge(a.edge_id()).length;
    }
    double best = std::numeric_limits<double>::infinity();
    for (const Leg& la : legs(a)) {
        for (const Leg& lb : legs(b)) best = std::min(best, (la.len + lb.len) + metric(la.v, lb.v));
    }
    return best;
}

}  // namespace detail

/// The dendrite metric. Vertex pairs use the Hausdorff distance of their cells
/// directly (not the skeleton path length); points on one edge are measured
/// along the edge; everything else goes through the nearer edge endpoints.
inline double rho(const Dendrite& d, const DPoint& a, const DPoint& b) {
    return detail::lift_to_edges(d, a, b, [&](VertexId u, VertexId v) { return d.vertex_distance(u, v); });
}

/// Geodesic length along the skeleton.
inline double tree_distance(const Dendrite& d, const DPoint& a, const DPoint& b) {
    return detail::lift_to_edges(d, a, b, [&](VertexId u, VertexId v) { return d.path_length(u, v); });
}

/// Uniform choice between "some vertex" and "some edge point"; t is uniform in (0,1).
template <typename Rng>
DPoint random_point(const Dendrite& d, Rng& rng) {
    if (d.edge_count() == 0 || std::bernoulli_distribution(0.5)(rng)) {
        return DPoint::vertex(std::uniform_int_distribution<VertexId>(0, d.vertex_count() - 1)(rng));
    }
    const EdgeId e = std::uniform_int_distribution<EdgeId>(0, d.edge_count() - 1)(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double t = 0.0;
    while (t == 0.0) t = unit(rng);
    return d.edge_point(e, t);
}

inline constexpr double kTriangleTolerance = 1e-12;

struct VerificationReport {
    double max_isometry_error = 0.0;
    std::size_t triples_checked = 0;
    std::size_t triangle_violations = 0;
    bool symmetric = true;
    bool leaves_are_singletons = false;
    bool is_tree = false;
    bool branching_ok = false;    // root degree >= 2, other non-singleton vertices >= 3
    bool edge_lengths_ok = false; // each length equals the Hausdorff distance of its cells

    bool ok() const {
        return max_isometry_error <= kTriangleTolerance && triangle_violations == 0 && symmetric &&
               leaves_are_singletons && is_tree && branching_ok && edge_lengths_ok;
    }
};

/// Checks a dendrite against the space it was built from: endpoint isometry
/// over all point pairs, the triangle inequality over random triples, and the
/// structural invariants of the skeleton.
inline VerificationReport verify_dendrite(const Dendrite& d, const MetricSpace& space,
                                          std::size_t triple_samples, std::uint64_t seed = 0x5eed) {
    VerificationReport report;
    report.is_tree = d.is_tree();

    std::vector<std::optional<VertexId>> leaf(space.size());
    bool all_points_have_leaves = d.space().size() == space.size();
    for (std::size_t x = 0; x < space.size() && all_points_have_leaves; ++x) {
        leaf[x] = d.leaf_of_point(x);
        all_points_have_leaves = leaf[x].has_value();
    }
    if (!all_points_have_leaves) {
        report.max_isometry_error = std::numeric_limits<double>::infinity();
    } else {
        for (std::size_t x = 0; x < space.size(); ++x) {
            for (std::size_t y = 0; y < space.size(); ++y) {
                const double r = rho(d, DPoint::vertex(*leaf[x]), DPoint::vertex(*leaf[y]));
                report.max_isometry_error =
                    std::max(report.max_isometry_error, std::abs(r - space.distance(x, y)));
            }
        }
    }

    bool leaves_ok = all_points_have_leaves;
    bool branching = true;
    for (VertexId v = 0; v < d.vertex_count(); ++v) {
        const bool singleton = d.members(v).size() == 1;
        if (d.vertex_count() > 1 && d.is_leaf(v) != singleton) leaves_ok = false;
        if (!singleton) {
            const std::size_t need = v == d.root() ? 2 : 3;
            if (d.degree(v) < need) branching = false;
        }
    }
    report.leaves_are_singletons = leaves_ok;
    report.branching_ok = branching;

    report.edge_lengths_ok = true;
    for (const auto& e : d.edges()) {
        if (!(e.length > 0.0) || e.length != d.vertex_distance(e.parent, e.child)) {
            report.edge_lengths_ok = false;
        }
    }

    std::mt19937_64 rng(seed);
    for (std::size_t s = 0; s < triple_samples; ++s) {
        const DPoint a = random_point(d, rng);
        const DPoint b = random_point(d, rng);
        const DPoint c = random_point(d, rng);
        const double ab = rho(d, a, b), bc = rho(d, b, c), ac = rho(d, a, c);
        if (ab != rho(d, b, a) || bc != rho(d, c, b) || ac != rho(d, c, a)) report.symmetric = false;
        if (ac > ab + bc + kTriangleTolerance || ab > ac + bc + kTriangleTolerance ||
            bc > ab + ac + kTriangleTolerance) {
            ++report.triangle_violations;
        }
        ++report.triples_checked;
    }
    return report;
}

inline nlohmann::json report_to_json(const VerificationReport& r) {
    return {{"max_isometry_error", r.max_isometry_error},
            {"triples_checked", r.triples_checked},
            {"triangle_violations", r.triangle_violations},
            {"symmetric", r.symmetric},
            {"leaves_are_singletons", r.leaves_are_singletons},
            {"is_tree", r.is_tree},
            {"branching_ok", r.branching_ok},
            {"edge_lengths_ok", r.edge_lengths_ok},
            {"ok", r.ok()}};
}

// ---------------------------------------------------------------------------
// Export: DOT and JSON
//   {"labels": [...], "root": r,
//    "vertices": [{"id": i, "members": [point indices]}],
//    "edges": [{"u": parent, "v": child, "length": L}]}

inline nlohmann::json dendrite_to_json(const Dendrite& d) {
    nlohmann::json vertices = nlohmann::json::array();
    for (VertexId v = 0; v < d.vertex_count(); ++v) {
        vertices.push_back({{"id", v}, {"members", d.members(v)}});
    }
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : d.edges()) edges.push_back({{"u", e.parent}, {"v", e.child}, {"length", e.length}});
    return {{"labels", d.space().labels()}, {"root", d.root()}, {"vertices", std::move(vertices)},
            {"edges", std::move(edges)}};
}

/// Rebuilds a dendrite from its JSON form over `space`. Vertex ids must be 0..V-1.
inline Dendrite dendrite_from_json(const nlohmann::json& doc, const MetricSpace& space) {
    try {
        if (doc.contains("labels") && doc.at("labels").get<std::vector<std::string>>() != space.labels()) {
            throw Error(ErrorCode::Parse, "dendrite labels do not match the space");
        }
        const auto& vertices = doc.at("vertices");
        std::vector<Subset> members(vertices.size());
        for (const auto& v : vertices) {
            const auto id = v.at("id").get<std::size_t>();
            if (id >= members.size()) throw Error(ErrorCode::Parse, "vertex id out of range", {id});
            members[id] = v.at("members").get<Subset>();
        }
        std::vector<SkeletonEdge> edges;
        for (const auto& e : doc.at("edges")) {
            edges.push_back({e.at("u").get<VertexId>(), e.at("v").get<VertexId>(), e.at("length").get<double>()});
        }
        return Dendrite::from_parts(std::make_shared<const MetricSpace>(space), std::move(members),
                                    std::move(edges), doc.at("root").get<VertexId>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, e.what());
    }
}

namespace detail {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

inline std::string format_length(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace detail

/// format is "dot" or "json".
inline std::string export_skeleton(const Dendrite& d, std::string_view format) {
    if (format == "json") return dendrite_to_json(d).dump(2) + "\n";
    if (format != "dot") throw Error(ErrorCode::UnknownFormat, "unknown format '" + std::string(format) + "'");
    std::ostringstream os;
    os << "graph dendrite {\n";
    for (VertexId v = 0; v < d.vertex_count(); ++v) {
        std::string label = "{";
        for (std::size_t k = 0; k < d.members(v).size(); ++k) {
            if (k) label += ",";
            label += d.space().label(d.members(v)[k]);
        }
        label += "}";
        os << "  v" << v << " [label=\"" << detail::dot_escape(label) << "\"];\n";
    }
    for (const auto& e : d.edges()) {
        const std::string len = detail::format_length(e.length);
        os << "  v" << e.parent << " -- v" << e.child << " [length=" << len << ", label=\"" << len << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace dendrix
