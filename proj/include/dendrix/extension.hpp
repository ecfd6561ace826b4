#pragma once

// Extension of an endpoint self-map to the whole dendrite so that every
// non-endpoint is eventually fixed.
//
// The non-leaf vertices p_0, p_1, ..., p_m are enumerated breadth-first from
// p_0; T_i is the subtree they span and alpha_i = [p_{j(i)}, p_i] the edge
// added at stage i. Each p_i goes to q_i = r_{i-1}(f(e_i)), the entry point
// into T_{i-1} of the path from f(e_i), where e_i is the rho-nearest leaf of
// p_i. alpha_i is mapped linearly by arc length onto [q_{j(i)}, q_i].
//
// Leaf edges are not covered by a finite enumeration. On the leaf edge [v, e]
// the enumeration continues with the points at fractions 1 - 2^-k, k >= 1,
// whose images follow the same rule. In closed form the half [v, mid] maps
// linearly onto [F(v), v'] and the half [mid, e] maps onto the whole leaf edge
// [v', f(e)], where v' is the neighbour of f(e). The map is continuous at
// each leaf, and a point at fraction 1 - 2^-k enters the inner tree after k
// steps.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dendrix/dendrite.hpp"
#include "dendrix/error.hpp"

namespace dendrix {

struct FiltrationArc {
    std::size_t index = 0;  // i
    std::size_t from = 0;   // j(i)
    std::vector<VertexId> path;  // p_{j(i)} ... p_i
};

class Filtration {
public:
    Filtration() = default;

    bool empty() const { return order_.empty(); }
    VertexId base() const { return order_.at(0); }
    const std::vector<VertexId>& order() const { return order_; }
    /// arcs()[i - 1] is alpha_i.
    const std::vector<FiltrationArc>& arcs() const { return arcs_; }
    const FiltrationArc& arc(std::size_t i) const { return arcs_.at(i - 1); }

    /// Index i with p_i = v, or nothing for leaves.
    std::optional<std::size_t> position(VertexId v) const {
        if (v < position_.size() && position_[v] != kNone) return position_[v];
        return std::nullopt;
    }

    /// Next vertex on the path to p_0.
    std::optional<VertexId> toward_base(VertexId v) const {
        if (toward_base_.at(v) == kNone) return std::nullopt;
        return toward_base_[v];
    }

    /// Smallest i with x in T_i; nothing for leaves and leaf-edge points.
    std::optional<std::size_t> stage(const Dendrite& d, const DPoint& x) const {
        if (x.is_vertex()) return position(x.vertex_id());
        const auto& e = d.edge(x.edge_id());
        const auto a = position(e.parent);
        const auto b = position(e.child);
        if (!a || !b) return std::nullopt;
        return std::max(*a, *b);
    }

private:
    static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    friend Filtration build_filtration(const Dendrite& d, VertexId base);

    std::vector<VertexId> order_;
    std::vector<FiltrationArc> arcs_;
    std::vector<std::size_t> position_;
    std::vector<VertexId> toward_base_;
};

/// Breadth-first enumeration of the non-leaf vertices from `base`. An ancestor
/// on the path to p_0 is always reached first, so p_j in [p_0, p_i] implies j < i.
inline Filtration build_filtration(const Dendrite& d, VertexId base) {
    if (d.vertex_count() < 2) throw Error(ErrorCode::DegenerateSpace, "dendrite needs at least two vertices");
    if (!d.is_tree()) throw Error(ErrorCode::BadParams, "skeleton is not a tree");
    if (base >= d.vertex_count()) throw Error(ErrorCode::IndexOutOfRange, "base vertex", {base});
    if (d.is_leaf(base)) throw Error(ErrorCode::RootIsLeaf, "p_0 must not be a leaf", {base});

    Filtration f;
    const std::size_t n = d.vertex_count();
    f.position_.assign(n, Filtration::kNone);
    f.toward_base_.assign(n, Filtration::kNone);
    std::vector<bool> seen(n, false);
    std::queue<VertexId> frontier;
    frontier.push(base);
    seen[base] = true;
    while (!frontier.empty()) {
        const VertexId u = frontier.front();
        frontier.pop();
        if (!d.is_leaf(u)) {
            const std::size_t i = f.order_.size();
            f.position_[u] = i;
            f.order_.push_back(u);
            if (i > 0) {
                const VertexId up = f.toward_base_[u];
                f.arcs_.push_back({i, f.position_[up], {up, u}});
            }
        }
        for (EdgeId e : d.incident(u)) {
            const VertexId w = d.edge_other_end(e, u);
            if (seen[w]) continue;
            seen[w] = true;
            f.toward_base_[w] = u;
            frontier.push(w);
        }
    }
    return f;
}

/// The extension F of an endpoint map f. f is indexed by point: leaf {x} goes
/// to leaf {f[x]}.
class DendriteMap {
public:
    struct EdgeAction {
        VertexId source = 0;            // the end evaluated at s = 0
        bool leaf_edge = false;
        std::vector<VertexId> target;   // image path of the inner part, from F(source)
        double target_length = 0.0;
        EdgeId image_leaf_edge = 0;     // leaf edges only: edge of f(e)
    };

    const Dendrite& dendrite() const { return *dendrite_; }
    std::shared_ptr<const Dendrite> shared_dendrite() const { return dendrite_; }
    const Filtration& filtration() const { return filtration_; }
    const std::vector<std::size_t>& endpoint_map() const { return f_; }
    VertexId vertex_image(VertexId v) const { return vertex_image_.at(v); }
    const EdgeAction& action(EdgeId e) const { return actions_.at(e); }
    /// e_i of stage i (i >= 1): the leaf used to place q_i.
    VertexId anchor_leaf(std::size_t i) const { return anchor_.at(i); }

    DPoint operator()(const DPoint& x) const {
        if (!dendrite_->contains(x)) throw Error(ErrorCode::IndexOutOfRange, "point not in dendrite");
        if (x.is_vertex()) return DPoint::vertex(vertex_image(x.vertex_id()));
        return evaluate_edge(x.edge_id(), x.t());
    }

    /// Image of the point with parameter t on edge e, t in [0, 1] inclusive.
    DPoint evaluate_edge(EdgeId e, double t) const {
        const auto& edge = dendrite_->edge(e);
        const auto& act = actions_.at(e);
        const double s = edge.parent == act.source ? t : 1.0 - t;
        // ends of the target path are returned exactly; arc-length walking drifts
        auto along = [&](double frac) {
            if (frac <= 0.0) return DPoint::vertex(act.target.front());
            if (frac >= 1.0) return DPoint::vertex(act.target.back());
            return dendrite_->point_along(act.target, frac * act.target_length);
        };
        if (!act.leaf_edge) return along(s);
        if (s <= 0.5) return along(2.0 * s);
        const auto& image = dendrite_->edge(act.image_leaf_edge);
        const double u = 2.0 * s - 1.0;  // fraction from the inner end of the image edge
        return dendrite_->edge_point(act.image_leaf_edge, dendrite_->is_leaf(image.child) ? u : 1.0 - u);
    }

private:
    friend DendriteMap extend_map(std::shared_ptr<const Dendrite>, Filtration, std::vector<std::size_t>);

    std::shared_ptr<const Dendrite> dendrite_;
    Filtration filtration_;
    std::vector<std::size_t> f_;
    std::vector<VertexId> vertex_image_;
    std::vector<EdgeAction> actions_;
    std::vector<VertexId> anchor_;
};

inline DendriteMap extend_map(std::shared_ptr<const Dendrite> dendrite, Filtration filtration,
                              std::vector<std::size_t> f) {
    if (!dendrite) throw Error(ErrorCode::BadParams, "no dendrite");
    const Dendrite& d = *dendrite;
    const std::size_t points = d.space().size();
    if (f.size() != points) throw Error(ErrorCode::NotEndpointMap, "endpoint map must cover every leaf");
    std::vector<VertexId> leaf(points);
    for (std::size_t x = 0; x < points; ++x) {
        const auto v = d.leaf_of_point(x);
        if (!v || !d.is_leaf(*v)) throw Error(ErrorCode::NotEndpointMap, "point has no leaf", {x});
        leaf[x] = *v;
    }
    for (std::size_t x = 0; x < points; ++x) {
        if (f[x] >= points) throw Error(ErrorCode::NotEndpointMap, "image is not a leaf", {x, f[x]});
    }

    DendriteMap map;
    map.dendrite_ = dendrite;
    map.f_ = std::move(f);
    map.vertex_image_.assign(d.vertex_count(), 0);
    map.actions_.resize(d.edge_count());
    for (std::size_t x = 0; x < points; ++x) map.vertex_image_[leaf[x]] = leaf[map.f_[x]];

    if (d.vertex_count() == 1) {
        map.filtration_ = std::move(filtration);
        return map;
    }
    if (filtration.empty()) throw Error(ErrorCode::BadParams, "filtration is empty");

    const auto& order = filtration.order();
    map.anchor_.assign(order.size(), order[0]);
    map.vertex_image_[order[0]] = order[0];
    for (std::size_t i = 1; i < order.size(); ++i) {
        const Subset& cell = d.members(order[i]);
        // e_i: rho-nearest leaf, smallest point index on ties.
        std::size_t nearest = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t x = 0; x < points; ++x) {
            const double r = hausdorff(d.space(), cell, std::span<const std::size_t>(&x, 1));
            if (r < best) { best = r; nearest = x; }
        }
        map.anchor_[i] = leaf[nearest];
        // q_i: first point of T_{i-1} on the path from f(e_i) towards p_0.
        VertexId w = leaf[map.f_[nearest]];
        while (!filtration.position(w) || *filtration.position(w) >= i) w = *filtration.toward_base(w);
        map.vertex_image_[order[i]] = w;
    }

    auto path_action = [&](VertexId source, VertexId from, VertexId to) {
        DendriteMap::EdgeAction act;
        act.source = source;
        act.target = d.path(from, to);
        for (std::size_t k = 0; k + 1 < act.target.size(); ++k) {
            act.target_length += d.edge(*d.edge_between(act.target[k], act.target[k + 1])).length;
        }
        return act;
    };
    for (const auto& arc : filtration.arcs()) {
        const VertexId from = arc.path.front();
        const VertexId to = arc.path.back();
        const EdgeId e = *d.edge_between(from, to);
        map.actions_[e] = path_action(from, map.vertex_image_[from], map.vertex_image_[to]);
    }
    for (std::size_t x = 0; x < points; ++x) {
        const VertexId e_leaf = leaf[x];
        const EdgeId e = d.incident(e_leaf).front();
        const VertexId inner = d.edge_other_end(e, e_leaf);
        const VertexId image_leaf = leaf[map.f_[x]];
        const EdgeId image_edge = d.incident(image_leaf).front();
        auto act = path_action(inner, map.vertex_image_[inner], d.edge_other_end(image_edge, image_leaf));
        act.leaf_edge = true;
        act.image_leaf_edge = image_edge;
        map.actions_[e] = std::move(act);
    }
    map.filtration_ = std::move(filtration);
    return map;
}

/// Number of iterations until x reaches a fixed point of F, or nothing if the
/// budget runs out first.
inline std::optional<std::size_t> steps_to_fixed_point(const DendriteMap& map, DPoint x, std::size_t budget) {
    for (std::size_t step = 0; step <= budget; ++step) {
        const DPoint next = map(x);
        if (next == x) return step;
        x = next;
    }
    return std::nullopt;
}

struct Embedding {
    std::shared_ptr<const Dendrite> dendrite;
    DendriteMap map;
    std::vector<VertexId> endpoint;  // point -> its leaf vertex (the isometry i)
};

/// Builds the dendrite of `space`, rooted at the whole-space cell, and extends
/// the point map f to it so that F(i(x)) = i(f(x)).
inline Embedding embed_system(const MetricSpace& space, std::vector<std::size_t> f) {
    auto dendrite = std::make_shared<const Dendrite>(build_dendrite(space));
    Filtration filtration;
    if (dendrite->vertex_count() > 1) filtration = build_filtration(*dendrite, dendrite->root());
    Embedding out{dendrite, extend_map(dendrite, std::move(filtration), std::move(f)), {}};
    for (std::size_t x = 0; x < space.size(); ++x) out.endpoint.push_back(*dendrite->leaf_of_point(x));
    return out;
}

// ---------------------------------------------------------------------------
// Files
//   endpoint map: {"<label>": "<label>", ...}
//   extension export: vertex-image table plus per-edge target-path descriptors

inline std::vector<std::size_t> endpoint_map_from_json(const nlohmann::json& doc, const MetricSpace& space) {
    if (!doc.is_object()) throw Error(ErrorCode::Parse, "endpoint map must be an object of label -> label");
    std::vector<std::size_t> f(space.size(), space.size());
    for (const auto& [from, to] : doc.items()) {
        if (!to.is_string()) throw Error(ErrorCode::Parse, "image of '" + from + "' is not a label");
        std::size_t a = 0, b = 0;
        try {
            a = space.index_of(from);
            b = space.index_of(to.get<std::string>());
        } catch (const Error& e) {
            throw Error(ErrorCode::NotEndpointMap, e.what());
        }
        f[a] = b;
    }
    for (std::size_t x = 0; x < f.size(); ++x) {
        if (f[x] == space.size()) throw Error(ErrorCode::NotEndpointMap, "no image for '" + space.label(x) + "'", {x});
    }
    return f;
}

inline nlohmann::json extension_to_json(const DendriteMap& map) {
    const Dendrite& d = map.dendrite();
    nlohmann::json endpoint = nlohmann::json::object();
    for (std::size_t x = 0; x < map.endpoint_map().size(); ++x) {
        endpoint[d.space().label(x)] = d.space().label(map.endpoint_map()[x]);
    }
    nlohmann::json images = nlohmann::json::array();
    for (VertexId v = 0; v < d.vertex_count(); ++v) {
        images.push_back({{"vertex", v}, {"image", map.vertex_image(v)}});
    }
    nlohmann::json arcs = nlohmann::json::array();
    const auto& filtration = map.filtration();
    for (const auto& arc : filtration.arcs()) {
        const EdgeId e = *d.edge_between(arc.path.front(), arc.path.back());
        const auto& act = map.action(e);
        arcs.push_back({{"i", arc.index}, {"j", arc.from}, {"edge", e}, {"from", arc.path.front()},
                        {"to", arc.path.back()}, {"anchor_leaf", map.anchor_leaf(arc.index)},
                        {"target_path", act.target}, {"target_length", act.target_length}});
    }
    nlohmann::json leaf_edges = nlohmann::json::array();
    for (EdgeId e = 0; e < d.edge_count(); ++e) {
        const auto& act = map.action(e);
        if (!act.leaf_edge) continue;
        leaf_edges.push_back({{"edge", e}, {"inner", act.source}, {"inner_target_path", act.target},
                              {"inner_target_length", act.target_length},
                              {"image_leaf_edge", act.image_leaf_edge}});
    }
    return {{"base", filtration.empty() ? d.root() : filtration.base()},
            {"order", filtration.order()},
            {"endpoint_map", std::move(endpoint)},
            {"vertex_images", std::move(images)},
            {"arcs", std::move(arcs)},
            {"leaf_edges", std::move(leaf_edges)}};
}

}  // namespace dendrix
