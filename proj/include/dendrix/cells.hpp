#pragma once

// Chain connectivity, threshold cells and the full cell hierarchy of a finite
// metric space. Cells of a finite space are exactly its single-linkage clusters.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <tuple>
#include <vector>

#include "dendrix/error.hpp"
#include "dendrix/spaces.hpp"

namespace dendrix {

using CellId = std::size_t;

struct Cell {
    Subset members;        // sorted point indices
    double birth = 0.0;    // smallest threshold at which `members` is a cell
    std::optional<CellId> parent;
    std::vector<CellId> children;

    bool is_singleton() const { return members.size() == 1; }
};

/// Every distinct threshold cell, linked parent to child. Cell i is the
/// singleton of point i; merged cells follow in order of birth; the root
/// (the whole space) comes last.
class CellHierarchy {
public:
    std::size_t size() const { return cells_.size(); }
    std::size_t point_count() const { return point_count_; }
    const std::vector<Cell>& cells() const { return cells_; }
    const Cell& operator[](CellId id) const { return cells_.at(id); }
    CellId root() const { return root_; }
    CellId singleton(std::size_t point) const {
        if (point >= point_count_) throw Error(ErrorCode::IndexOutOfRange, "point index", {point});
        return point;
    }

private:
    friend CellHierarchy build_cell_hierarchy(const MetricSpace& space);

    std::vector<Cell> cells_;
    CellId root_ = 0;
    std::size_t point_count_ = 0;
};

namespace detail {

inline void require_point(const MetricSpace& space, std::size_t i) {
    if (i >= space.size()) throw Error(ErrorCode::IndexOutOfRange, "point index", {i});
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<int> rank_;
};

struct WeightedEdge {
    double weight;
    std::size_t u, v;
};

// Prim on the complete graph, O(n^2).
inline std::vector<WeightedEdge> minimum_spanning_tree(const MetricSpace& space) {
    const std::size_t n = space.size();
    std::vector<WeightedEdge> tree;
    if (n < 2) return tree;
    std::vector<bool> in_tree(n, false);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> link(n, 0);
    in_tree[0] = true;
    for (std::size_t j = 1; j < n; ++j) {
        best[j] = space.distance(0, j);
        link[j] = 0;
    }
    for (std::size_t step = 1; step < n; ++step) {
        std::size_t next = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (!in_tree[j] && (next == n || best[j] < best[next])) next = j;
        }
        in_tree[next] = true;
        tree.push_back({best[next], link[next], next});
        for (std::size_t j = 0; j < n; ++j) {
            if (!in_tree[j] && space.distance(next, j) < best[j]) {
                best[j] = space.distance(next, j);
                link[j] = next;
            }
        }
    }
    return tree;
}

}  // namespace detail

/// True iff a chain x = x_1, ..., x_m = y exists with every gap d(x_i, x_{i+1}) <= theta.
inline bool chain_connected(const MetricSpace& space, std::size_t x, std::size_t y, double theta) {
    detail::require_point(space, x);
    detail::require_point(space, y);
    if (x == y) return true;
    std::vector<bool> seen(space.size(), false);
    std::queue<std::size_t> frontier;
    frontier.push(x);
    seen[x] = true;
    while (!frontier.empty()) {
        const std::size_t u = frontier.front();
        frontier.pop();
        for (std::size_t v = 0; v < space.size(); ++v) {
            if (seen[v] || space.distance(u, v) > theta) continue;
            if (v == y) return true;
            seen[v] = true;
            frontier.push(v);
        }
    }
    return false;
}

/// Partition into theta-cells: components of the graph with edges {d <= theta}.
/// Blocks are sorted internally and ordered by their smallest member.
inline std::vector<Subset> cells_at_threshold(const MetricSpace& space, double theta) {
    if (theta < 0.0) throw Error(ErrorCode::BadParams, "threshold must be >= 0");
    const std::size_t n = space.size();
    std::vector<bool> seen(n, false);
    std::vector<Subset> blocks;
    for (std::size_t start = 0; start < n; ++start) {
        if (seen[start]) continue;
        Subset block{start};
        seen[start] = true;
        for (std::size_t head = 0; head < block.size(); ++head) {
            const std::size_t u = block[head];
            for (std::size_t v = 0; v < n; ++v) {
                if (!seen[v] && space.distance(u, v) <= theta) {
                    seen[v] = true;
                    block.push_back(v);
                }
            }
        }
        std::sort(block.begin(), block.end());
        blocks.push_back(std::move(block));
    }
    return blocks;
}

/// Single-linkage construction: sort the minimum spanning tree edges and merge
/// with union-find. All components joined at one weight become children of a
/// single new cell, since the intermediate groupings are not cells.
inline CellHierarchy build_cell_hierarchy(const MetricSpace& space) {
    const std::size_t n = space.size();
    if (n == 0) throw Error(ErrorCode::DegenerateSpace, "space has no points");

    CellHierarchy h;
    h.point_count_ = n;
    h.cells_.reserve(2 * n - 1);
    for (std::size_t i = 0; i < n; ++i) h.cells_.push_back(Cell{{i}, 0.0, std::nullopt, {}});

    auto edges = detail::minimum_spanning_tree(space);
    std::stable_sort(edges.begin(), edges.end(),
                     [](const auto& a, const auto& b) { return a.weight < b.weight; });

    detail::DisjointSets sets(n);
    std::vector<CellId> cell_of_root(n);
    std::iota(cell_of_root.begin(), cell_of_root.end(), CellId{0});

    for (std::size_t begin = 0; begin < edges.size();) {
        std::size_t end = begin;
        while (end < edges.size() && edges[end].weight == edges[begin].weight) ++end;
        const double weight = edges[begin].weight;

        std::vector<std::size_t> prior_roots;
        for (std::size_t e = begin; e < end; ++e) {
            prior_roots.push_back(sets.find(edges[e].u));
            prior_roots.push_back(sets.find(edges[e].v));
        }
        std::sort(prior_roots.begin(), prior_roots.end());
        prior_roots.erase(std::unique(prior_roots.begin(), prior_roots.end()), prior_roots.end());
        std::vector<CellId> prior_cells;
        for (std::size_t r : prior_roots) prior_cells.push_back(cell_of_root[r]);

        for (std::size_t e = begin; e < end; ++e) sets.unite(edges[e].u, edges[e].v);

        std::map<std::size_t, std::vector<CellId>> merged;  // new root -> absorbed cells
        for (std::size_t k = 0; k < prior_roots.size(); ++k) {
            merged[sets.find(prior_roots[k])].push_back(prior_cells[k]);
        }
        for (auto& [root, children] : merged) {
            std::sort(children.begin(), children.end());
            Cell cell;
            cell.birth = weight;
            cell.children = children;
            for (CellId child : children) {
                const auto& m = h.cells_[child].members;
                cell.members.insert(cell.members.end(), m.begin(), m.end());
            }
            std::sort(cell.members.begin(), cell.members.end());
            const CellId id = h.cells_.size();
            for (CellId child : children) h.cells_[child].parent = id;
            h.cells_.push_back(std::move(cell));
            cell_of_root[root] = id;
        }
        begin = end;
    }
    h.root_ = h.cells_.size() - 1;
    return h;
}

}  // namespace dendrix
