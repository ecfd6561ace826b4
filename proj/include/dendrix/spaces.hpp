#pragma once

// Finite metric spaces: validation, set geometry (diameter, one-sided distance,
// Hausdorff distance), generators, and the space file format.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dendrix/error.hpp"
#include "dendrix/sequences.hpp"

namespace dendrix {

/// Indices into a MetricSpace.
using Subset = std::vector<std::size_t>;

/// Relative tolerance used by the metric-axiom checks.
inline constexpr double kMetricTolerance = 1e-9;

/// A labeled finite point set with a validated distance matrix. Only
/// validate_metric() (and the generators built on it) can produce one.
class MetricSpace {
public:
    std::size_t size() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }

    double distance(std::size_t i, std::size_t j) const { return matrix_[i * size() + j]; }

    /// Row-major n x n matrix, exactly as supplied.
    std::span<const double> matrix() const { return matrix_; }

    std::size_t index_of(std::string_view label) const {
        const auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end()) {
            throw Error(ErrorCode::IndexOutOfRange, "unknown label '" + std::string(label) + "'");
        }
        return static_cast<std::size_t>(it - labels_.begin());
    }

    friend bool operator==(const MetricSpace&, const MetricSpace&) = default;

private:
    MetricSpace(std::vector<std::string> labels, std::vector<double> matrix)
        : labels_(std::move(labels)), matrix_(std::move(matrix)) {}

    friend MetricSpace validate_metric(std::vector<std::string> labels,
                                       std::vector<double> matrix);

    std::vector<std::string> labels_;
    std::vector<double> matrix_;
};

/// Checks the metric axioms on a row-major square matrix and returns the
/// validated space. Throws Error naming the first violated axiom together with
/// its witness indices; a TriangleViolation witness {i, j, k} means
/// d(i, j) > d(i, k) + d(k, j).
inline MetricSpace validate_metric(std::vector<std::string> labels, std::vector<double> matrix) {
    const std::size_t n = labels.size();
    if (matrix.size() != n * n) {
        throw Error(ErrorCode::BadShape, "matrix must be " + std::to_string(n) + "x" +
                                             std::to_string(n) + " to match the labels");
    }
    {
        std::unordered_set<std::string> seen;
        for (std::size_t i = 0; i < n; ++i) {
            if (!seen.insert(labels[i]).second) {
                throw Error(ErrorCode::DuplicateLabel, "label '" + labels[i] + "' repeats", {i});
            }
        }
    }
    auto at = [&](std::size_t i, std::size_t j) { return matrix[i * n + j]; };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(at(i, j))) {
                throw Error(ErrorCode::NonFinite, "entry is not finite", {i, j});
            }
            if (at(i, j) < 0.0) throw Error(ErrorCode::NegativeEntry, "entry is negative", {i, j});
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (at(i, i) != 0.0) throw Error(ErrorCode::NonzeroDiagonal, "d(i,i) != 0", {i});
        for (std::size_t j = i + 1; j < n; ++j) {
            const double a = at(i, j);
            const double b = at(j, i);
            if (std::abs(a - b) > kMetricTolerance * std::max(a, b)) {
                throw Error(ErrorCode::Asymmetry, "d(i,j) != d(j,i)", {i, j});
            }
            if (a == 0.0 || b == 0.0) {
                throw Error(ErrorCode::ZeroOffDiagonal, "distinct points at distance 0", {i, j});
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                if (at(i, j) > (at(i, k) + at(k, j)) * (1.0 + kMetricTolerance)) {
                    throw Error(ErrorCode::TriangleViolation, "d(i,j) > d(i,k) + d(k,j)",
                                {i, j, k});
                }
            }
        }
    }
    return MetricSpace(std::move(labels), std::move(matrix));
}

inline MetricSpace validate_metric(std::vector<std::string> labels,
                                   const std::vector<std::vector<double>>& rows) {
    std::vector<double> flat;
    flat.reserve(rows.size() * rows.size());
    for (const auto& row : rows) {
        if (row.size() != rows.size()) throw Error(ErrorCode::BadShape, "matrix is not square");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return validate_metric(std::move(labels), std::move(flat));
}

// ---------------------------------------------------------------------------
// Set geometry

namespace detail {

inline void require_subset(const MetricSpace& space, std::span<const std::size_t> set) {
    if (set.empty()) throw Error(ErrorCode::EmptySubset, "subset is empty");
    for (std::size_t i : set) {
        if (i >= space.size()) throw Error(ErrorCode::IndexOutOfRange, "subset index", {i});
    }
}

inline double directed(const MetricSpace& space, std::span<const std::size_t> from,
                       std::span<const std::size_t> to) {
    double sup = 0.0;
    for (std::size_t a : from) {
        double inf = std::numeric_limits<double>::infinity();
        for (std::size_t b : to) {
            inf = std::min(inf, space.distance(a, b));
            if (inf <= sup) break;  // cannot raise the sup any more
        }
        sup = std::max(sup, inf);
    }
    return sup;
}

}  // namespace detail

/// sup over a in A of inf over b in B of d(a, b).
inline double directed_distance(const MetricSpace& space, std::span<const std::size_t> a,
                                std::span<const std::size_t> b) {
    detail::require_subset(space, a);
    detail::require_subset(space, b);
    return detail::directed(space, a, b);
}

inline double hausdorff(const MetricSpace& space, std::span<const std::size_t> a,
                        std::span<const std::size_t> b) {
    detail::require_subset(space, a);
    detail::require_subset(space, b);
    return std::max(detail::directed(space, a, b), detail::directed(space, b, a));
}

inline double diameter(const MetricSpace& space, std::span<const std::size_t> a) {
    detail::require_subset(space, a);
    double diam = 0.0;
    for (std::size_t i : a) {
        for (std::size_t j : a) diam = std::max(diam, space.distance(i, j));
    }
    return diam;
}

struct SubsetGeometry {
    double diam_a = 0.0;
    double dist_ab = 0.0;
    double dist_ba = 0.0;
    double hausdorff = 0.0;
};

inline SubsetGeometry subset_geometry(const MetricSpace& space, std::span<const std::size_t> a,
                                      std::span<const std::size_t> b) {
    SubsetGeometry g;
    g.diam_a = diameter(space, a);
    g.dist_ab = directed_distance(space, a, b);
    g.dist_ba = directed_distance(space, b, a);
    g.hausdorff = std::max(g.dist_ab, g.dist_ba);
    return g;
}

// ---------------------------------------------------------------------------
// Generators

enum class CoordMetric { Euclidean, Max };

inline MetricSpace from_coords(std::vector<std::string> labels,
                               const std::vector<std::vector<double>>& coords,
                               CoordMetric metric) {
    const std::size_t n = coords.size();
    if (labels.size() != n) throw Error(ErrorCode::BadShape, "labels and coords differ in length");
    for (const auto& c : coords) {
        if (c.size() != coords.front().size()) {
            throw Error(ErrorCode::BadShape, "coordinate tuples differ in dimension");
        }
    }
    std::vector<double> matrix(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < coords[i].size(); ++k) {
                const double delta = std::abs(coords[i][k] - coords[j][k]);
                d = metric == CoordMetric::Euclidean ? d + delta * delta : std::max(d, delta);
            }
            if (metric == CoordMetric::Euclidean) d = std::sqrt(d);
            matrix[i * n + j] = d;
            matrix[j * n + i] = d;
        }
    }
    return validate_metric(std::move(labels), std::move(matrix));
}

/// Level-`depth` approximation of the middle-thirds Cantor set:
/// { sum_i b_i * 2 / 3^i : b in {0,1}^depth }.
inline MetricSpace cantor_space(int depth) {
    if (depth < 0 || depth > 12) throw Error(ErrorCode::BadParams, "cantor depth must be in 0..12");
    const std::size_t count = std::size_t{1} << depth;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> coords;
    for (std::size_t word = 0; word < count; ++word) {
        std::string label = "c";
        double value = 0.0;
        double scale = 1.0;
        for (int i = depth - 1; i >= 0; --i) {  // most significant digit first
            scale /= 3.0;
            const bool bit = (word >> i) & 1U;
            label.push_back(bit ? '1' : '0');
            if (bit) value += 2.0 * scale;
        }
        labels.push_back(std::move(label));
        coords.push_back({value});
    }
    return from_coords(std::move(labels), coords, CoordMetric::Euclidean);
}

/// {1, 1/2, ..., 1/k, 0} on the line.
inline MetricSpace harmonic_space(int k) {
    if (k < 1) throw Error(ErrorCode::BadParams, "harmonic k must be >= 1");
    std::vector<std::string> labels;
    std::vector<std::vector<double>> coords;
    for (int i = 1; i <= k; ++i) {
        labels.push_back(i == 1 ? "1" : "1/" + std::to_string(i));
        coords.push_back({1.0 / static_cast<double>(i)});
    }
    labels.emplace_back("0");
    coords.push_back({0.0});
    return from_coords(std::move(labels), coords, CoordMetric::Euclidean);
}

/// All points of P and Q in columns 1..n_max, with the max-coordinate metric.
/// Labels are "P:t" and "Q:t".
inline MetricSpace fiber_space(int n_max, const SequenceParams& params = {}) {
    if (n_max < 1 || n_max > 3) throw Error(ErrorCode::BadParams, "fiber_c n_max must be in 1..3");
    const std::uint64_t count = column_top(n_max) + 1;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> coords;
    for (const char half : {'P', 'Q'}) {
        for (std::uint64_t t = 0; t < count; ++t) {
            const Coords c = fiber_point(t, params).coords;
            labels.push_back(std::string(1, half) + ":" + std::to_string(t));
            coords.push_back({c.x, half == 'P' ? c.y : -c.y});
        }
    }
    return from_coords(std::move(labels), coords, CoordMetric::Max);
}

/// Cartesian product with the max-combined metric; labels are "(a,b,...)".
inline MetricSpace product_space(std::span<const MetricSpace> factors) {
    if (factors.empty()) throw Error(ErrorCode::BadParams, "product needs at least one factor");
    std::size_t n = 1;
    for (const auto& f : factors) {
        if (f.size() == 0) throw Error(ErrorCode::BadParams, "product factor is empty");
        n *= f.size();
    }
    // Mixed-radix decoding, first factor most significant.
    auto digits = [&](std::size_t index) {
        std::vector<std::size_t> out(factors.size());
        for (std::size_t k = factors.size(); k-- > 0;) {
            out[k] = index % factors[k].size();
            index /= factors[k].size();
        }
        return out;
    };
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> tuples;
    for (std::size_t i = 0; i < n; ++i) {
        tuples.push_back(digits(i));
        std::string label = "(";
        for (std::size_t k = 0; k < factors.size(); ++k) {
            if (k) label += ",";
            label += factors[k].label(tuples.back()[k]);
        }
        labels.push_back(label + ")");
    }
    std::vector<double> matrix(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < factors.size(); ++k) {
                d = std::max(d, factors[k].distance(tuples[i][k], tuples[j][k]));
            }
            matrix[i * n + j] = d;
        }
    }
    return validate_metric(std::move(labels), std::move(matrix));
}

// ---------------------------------------------------------------------------
// Space file format:
//   {"labels": [...], "matrix": [[...], ...]}
//   {"labels": [...], "coords": [[...], ...], "metric": "euclidean" | "max"}

inline MetricSpace space_from_json(const nlohmann::json& doc) {
    try {
        if (!doc.is_object() || !doc.contains("labels")) {
            throw Error(ErrorCode::Parse, "space file needs an object with \"labels\"");
        }
        auto labels = doc.at("labels").get<std::vector<std::string>>();
        const bool has_matrix = doc.contains("matrix");
        const bool has_coords = doc.contains("coords");
        if (has_matrix == has_coords) {
            throw Error(ErrorCode::Parse, "space file needs exactly one of \"matrix\", \"coords\"");
        }
        if (has_matrix) {
            return validate_metric(std::move(labels),
                                   doc.at("matrix").get<std::vector<std::vector<double>>>());
        }
        const std::string metric = doc.value("metric", std::string("euclidean"));
        if (metric != "euclidean" && metric != "max") {
            throw Error(ErrorCode::Parse, "unknown metric '" + metric + "'");
        }
        return from_coords(std::move(labels),
                           doc.at("coords").get<std::vector<std::vector<double>>>(),
                           metric == "max" ? CoordMetric::Max : CoordMetric::Euclidean);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, e.what());
    }
}

inline nlohmann::json space_to_json(const MetricSpace& space) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < space.size(); ++i) {
        auto row = space.matrix().subspan(i * space.size(), space.size());
        rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return {{"labels", space.labels()}, {"matrix", std::move(rows)}};
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Parse, path + ": " + e.what());
    }
}

inline MetricSpace load_space(const std::string& path) { return space_from_json(read_json_file(path)); }

// ---------------------------------------------------------------------------
// Dispatch by kind name

struct SpaceParams {
    int depth = 0;
    int k = 1;
    int n_max = 1;
    std::vector<MetricSpace> factors;
    std::string path;
    SequenceParams sequences;
};

/// kind is one of: cantor, harmonic, fiber_c, product, from_file.
inline MetricSpace generate_space(std::string_view kind, const SpaceParams& params) {
    if (kind == "cantor") return cantor_space(params.depth);
    if (kind == "harmonic") return harmonic_space(params.k);
    if (kind == "fiber_c") return fiber_space(params.n_max, params.sequences);
    if (kind == "product") return product_space(params.factors);
    if (kind == "from_file") return load_space(params.path);
    throw Error(ErrorCode::BadParams, "unknown space kind '" + std::string(kind) + "'");
}

}  // namespace dendrix
