#pragma once

// Coordinate sequences and index arithmetic for the fiber space C: the points
// p_t (upper half-plane) enumerated column by column, bottom to top, and their
// reflections q_t.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include "dendrix/error.hpp"

namespace dendrix {

/// Three strictly decreasing sequences x_i -> x_lim, y_i -> y_lim, z_i -> z_lim
/// (indices from 1) that place the columns and rows of the fiber space.
class SequenceParams {
public:
    using Rule = std::function<double(std::uint64_t)>;

    static constexpr std::uint64_t kCheckedPrefix = 10000;

    /// x_i = 1/i, y_i = 1/i, z_i = 2 + 1/i.
    SequenceParams()
        : SequenceParams([](std::uint64_t i) { return 1.0 / static_cast<double>(i); },
                         [](std::uint64_t i) { return 1.0 / static_cast<double>(i); },
                         [](std::uint64_t i) { return 2.0 + 1.0 / static_cast<double>(i); }) {}

    SequenceParams(Rule x, Rule y, Rule z, double x_limit = 0.0, double y_limit = 0.0,
                   double z_limit = 2.0)
        : x_(std::move(x)),
          y_(std::move(y)),
          z_(std::move(z)),
          x_limit_(x_limit),
          y_limit_(y_limit),
          z_limit_(z_limit) {
        check_rule(x_, "x", 1.0, x_limit_);
        check_rule(y_, "y", 1.0, y_limit_);
        check_rule(z_, "z", 3.0, z_limit_);
    }

    double x(std::uint64_t i) const { return x_(i); }
    double y(std::uint64_t i) const { return y_(i); }
    double z(std::uint64_t i) const { return z_(i); }

    double x_limit() const { return x_limit_; }
    double y_limit() const { return y_limit_; }
    double z_limit() const { return z_limit_; }

private:
    static void check_rule(const Rule& rule, const char* name, double first, double limit) {
        if (!rule) throw Error(ErrorCode::BadParams, std::string(name) + " rule is empty");
        if (rule(1) != first) {
            throw Error(ErrorCode::BadParams,
                        std::string(name) + "_1 must equal " + std::to_string(first));
        }
        double previous = rule(1);
        for (std::uint64_t i = 2; i <= kCheckedPrefix; ++i) {
            const double value = rule(i);
            if (!(value < previous) || !(value > limit)) {
                throw Error(ErrorCode::BadParams,
                            std::string(name) + " must decrease strictly towards its limit",
                            {static_cast<std::size_t>(i)});
            }
            previous = value;
        }
    }

    Rule x_, y_, z_;
    double x_limit_, y_limit_, z_limit_;
};

/// Largest column whose indices fit the 64-bit fiber counter.
inline constexpr int kMaxColumn = 18;

namespace detail {

constexpr std::uint64_t pow10(int n) {
    std::uint64_t value = 1;
    for (int i = 0; i < n; ++i) value *= 10;
    return value;
}

// tops[n] = T_n = -1 + sum_{i<=n} (i + 10^i); tops[0] is unused.
constexpr std::array<std::uint64_t, kMaxColumn + 1> make_tops() {
    std::array<std::uint64_t, kMaxColumn + 1> tops{};
    std::uint64_t sum = 0;
    for (int n = 1; n <= kMaxColumn; ++n) {
        sum += static_cast<std::uint64_t>(n) + pow10(n);
        tops[n] = sum - 1;
    }
    return tops;
}

inline constexpr auto kTops = make_tops();

}  // namespace detail

/// Number of points in column n of P: n y-rows plus 10^n z-rows.
constexpr std::uint64_t column_size(int n) {
    return static_cast<std::uint64_t>(n) + detail::pow10(n);
}

/// T_n, the index of the top point of column n.
inline std::uint64_t column_top(int n) {
    if (n < 1 || n > kMaxColumn) {
        throw Error(ErrorCode::IndexOverflow, "column " + std::to_string(n) + " outside 1.." +
                                                  std::to_string(kMaxColumn));
    }
    return detail::kTops[static_cast<std::size_t>(n)];
}

/// First fiber index of column n (T_{n-1} + 1, with T_0 + 1 = 0).
inline std::uint64_t column_start(int n) { return n == 1 ? 0 : column_top(n - 1) + 1; }

struct FiberLocation {
    int column = 1;
    std::uint64_t row = 0;  // 0 = bottom of the column
    bool is_top = false;
};

inline FiberLocation locate_fiber_index(std::uint64_t t) {
    const auto& tops = detail::kTops;
    if (t > tops[kMaxColumn]) {
        throw Error(ErrorCode::IndexOverflow, "fiber index " + std::to_string(t) +
                                                  " beyond column " + std::to_string(kMaxColumn));
    }
    const auto it = std::lower_bound(tops.begin() + 1, tops.end(), t);
    const int n = static_cast<int>(it - tops.begin());
    const std::uint64_t row = t - column_start(n);
    return {n, row, t == tops[static_cast<std::size_t>(n)]};
}

struct Coords {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Coords&, const Coords&) = default;
};

/// d_C: the max-coordinate distance on the plane.
inline double chebyshev(Coords a, Coords b) {
    return std::max(std::abs(a.x - b.x), std::abs(a.y - b.y));
}

struct FiberCoords {
    Coords coords;
    int column = 1;
    bool is_top = false;
};

/// Coordinates of p_t. Rows of column n, bottom to top, are
/// (x_n, y_n), ..., (x_n, y_1), (x_n, z_{10^n}), ..., (x_n, z_1).
inline FiberCoords fiber_point(std::uint64_t t, const SequenceParams& params) {
    const FiberLocation loc = locate_fiber_index(t);
    const auto n = static_cast<std::uint64_t>(loc.column);
    const double x = params.x(n);
    const double y = loc.row < n ? params.y(n - loc.row)
                                 : params.z(detail::pow10(loc.column) - (loc.row - n));
    return {{x, y}, loc.column, loc.is_top};
}

}  // namespace dendrix
