#pragma once

// The skew product f(omega, eta, c) = (tau(omega), eta, phi_{omega,eta}(c)) on
// Omega x Omega x C: an adding machine as timer, a constant control sequence,
// and a fiber walk through the columns of C that branches at every column top.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dendrix/error.hpp"
#include "dendrix/sequences.hpp"
#include "dendrix/spaces.hpp"

namespace dendrix {

/// An eventually-zero point of {0,1}^N_0, stored least-significant position
/// first. Trailing zeros are never stored, so equality is semantic.
class OmegaWord {
public:
    /// Depth to which a periodic literal ("0101...") is expanded.
    static constexpr std::size_t kPeriodicDepth = 64;

    OmegaWord() = default;

    explicit OmegaWord(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
        for (auto& b : bits_) b = b ? 1 : 0;
        trim();
    }

    /// Binary expansion of `value`, i.e. tau^value applied to the zero word.
    static OmegaWord from_integer(std::uint64_t value) {
        OmegaWord w;
        for (; value; value >>= 1) w.bits_.push_back(static_cast<std::uint8_t>(value & 1U));
        return w;
    }

    /// Parses a bit string, position 0 first. A trailing "..." repeats the
    /// pattern up to kPeriodicDepth positions.
    static OmegaWord parse(std::string_view text) {
        bool periodic = false;
        if (text.size() >= 3 && text.substr(text.size() - 3) == "...") {
            periodic = true;
            text.remove_suffix(3);
        }
        std::vector<std::uint8_t> bits;
        for (char c : text) {
            if (c != '0' && c != '1') {
                throw Error(ErrorCode::Parse, "bit string may only contain 0 and 1: '" + std::string(text) + "'");
            }
            bits.push_back(c == '1');
        }
        if (periodic) {
            if (bits.empty()) throw Error(ErrorCode::Parse, "empty periodic pattern");
            const std::size_t period = bits.size();
            while (bits.size() < kPeriodicDepth) bits.push_back(bits[bits.size() - period]);
        }
        return OmegaWord(std::move(bits));
    }

    bool bit(std::size_t i) const { return i < bits_.size() && bits_[i]; }
    void set_bit(std::size_t i, bool value) {
        if (i >= bits_.size()) {
            if (!value) return;
            bits_.resize(i + 1, 0);
        }
        bits_[i] = value;
        trim();
    }

    /// Number of stored positions (index of the last 1, plus one).
    std::size_t length() const { return bits_.size(); }
    bool is_zero() const { return bits_.empty(); }

    /// In-place adding machine step: add 1 at position 0, carrying right.
    void increment() {
        std::size_t i = 0;
        while (i < bits_.size() && bits_[i]) bits_[i++] = 0;
        if (i == bits_.size()) bits_.push_back(1);
        else bits_[i] = 1;
    }

    std::string to_string() const {
        if (bits_.empty()) return "0";
        std::string out;
        for (auto b : bits_) out.push_back(b ? '1' : '0');
        return out;
    }

    friend bool operator==(const OmegaWord&, const OmegaWord&) = default;

private:
    void trim() {
        while (!bits_.empty() && bits_.back() == 0) bits_.pop_back();
    }

    std::vector<std::uint8_t> bits_;
};

inline OmegaWord tau(OmegaWord omega) {
    omega.increment();
    return omega;
}

/// First position where the words differ, if any.
inline std::optional<std::size_t> first_difference(const OmegaWord& a, const OmegaWord& b) {
    const std::size_t n = std::max(a.length(), b.length());
    for (std::size_t i = 0; i < n; ++i) {
        if (a.bit(i) != b.bit(i)) return i;
    }
    return std::nullopt;
}

/// 2^-(first differing position), 0 for equal words.
inline double d_omega(const OmegaWord& a, const OmegaWord& b) {
    const auto i = first_difference(a, b);
    return i ? std::ldexp(1.0, -static_cast<int>(*i)) : 0.0;
}

/// d_Omega(omega, tau^value(0)) < 2^-n, i.e. positions 0..n agree with the
/// binary expansion of value.
inline bool agrees_with_count(const OmegaWord& omega, std::uint64_t value, int n) {
    for (int i = 0; i <= n; ++i) {
        const bool expected = i < 64 && ((value >> i) & 1U);
        if (omega.bit(static_cast<std::size_t>(i)) != expected) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Fiber space C = P u Q u L

enum class FiberKind { P, Q, Origin, AxisY, AxisTwo, AxisZ };

/// A point of C. P/Q carry the enumeration index t; AxisY/AxisZ carry the row
/// j >= 1 and a sign, realizing (0, +-y_j) and (0, +-z_j); AxisTwo is (0, +-2).
struct FiberPoint {
    FiberKind kind = FiberKind::Origin;
    int sign = 0;
    std::uint64_t index = 0;

    static FiberPoint p(std::uint64_t t) { return {FiberKind::P, 0, t}; }
    static FiberPoint q(std::uint64_t t) { return {FiberKind::Q, 0, t}; }
    static FiberPoint origin() { return {}; }
    static FiberPoint axis_y(int sign, std::uint64_t j) { return {FiberKind::AxisY, sign_of(sign), check_row(j)}; }
    static FiberPoint axis_two(int sign) { return {FiberKind::AxisTwo, sign_of(sign), 0}; }
    static FiberPoint axis_z(int sign, std::uint64_t j) { return {FiberKind::AxisZ, sign_of(sign), check_row(j)}; }

    bool in_limit_set() const { return kind != FiberKind::P && kind != FiberKind::Q; }

    friend bool operator==(const FiberPoint&, const FiberPoint&) = default;

private:
    static int sign_of(int s) {
        if (s != 1 && s != -1) throw Error(ErrorCode::BadParams, "axis sign must be +1 or -1");
        return s;
    }
    static std::uint64_t check_row(std::uint64_t j) {
        if (j < 1) throw Error(ErrorCode::BadParams, "axis row must be >= 1");
        return j;
    }
};

inline Coords realize(const FiberPoint& c, const SequenceParams& params) {
    switch (c.kind) {
        case FiberKind::P: return fiber_point(c.index, params).coords;
        case FiberKind::Q: {
            const Coords p = fiber_point(c.index, params).coords;
            return {p.x, -p.y};
        }
        case FiberKind::Origin: return {0.0, 0.0};
        case FiberKind::AxisY: return {0.0, c.sign * params.y(c.index)};
        case FiberKind::AxisTwo: return {0.0, c.sign * params.z_limit()};
        case FiberKind::AxisZ: return {0.0, c.sign * params.z(c.index)};
    }
    return {};
}

/// Literal syntax: P:t, Q:t, origin, y+:j, y-:j, two+, two-, z+:j, z-:j.
inline FiberPoint parse_fiber(std::string_view text) {
    auto number = [&](std::string_view digits) {
        std::uint64_t value = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
        if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
            throw Error(ErrorCode::Parse, "bad fiber index in '" + std::string(text) + "'");
        }
        return value;
    };
    if (text == "origin") return FiberPoint::origin();
    if (text == "two+") return FiberPoint::axis_two(1);
    if (text == "two-") return FiberPoint::axis_two(-1);
    const auto colon = text.find(':');
    if (colon != std::string_view::npos) {
        const auto head = text.substr(0, colon);
        const auto value = number(text.substr(colon + 1));
        if (head == "P") return FiberPoint::p(value);
        if (head == "Q") return FiberPoint::q(value);
        if (head == "y+") return FiberPoint::axis_y(1, value);
        if (head == "y-") return FiberPoint::axis_y(-1, value);
        if (head == "z+") return FiberPoint::axis_z(1, value);
        if (head == "z-") return FiberPoint::axis_z(-1, value);
    }
    throw Error(ErrorCode::Parse, "unknown fiber literal '" + std::string(text) + "'");
}

inline std::string to_string(const FiberPoint& c) {
    const char* s = c.sign > 0 ? "+" : "-";
    switch (c.kind) {
        case FiberKind::P: return "P:" + std::to_string(c.index);
        case FiberKind::Q: return "Q:" + std::to_string(c.index);
        case FiberKind::Origin: return "origin";
        case FiberKind::AxisY: return std::string("y") + s + ":" + std::to_string(c.index);
        case FiberKind::AxisTwo: return std::string("two") + s;
        case FiberKind::AxisZ: return std::string("z") + s + ":" + std::to_string(c.index);
    }
    return "?";
}

/// The fiber map phi_{omega,eta}. P and Q are walked index by index; at a
/// column top T_n the walk continues in P (eta_n = 0) or Q (eta_n = 1) when
/// the timer agrees with tau^{T_n}(0) on positions 0..n, and drops to the
/// origin otherwise. On L the origin and (0, +-2) are fixed, (0, +-3) goes to
/// the origin and every other point moves one step away from the origin.
inline FiberPoint phi(const OmegaWord& omega, const OmegaWord& eta, const FiberPoint& c) {
    switch (c.kind) {
        case FiberKind::P:
        case FiberKind::Q: {
            const FiberLocation loc = locate_fiber_index(c.index);
            if (!loc.is_top) return {c.kind, 0, c.index + 1};
            if (loc.column == kMaxColumn) {
                throw Error(ErrorCode::IndexOverflow, "fiber walk leaves column " + std::to_string(kMaxColumn));
            }
            if (!agrees_with_count(omega, c.index, loc.column)) return FiberPoint::origin();
            return eta.bit(static_cast<std::size_t>(loc.column)) ? FiberPoint::q(c.index + 1)
                                                                 : FiberPoint::p(c.index + 1);
        }
        case FiberKind::Origin:
        case FiberKind::AxisTwo: return c;
        case FiberKind::AxisY:
            return c.index == 1 ? FiberPoint::axis_two(c.sign) : FiberPoint::axis_y(c.sign, c.index - 1);
        case FiberKind::AxisZ:
            return c.index == 1 ? FiberPoint::origin() : FiberPoint::axis_z(c.sign, c.index - 1);
    }
    return c;
}

struct SkewState {
    OmegaWord omega;
    OmegaWord eta;
    FiberPoint c;

    friend bool operator==(const SkewState&, const SkewState&) = default;
};

/// One step of f, in place. The fiber map reads the timer before it advances.
inline void advance(SkewState& s) {
    s.c = phi(s.omega, s.eta, s.c);
    s.omega.increment();
}

inline SkewState step(SkewState s) {
    advance(s);
    return s;
}

/// The product metric max{d_Omega, d_Omega, d_C}.
inline double skew_distance(const SkewState& a, const SkewState& b, const SequenceParams& params) {
    return std::max({d_omega(a.omega, b.omega), d_omega(a.eta, b.eta),
                     chebyshev(realize(a.c, params), realize(b.c, params))});
}

/// Yields d(f^t(a), f^t(b)) for t = 0, 1, 2, ...
class OrbitStream {
public:
    OrbitStream(SkewState a, SkewState b, SequenceParams params = {})
        : a_(std::move(a)), b_(std::move(b)), params_(std::move(params)) {}

    double next() {
        const double d = skew_distance(a_, b_, params_);
        advance(a_);
        advance(b_);
        ++t_;
        return d;
    }

    std::uint64_t time() const { return t_; }
    const SkewState& first() const { return a_; }
    const SkewState& second() const { return b_; }

private:
    SkewState a_, b_;
    SequenceParams params_;
    std::uint64_t t_ = 0;
};

inline std::vector<double> orbit_distances(const SkewState& a, const SkewState& b, std::size_t horizon,
                                           const SequenceParams& params = {}) {
    if (horizon < 1) throw Error(ErrorCode::BadParams, "horizon must be >= 1");
    OrbitStream stream(a, b, params);
    std::vector<double> out;
    out.reserve(horizon);
    for (std::size_t t = 0; t < horizon; ++t) out.push_back(stream.next());
    return out;
}

/// Diameter of the possible images of the column tops {p_{T_n} : N <= n <= last},
/// i.e. of {p_{T_n + 1}, q_{T_n + 1}, origin}.
inline double top_image_diameter(int first_column, const SequenceParams& params = {},
                                 int last_column = kMaxColumn - 1) {
    std::vector<Coords> images{{0.0, 0.0}};
    for (int n = first_column; n <= last_column; ++n) {
        const std::uint64_t next = column_top(n) + 1;
        images.push_back(realize(FiberPoint::p(next), params));
        images.push_back(realize(FiberPoint::q(next), params));
    }
    double diam = 0.0;
    for (const auto& a : images) {
        for (const auto& b : images) diam = std::max(diam, chebyshev(a, b));
    }
    return diam;
}

// ---------------------------------------------------------------------------
// Orbit CSV: header "t,dist", one row per step.

inline void write_orbit_csv(std::ostream& out, std::span<const double> distances) {
    out << "t,dist\n";
    char buf[64];
    for (std::size_t t = 0; t < distances.size(); ++t) {
        auto [p1, e1] = std::to_chars(buf, buf + sizeof buf, t);
        *p1++ = ',';
        auto [p2, e2] = std::to_chars(p1, buf + sizeof buf, distances[t]);
        *p2++ = '\n';
        out.write(buf, p2 - buf);
    }
}

inline std::vector<double> read_orbit_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,dist", 0) != 0) {
        throw Error(ErrorCode::Parse, "orbit CSV must start with the header t,dist");
    }
    std::vector<double> out;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        double value = 0.0;
        std::uint64_t t = 0;
        const char* end = line.data() + line.size();
        if (comma == std::string::npos ||
            std::from_chars(line.data(), line.data() + comma, t).ec != std::errc() ||
            std::from_chars(line.data() + comma + 1, end, value).ec != std::errc() || t != row) {
            throw Error(ErrorCode::Parse, "bad orbit CSV row " + std::to_string(row + 1));
        }
        out.push_back(value);
        ++row;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Finite truncation of the skew product

struct TruncatedSystem {
    MetricSpace space;
    std::vector<SkewState> states;  // state of each point
    std::vector<std::size_t> map;   // point -> image point
};

/// States (omega, eta, c) with omega over `omega_bits` positions, eta over
/// `eta_bits` positions and c in {p_0..p_K, q_0..q_K, origin}, K = fiber_max.
/// The timer runs modulo 2^omega_bits (tau on the retained positions) and any
/// fiber step leaving the retained set lands on the origin.
inline TruncatedSystem truncated_skew_system(int omega_bits, int eta_bits, std::uint64_t fiber_max,
                                             const SequenceParams& params = {}) {
    if (omega_bits < 1 || omega_bits > 16 || eta_bits < 1 || eta_bits > 16) {
        throw Error(ErrorCode::BadParams, "truncation widths must be in 1..16 bits");
    }
    std::vector<FiberPoint> fibers;
    for (std::uint64_t t = 0; t <= fiber_max; ++t) fibers.push_back(FiberPoint::p(t));
    for (std::uint64_t t = 0; t <= fiber_max; ++t) fibers.push_back(FiberPoint::q(t));
    fibers.push_back(FiberPoint::origin());

    const std::uint64_t omegas = std::uint64_t{1} << omega_bits;
    const std::uint64_t etas = std::uint64_t{1} << eta_bits;
    auto index_of = [&](std::uint64_t w, std::uint64_t e, std::size_t c) {
        return static_cast<std::size_t>((w * etas + e) * fibers.size() + c);
    };
    auto fiber_index = [&](const FiberPoint& c) -> std::size_t {
        const auto it = std::find(fibers.begin(), fibers.end(), c);
        return it == fibers.end() ? fibers.size() - 1 : static_cast<std::size_t>(it - fibers.begin());
    };

    std::vector<SkewState> states;
    std::vector<std::size_t> map;
    std::vector<std::string> labels;
    std::vector<Coords> coords;
    for (std::uint64_t w = 0; w < omegas; ++w) {
        for (std::uint64_t e = 0; e < etas; ++e) {
            for (std::size_t c = 0; c < fibers.size(); ++c) {
                SkewState s{OmegaWord::from_integer(w), OmegaWord::from_integer(e), fibers[c]};
                labels.push_back(s.omega.to_string() + "|" + s.eta.to_string() + "|" + to_string(s.c));
                coords.push_back(realize(s.c, params));
                const FiberPoint image = phi(s.omega, s.eta, s.c);
                map.push_back(index_of((w + 1) % omegas, e, fiber_index(image)));
                states.push_back(std::move(s));
            }
        }
    }
    const std::size_t n = states.size();
    std::vector<double> matrix(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = std::max({d_omega(states[i].omega, states[j].omega),
                                       d_omega(states[i].eta, states[j].eta),
                                       chebyshev(coords[i], coords[j])});
            matrix[i * n + j] = d;
            matrix[j * n + i] = d;
        }
    }
    return {validate_metric(std::move(labels), std::move(matrix)), std::move(states), std::move(map)};
}

}  // namespace dendrix
