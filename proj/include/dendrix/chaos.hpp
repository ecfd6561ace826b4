#pragma once

// Empirical distribution functions of orbit-distance streams, Li-Yorke and
// DC3 classification of state pairs, and control-sequence families with
// prescribed agreement patterns.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dendrix/error.hpp"
#include "dendrix/odometer.hpp"
#include "dendrix/sequences.hpp"

namespace dendrix {

/// freq[k][j] = (1/N_k) #{0 <= i < N_k : d_i < s_j}. min/max run over the
/// checkpoints and stand in for liminf/limsup; they are estimates only.
struct DistributionProfile {
    std::vector<double> thresholds;
    std::vector<std::uint64_t> checkpoints;
    std::vector<std::vector<double>> freq;
    std::vector<double> min_freq;
    std::vector<double> max_freq;

    double spread(std::size_t j) const { return max_freq.at(j) - min_freq.at(j); }
};

namespace detail {

inline void require_ascending(std::span<const double> thresholds, std::span<const std::uint64_t> checkpoints) {
    if (thresholds.empty()) throw Error(ErrorCode::BadParams, "threshold grid is empty");
    if (checkpoints.empty()) throw Error(ErrorCode::BadParams, "checkpoint list is empty");
    for (std::size_t j = 0; j < thresholds.size(); ++j) {
        if (!std::isfinite(thresholds[j])) throw Error(ErrorCode::NonFinite, "threshold", {j});
        if (j && !(thresholds[j - 1] < thresholds[j])) {
            throw Error(ErrorCode::BadParams, "thresholds must be strictly ascending", {j});
        }
    }
    if (checkpoints[0] < 1) throw Error(ErrorCode::BadParams, "checkpoints must be >= 1");
    for (std::size_t k = 1; k < checkpoints.size(); ++k) {
        if (!(checkpoints[k - 1] < checkpoints[k])) {
            throw Error(ErrorCode::BadParams, "checkpoints must be strictly ascending", {k});
        }
    }
}

}  // namespace detail

/// Streaming form of distribution_profile: push distances in order, then finish().
class ProfileAccumulator {
public:
    ProfileAccumulator(std::vector<double> thresholds, std::vector<std::uint64_t> checkpoints) {
        detail::require_ascending(thresholds, checkpoints);
        profile_.thresholds = std::move(thresholds);
        profile_.checkpoints = std::move(checkpoints);
        bump_.assign(profile_.thresholds.size() + 1, 0);
    }

    std::uint64_t required_length() const { return profile_.checkpoints.back(); }
    std::uint64_t seen() const { return seen_; }
    bool complete() const { return next_ == profile_.checkpoints.size(); }

    void push(double d) {
        if (complete()) return;
        // d < s_j holds exactly for the thresholds above d.
        const auto& s = profile_.thresholds;
        const auto first = std::upper_bound(s.begin(), s.end(), d) - s.begin();
        ++bump_[static_cast<std::size_t>(first)];
        ++seen_;
        if (seen_ == profile_.checkpoints[next_]) snapshot();
    }

    DistributionProfile finish() const {
        if (!complete()) {
            throw Error(ErrorCode::ShortStream, "stream ended after " + std::to_string(seen_) +
                                                    " values; checkpoint needs " +
                                                    std::to_string(profile_.checkpoints[next_]));
        }
        return profile_;
    }

private:
    void snapshot() {
        const std::size_t m = profile_.thresholds.size();
        std::vector<double> row(m);
        std::uint64_t below = 0;
        for (std::size_t j = 0; j < m; ++j) {
            below += bump_[j];
            row[j] = static_cast<double>(below) / static_cast<double>(seen_);
        }
        if (next_ == 0) {
            profile_.min_freq = row;
            profile_.max_freq = row;
        } else {
            for (std::size_t j = 0; j < m; ++j) {
                profile_.min_freq[j] = std::min(profile_.min_freq[j], row[j]);
                profile_.max_freq[j] = std::max(profile_.max_freq[j], row[j]);
            }
        }
        profile_.freq.push_back(std::move(row));
        ++next_;
    }

    DistributionProfile profile_;
    std::vector<std::uint64_t> bump_;  // bump_[j]: values with s_{j-1} <= d < s_j
    std::uint64_t seen_ = 0;
    std::size_t next_ = 0;
};

inline DistributionProfile distribution_profile(std::span<const double> distances, std::vector<double> thresholds,
                                                std::vector<std::uint64_t> checkpoints) {
    ProfileAccumulator acc(std::move(thresholds), std::move(checkpoints));
    for (std::size_t i = 0; i < distances.size() && !acc.complete(); ++i) acc.push(distances[i]);
    return acc.finish();
}

/// Horizons T_n + 1 for the given columns, so the last step read is the top of column n.
inline std::vector<std::uint64_t> column_checkpoints(std::span<const int> columns) {
    std::vector<std::uint64_t> out;
    for (int n : columns) out.push_back(column_top(n) + 1);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// `count` evenly spaced values from lo to hi inclusive.
inline std::vector<double> threshold_grid(double lo, double hi, std::size_t count) {
    if (count < 1 || !(lo <= hi) || (count > 1 && lo == hi)) {
        throw Error(ErrorCode::BadParams, "threshold grid needs lo < hi and count >= 1");
    }
    if (count == 1) return {lo};
    std::vector<double> out(count);
    for (std::size_t j = 0; j < count; ++j) {
        out[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(count - 1);
    }
    out.back() = hi;
    return out;
}

struct ThresholdInterval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Interval of s on which pairs in opposite halves of a column are always
/// >= s apart while pairs in the same half are < s apart: (max(1, 2 y_1), 2 lim z).
inline ThresholdInterval safe_dc3_interval(const SequenceParams& params = {}) {
    return {std::max(1.0, 2.0 * params.y(1)), 2.0 * params.z_limit()};
}

/// The interval stated for the plotted sequences of the original construction.
inline constexpr ThresholdInterval kNominalDc3Interval{1.0, 4.0};

struct Dc3Evidence {
    double s_lo = 0.0;
    double s_hi = 0.0;
    double gap = 0.0;  // smallest max-min spread on [s_lo, s_hi]
};

struct PairVerdict {
    double proximal_lower_bound = 0.0;
    bool bound_certified = true;  // false when only a distance stream was seen
    double min_observed_distance = 0.0;
    bool li_yorke_possible = true;
    std::optional<Dc3Evidence> dc3;
    DistributionProfile profile;
};

inline constexpr double kDefaultDc3Gap = 0.5;

/// Widest contiguous run of grid thresholds whose spread exceeds `gap`.
inline std::optional<Dc3Evidence> find_dc3_evidence(const DistributionProfile& profile, double gap) {
    std::optional<Dc3Evidence> best;
    const std::size_t m = profile.thresholds.size();
    for (std::size_t j = 0; j < m;) {
        if (!(profile.spread(j) > gap)) {
            ++j;
            continue;
        }
        std::size_t end = j;
        double weakest = profile.spread(j);
        while (end + 1 < m && profile.spread(end + 1) > gap) weakest = std::min(weakest, profile.spread(++end));
        const Dc3Evidence run{profile.thresholds[j], profile.thresholds[end], weakest};
        if (!best || run.s_hi - run.s_lo > best->s_hi - best->s_lo) best = run;
        j = end + 1;
    }
    return best;
}

/// Verdict from a bare distance stream. Without the states no positive lower
/// bound can be certified, so the bound is 0 and Li-Yorke is left open.
inline PairVerdict classify_distances(std::span<const double> distances, std::vector<double> thresholds,
                                      std::vector<std::uint64_t> checkpoints, double gap = kDefaultDc3Gap) {
    PairVerdict v;
    v.profile = distribution_profile(distances, std::move(thresholds), std::move(checkpoints));
    const auto n = static_cast<std::size_t>(v.profile.checkpoints.back());
    v.min_observed_distance = *std::min_element(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(n));
    v.bound_certified = false;
    v.proximal_lower_bound = 0.0;
    v.li_yorke_possible = true;
    v.dc3 = find_dc3_evidence(v.profile, gap);
    return v;
}

/// Simulates the pair up to the last checkpoint. The base components are
/// isometries, so max(d_Omega(omega,omega'), d_Omega(eta,eta')) bounds every
/// orbit distance from below and is exact.
inline PairVerdict classify_pair(const SkewState& a, const SkewState& b, std::vector<double> thresholds,
                                 std::vector<std::uint64_t> checkpoints, const SequenceParams& params = {},
                                 double gap = kDefaultDc3Gap) {
    PairVerdict v;
    v.proximal_lower_bound = std::max(d_omega(a.omega, b.omega), d_omega(a.eta, b.eta));
    // equal states have limsup 0, so they are never a Li-Yorke pair
    v.li_yorke_possible = v.proximal_lower_bound == 0.0 && !(a == b);
    ProfileAccumulator acc(std::move(thresholds), std::move(checkpoints));
    OrbitStream stream(a, b, params);
    double lowest = std::numeric_limits<double>::infinity();
    while (!acc.complete()) {
        const double d = stream.next();
        lowest = std::min(lowest, d);
        acc.push(d);
    }
    v.min_observed_distance = lowest;
    v.profile = acc.finish();
    v.dc3 = find_dc3_evidence(v.profile, gap);
    return v;
}

// ---------------------------------------------------------------------------
// Control-sequence families

using PositionPattern = std::function<bool(std::size_t)>;  // true = coding position

/// `count` words, zero on shared positions. Coding positions c_0 < c_1 < ...
/// below `depth` cycle through the bits of the member number, so two members
/// differing in bit r disagree at every c_j with j = r mod b.
inline std::vector<OmegaWord> scrambled_family(const PositionPattern& coding, std::size_t count, std::size_t depth) {
    if (count < 1) throw Error(ErrorCode::BadParams, "family count must be >= 1");
    if (depth < 1 || depth > 4096) throw Error(ErrorCode::BadParams, "depth must be in 1..4096");
    std::vector<std::size_t> positions;
    for (std::size_t i = 0; i < depth; ++i) {
        if (coding(i)) positions.push_back(i);
    }
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < count) ++bits;
    if (bits > positions.size()) {
        throw Error(ErrorCode::CountTooLarge, std::to_string(count) + " members need " + std::to_string(bits) +
                                                  " coding positions below depth " + std::to_string(depth) +
                                                  ", found " + std::to_string(positions.size()));
    }
    std::vector<OmegaWord> family;
    for (std::size_t k = 0; k < count; ++k) {
        std::vector<std::uint8_t> word(depth, 0);
        if (bits > 0) {
            for (std::size_t j = 0; j < positions.size(); ++j) word[positions[j]] = (k >> (j % bits)) & 1U;
        }
        family.emplace_back(std::move(word));
    }
    return family;
}

struct FamilyStats {
    bool pairwise_distinct = true;
    std::size_t min_agreements = 0;     // over all pairs, positions [first, last]
    std::size_t min_disagreements = 0;
};

inline FamilyStats family_stats(std::span<const OmegaWord> family, std::size_t first, std::size_t last) {
    FamilyStats stats;
    bool any = false;
    for (std::size_t a = 0; a < family.size(); ++a) {
        for (std::size_t b = a + 1; b < family.size(); ++b) {
            std::size_t agree = 0, differ = 0;
            for (std::size_t i = first; i <= last; ++i) {
                (family[a].bit(i) == family[b].bit(i) ? agree : differ) += 1;
            }
            if (family[a] == family[b]) stats.pairwise_distinct = false;
            stats.min_agreements = any ? std::min(stats.min_agreements, agree) : agree;
            stats.min_disagreements = any ? std::min(stats.min_disagreements, differ) : differ;
            any = true;
        }
    }
    return stats;
}

// ---------------------------------------------------------------------------
// Output formats

inline void write_profile_csv(std::ostream& out, const DistributionProfile& p) {
    out << "s,N,freq\n";
    std::ostringstream line;
    line.precision(17);
    for (std::size_t k = 0; k < p.checkpoints.size(); ++k) {
        for (std::size_t j = 0; j < p.thresholds.size(); ++j) {
            line.str("");
            line << p.thresholds[j] << ',' << p.checkpoints[k] << ',' << p.freq[k][j] << '\n';
            out << line.str();
        }
    }
}

inline nlohmann::json verdict_to_json(const PairVerdict& v) {
    nlohmann::json dc3 = nullptr;
    if (v.dc3) {
        dc3 = {{"s_lo", v.dc3->s_lo}, {"s_hi", v.dc3->s_hi}, {"gap", v.dc3->gap},
               {"checkpoints", v.profile.checkpoints}};
    }
    return {{"proximal_lower_bound", v.proximal_lower_bound},
            {"bound_certified", v.bound_certified},
            {"min_observed_distance", v.min_observed_distance},
            {"li_yorke_possible", v.li_yorke_possible},
            {"checkpoints", v.profile.checkpoints},
            {"thresholds", v.profile.thresholds},
            {"lower", v.profile.min_freq},
            {"upper", v.profile.max_freq},
            {"dc3", dc3}};
}

/// Frequency against s, one polyline per checkpoint.
inline std::string render_profile_svg(const DistributionProfile& p, int width = 640, int height = 400) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    const double margin = 40.0;
    const double lo = p.thresholds.front();
    const double hi = p.thresholds.back() > lo ? p.thresholds.back() : lo + 1.0;
    auto sx = [&](double s) { return margin + (s - lo) / (hi - lo) * (width - 2 * margin); };
    auto sy = [&](double f) { return height - margin - f * (height - 2 * margin); };

    std::ostringstream svg;
    svg.precision(6);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << sy(0) << "\" x2=\"" << width - margin << "\" y2=\"" << sy(0)
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << margin << "\" y1=\"" << sy(0) << "\" x2=\"" << margin << "\" y2=\"" << sy(1)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << margin << "\" y=\"" << height - 10 << "\" font-size=\"12\">s = " << lo << "</text>\n";
    svg << "<text x=\"" << width - margin << "\" y=\"" << height - 10
        << "\" font-size=\"12\" text-anchor=\"end\">s = " << hi << "</text>\n";
    svg << "<text x=\"5\" y=\"" << sy(1) << "\" font-size=\"12\">1</text>\n";
    for (std::size_t k = 0; k < p.checkpoints.size(); ++k) {
        const char* colour = palette[k % std::size(palette)];
        svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" points=\"";
        for (std::size_t j = 0; j < p.thresholds.size(); ++j) {
            svg << (j ? " " : "") << sx(p.thresholds[j]) << ',' << sy(p.freq[k][j]);
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << width - margin << "\" y=\"" << margin + 14.0 * static_cast<double>(k)
            << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << colour << "\">N=" << p.checkpoints[k]
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace dendrix
