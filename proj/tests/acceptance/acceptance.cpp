// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "dendrix/dendrix.hpp"
#include "support/oracles.hpp"

using namespace dendrix;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed = seconds_since(start);
    if (elapsed > limit_s) {
        out.ok = false;
        out.detail += fmt("; over time limit %.0f s", limit_s);
    }
    if (!out.ok) ++failures;
    std::printf("%s [%d] %s (%.2f s): %s\n", out.ok ? "PASS" : "FAIL", id, title, elapsed, out.detail.c_str());
    std::fflush(stdout);
}

OmegaWord random_word(std::mt19937_64& rng, std::size_t bits) {
    std::vector<std::uint8_t> w(bits);
    for (auto& b : w) b = rng() & 1U;
    return OmegaWord(w);
}

bool on_inner_tree(const Dendrite& d, const DPoint& x) {
    if (x.is_vertex()) return !d.is_leaf(x.vertex_id());
    const auto& e = d.edge(x.edge_id());
    return !d.is_leaf(e.parent) && !d.is_leaf(e.child);
}

// Max |rho(i(x), i(y)) - d(x, y)| over all point pairs.
double isometry_error(const Dendrite& d, const MetricSpace& s, const std::vector<VertexId>& leaf) {
    double worst = 0.0;
    for (std::size_t x = 0; x < s.size(); ++x)
        for (std::size_t y = 0; y < s.size(); ++y)
            worst = std::max(worst, std::abs(rho(d, DPoint::vertex(leaf[x]), DPoint::vertex(leaf[y])) - s.distance(x, y)));
    return worst;
}

std::vector<VertexId> leaves_of(const Dendrite& d) {
    std::vector<VertexId> out;
    for (std::size_t x = 0; x < d.space().size(); ++x) out.push_back(*d.leaf_of_point(x));
    return out;
}

// Criterion 4 on one endpoint map.
Outcome check_extension(const MetricSpace& s, const std::vector<std::size_t>& f, std::mt19937_64& rng,
                        const char* name) {
    const auto emb = embed_system(s, f);
    const auto& d = *emb.dendrite;
    const auto& m = emb.map;
    const std::size_t p_count = m.filtration().order().size();
    const auto p0 = DPoint::vertex(m.filtration().base());

    std::size_t conj_bad = 0;
    for (std::size_t x = 0; x < s.size(); ++x)
        if (!(m(DPoint::vertex(emb.endpoint[x])) == DPoint::vertex(emb.endpoint[f[x]]))) ++conj_bad;

    std::size_t ends_bad = 0;
    for (EdgeId e = 0; e < d.edge_count(); ++e) {
        if (!(m.evaluate_edge(e, 0.0) == m(DPoint::vertex(d.edge(e).parent)))) ++ends_bad;
        if (!(m.evaluate_edge(e, 1.0) == m(DPoint::vertex(d.edge(e).child)))) ++ends_bad;
    }

    // Interior points of the tree spanned by P = all non-leaf vertices.
    std::size_t sampled = 0, late = 0, worst = 0;
    while (sampled < 1000) {
        const auto x = random_point(d, rng);
        if (!on_inner_tree(d, x)) continue;
        ++sampled;
        const auto steps = steps_to_fixed_point(m, x, p_count);
        if (!steps) {
            ++late;
            continue;
        }
        worst = std::max(worst, *steps);
        // it stops at p_0, not at some other fixed point
        DPoint y = x;
        for (std::size_t k = 0; k < *steps; ++k) y = m(y);
        if (!(y == p0)) ++late;
    }

    // Leaf-edge points: at fraction s from the inner end the budget grows by log2(1/(1-s)).
    std::size_t leaf_sampled = 0, leaf_late = 0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t x = 0; x < s.size(); ++x) {
        const VertexId leaf = emb.endpoint[x];
        const EdgeId e = d.incident(leaf).front();
        for (int k = 0; k < 20; ++k) {
            double frac = unit(rng);
            if (frac == 0.0) continue;
            const double t = d.edge(e).child == leaf ? frac : 1.0 - frac;
            const auto extra = static_cast<std::size_t>(std::ceil(std::log2(1.0 / (1.0 - frac))));
            ++leaf_sampled;
            if (!steps_to_fixed_point(m, d.edge_point(e, t), p_count + extra + 1)) ++leaf_late;
        }
    }

    Outcome out;
    out.ok = conj_bad == 0 && ends_bad == 0 && late == 0 && leaf_late == 0;
    out.detail = fmt("%s: conjugacy mismatches %zu/%zu, edge-end mismatches %zu, inner points past |P|=%zu: %zu/%zu "
                     "(max steps %zu), leaf-edge points past |P|+log2 budget: %zu/%zu",
                     name, conj_bad, s.size(), ends_bad, p_count, late, sampled, worst, leaf_late, leaf_sampled);
    return out;
}

}  // namespace

int main() {
    criterion(1, "endpoint isometry on harmonic(50), cantor(5), fiber_c(2)", 6.0, [] {
        Outcome out;
        const std::vector<std::pair<const char*, std::function<MetricSpace()>>> cases{
            {"harmonic(50)", [] { return harmonic_space(50); }},
            {"cantor(5)", [] { return cantor_space(5); }},
            {"fiber_c(2)", [] { return fiber_space(2); }}};
        for (const auto& [name, make] : cases) {
            const auto start = Clock::now();
            const auto s = make();
            const auto d = build_dendrite(s);
            const double err = isometry_error(d, s, leaves_of(d));
            const double t = seconds_since(start);
            const bool ok = err <= 1e-12 && t < 2.0;
            out.ok &= ok;
            out.detail += fmt("%s%s n=%zu err=%.3g %.2fs", out.detail.empty() ? "" : "; ", name, s.size(), err, t);
        }
        return out;
    });

    criterion(2, "cell hierarchy equals brute-force threshold cells on 100 random spaces", 5.0, [] {
        std::mt19937_64 rng(2024);
        std::size_t mismatches = 0, cells = 0;
        for (int k = 0; k < 100; ++k) {
            const std::size_t n = 1 + rng() % 40;
            const auto s = oracle::random_euclidean(rng, n, 1 + rng() % 3);
            const auto h = build_cell_hierarchy(s);
            std::set<Subset> got;
            for (const auto& c : h.cells()) got.insert(c.members);
            cells += got.size();
            if (got != oracle::all_cells(s) || got.size() != h.size()) ++mismatches;
        }
        return Outcome{mismatches == 0, fmt("mismatching spaces %zu/100, %zu cells compared", mismatches, cells)};
    });

    criterion(3, "rho metric axioms on the cantor(4) dendrite, 10^4 triples", 5.0, [] {
        std::mt19937_64 rng(33);
        const auto d = build_dendrite(cantor_space(4));
        std::size_t violations = 0, asymmetric = 0;
        double worst = 0.0;
        for (int k = 0; k < 10000; ++k) {
            const auto a = random_point(d, rng), b = random_point(d, rng), c = random_point(d, rng);
            const double ab = rho(d, a, b), bc = rho(d, b, c), ac = rho(d, a, c);
            worst = std::max(worst, ac - (ab + bc));
            if (ac > ab + bc + 1e-12) ++violations;
            if (ab != rho(d, b, a)) ++asymmetric;
        }
        return Outcome{violations == 0 && asymmetric == 0,
                       fmt("triangle violations %zu, asymmetric pairs %zu, worst excess %.3g", violations, asymmetric,
                           worst)};
    });

    criterion(4, "extension contract on harmonic(20): permutation and constant maps", 2.0, [] {
        std::mt19937_64 rng(44);
        const auto s = harmonic_space(20);
        std::vector<std::size_t> perm(s.size());
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        const std::vector<std::size_t> constant(s.size(), s.index_of("0"));
        auto a = check_extension(s, perm, rng, "permutation");
        auto b = check_extension(s, constant, rng, "constant");
        return Outcome{a.ok && b.ok, a.detail + "; " + b.detail};
    });

    criterion(5, "DC3 frequencies at s = 2 for columns 5, 6, 7", 30.0, [] {
        std::vector<std::uint8_t> even(OmegaWord::kPeriodicDepth, 0);
        for (std::size_t i = 0; i < even.size(); i += 2) even[i] = 1;
        const SkewState x{OmegaWord(), OmegaWord(), FiberPoint::p(0)};
        const SkewState y{OmegaWord(), OmegaWord(even), FiberPoint::p(0)};
        const std::vector<int> columns{5, 6, 7};
        const auto v = classify_pair(x, y, {2.0}, column_checkpoints(columns));
        Outcome out;
        for (std::size_t k = 0; k < columns.size(); ++k) {
            const int n = columns[k];
            const bool shared = (n - 1) % 2 == 1;
            const double freq = v.profile.freq[k][0];
            const bool ok = shared ? freq >= 0.88 : freq <= 0.12;
            out.ok &= ok;
            const double top = static_cast<double>(column_top(n));
            const double envelope = shared ? std::pow(10.0, n) / top : (top - std::pow(10.0, n)) / top;
            out.detail += fmt("%sn=%d N=%llu freq=%.6f (%s %.6f)", k ? "; " : "", n,
                              static_cast<unsigned long long>(v.profile.checkpoints[k]), freq, shared ? ">=" : "<=",
                              envelope);
        }
        return out;
    });

    criterion(6, "no Li-Yorke pairs: 100 random pairs with distinct control words, 10^5 steps", 30.0, [] {
        std::mt19937_64 rng(66);
        std::size_t below = 0, flagged = 0;
        for (int k = 0; k < 100; ++k) {
            SkewState a{random_word(rng, 24), random_word(rng, 24), FiberPoint::p(rng() % 200000)};
            SkewState b{random_word(rng, 24), random_word(rng, 24), FiberPoint::q(rng() % 200000)};
            if (k % 4 == 0) b.omega = a.omega;
            if (k % 5 == 0) b.c = FiberPoint::axis_z(1, 1 + rng() % 50);
            while (a.eta == b.eta) b.eta = random_word(rng, 24);
            const double floor = d_omega(a.eta, b.eta);
            const auto v = classify_pair(a, b, {floor}, {100000});
            if (v.min_observed_distance < floor) ++below;
            if (v.li_yorke_possible) ++flagged;
        }
        return Outcome{below == 0 && flagged == 0,
                       fmt("pairs dipping below d(eta, eta') %zu/100, reported Li-Yorke possible %zu/100", below, flagged)};
    });

    criterion(7, "fibers with a wrong timer settle at the origin by the next top", 10.0, [] {
        std::mt19937_64 rng(77);
        std::size_t late = 0, moved = 0;
        for (int k = 0; k < 100; ++k) {
            const std::uint64_t t0 = rng() % column_top(5);
            const int n = locate_fiber_index(t0).column;
            SkewState s{OmegaWord::from_integer(t0), random_word(rng, 16), FiberPoint::p(t0)};
            const std::size_t flip = rng() % static_cast<std::size_t>(n + 1);
            s.omega.set_bit(flip, !s.omega.bit(flip));
            for (std::uint64_t t = t0; t <= column_top(n); ++t) advance(s);
            if (!(s.c == FiberPoint::origin())) ++late;
            for (int step = 0; step < 10000; ++step) {
                advance(s);
                if (!(s.c == FiberPoint::origin())) {
                    ++moved;
                    break;
                }
            }
        }
        return Outcome{late == 0 && moved == 0,
                       fmt("not at origin after the top %zu/100, left the origin later %zu/100", late, moved)};
    });

    criterion(8, "embedding a 432-state truncation of the skew product", 60.0, [] {
        const auto sys = truncated_skew_system(2, 2, 12);
        const auto emb = embed_system(sys.space, sys.map);
        const auto& d = *emb.dendrite;
        const double err = isometry_error(d, sys.space, emb.endpoint);
        std::size_t conj_bad = 0;
        for (std::size_t x = 0; x < sys.space.size(); ++x)
            if (!(emb.map(DPoint::vertex(emb.endpoint[x])) == DPoint::vertex(emb.endpoint[sys.map[x]]))) ++conj_bad;
        const auto report = verify_dendrite(d, sys.space, 2000);
        return Outcome{err <= 1e-12 && conj_bad == 0 && report.ok(),
                       fmt("states %zu, vertices %zu, isometry error %.3g, conjugacy mismatches %zu, verify %s",
                           sys.space.size(), d.vertex_count(), err, conj_bad, report.ok() ? "ok" : "failed")};
    });

    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
