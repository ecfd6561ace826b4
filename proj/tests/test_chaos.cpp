#include <gtest/gtest.h>

#include <random>
#include <regex>
#include <sstream>

#include "dendrix/chaos.hpp"

using namespace dendrix;

namespace {

OmegaWord even_positions() {
    std::vector<std::uint8_t> bits(OmegaWord::kPeriodicDepth, 0);
    for (std::size_t i = 0; i < bits.size(); i += 2) bits[i] = 1;
    return OmegaWord(bits);
}

}  // namespace

TEST(DistributionProfile, ConstantStreamStrictBoundary) {
    const std::vector<double> d(10, 0.5);
    const auto p = distribution_profile(d, {0.25, 0.5, 0.75}, {1, 5, 10});
    for (const auto& row : p.freq) EXPECT_EQ(row, (std::vector<double>{0.0, 0.0, 1.0}));
    EXPECT_EQ(p.min_freq, p.max_freq);
}

TEST(DistributionProfile, OscillatingBlocks) {
    std::vector<double> d(1, 0.0);
    d.resize(100, 1.0);
    d.resize(10000, 0.0);
    const auto p = distribution_profile(d, {0.5}, {1, 100, 10000});
    EXPECT_EQ(p.freq[0][0], 1.0);
    EXPECT_EQ(p.freq[1][0], 0.01);
    EXPECT_EQ(p.freq[2][0], 0.9901);
    EXPECT_EQ(p.min_freq[0], 0.01);
    EXPECT_EQ(p.max_freq[0], 1.0);
    EXPECT_GT(p.spread(0), 0.9);
}

TEST(DistributionProfile, ShortStreamAndBadGrids) {
    const std::vector<double> d(5, 0.1);
    try {
        distribution_profile(d, {1.0}, {3, 6});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ShortStream);
    }
    EXPECT_THROW(distribution_profile(d, {1.0, 0.5}, {3}), Error);
    EXPECT_THROW(distribution_profile(d, {1.0}, {3, 3}), Error);
    EXPECT_THROW(distribution_profile(d, {}, {3}), Error);
    EXPECT_THROW(distribution_profile(d, {1.0}, {0}), Error);
}

TEST(DistributionProfile, MonotoneInThreshold) {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::vector<double> d(5000);
    for (auto& x : d) x = u(rng);
    const auto grid = threshold_grid(0.0, 3.0, 31);
    const auto p = distribution_profile(d, grid, {10, 100, 1000, 5000});
    for (const auto& row : p.freq) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            EXPECT_GE(row[j], 0.0);
            EXPECT_LE(row[j], 1.0);
            if (j) { EXPECT_LE(row[j - 1], row[j]); }
        }
    }
    for (std::size_t j = 0; j < grid.size(); ++j) EXPECT_LE(p.min_freq[j], p.max_freq[j]);
    // brute-force count at one cell
    std::size_t below = 0;
    for (std::size_t i = 0; i < 1000; ++i) below += d[i] < grid[13];
    EXPECT_EQ(p.freq[2][13], below / 1000.0);
}

TEST(ThresholdGrid, Endpoints) {
    const auto g = threshold_grid(2.0, 4.0, 5);
    EXPECT_EQ(g, (std::vector<double>{2.0, 2.5, 3.0, 3.5, 4.0}));
    EXPECT_EQ(threshold_grid(2.0, 2.0, 1), std::vector<double>{2.0});
    EXPECT_THROW(threshold_grid(3.0, 2.0, 4), Error);
}

TEST(Dc3Interval, FromParams) {
    const auto safe = safe_dc3_interval();
    EXPECT_EQ(safe.lo, 2.0);
    EXPECT_EQ(safe.hi, 4.0);
    EXPECT_EQ(kNominalDc3Interval.lo, 1.0);
}

TEST(ClassifyPair, EqualStates) {
    const SkewState a{OmegaWord(), OmegaWord::parse("01"), FiberPoint::p(0)};
    const auto v = classify_pair(a, a, {0.5, 1.0, 2.0}, {10, 100});
    EXPECT_EQ(v.proximal_lower_bound, 0.0);
    EXPECT_FALSE(v.li_yorke_possible);
    EXPECT_FALSE(v.dc3);
}

TEST(ClassifyPair, DistinctTimersForbidLiYorke) {
    const SkewState a{OmegaWord::parse("0001"), OmegaWord(), FiberPoint::p(0)};
    const SkewState b{OmegaWord(), OmegaWord(), FiberPoint::p(0)};
    const auto v = classify_pair(a, b, {1.0}, {50});
    EXPECT_EQ(v.proximal_lower_bound, 0.125);
    EXPECT_TRUE(v.bound_certified);
    EXPECT_FALSE(v.li_yorke_possible);
    EXPECT_GE(v.min_observed_distance, v.proximal_lower_bound);
}

// The checkpoint window [0, T_n] contains the 10^n z-rows of
// column n, which sit in the same half iff position n-1 is shared.
TEST(ClassifyPair, Dc3EnvelopesAtFiniteColumns) {
    const SkewState a{OmegaWord(), OmegaWord(), FiberPoint::p(0)};
    const SkewState b{OmegaWord(), even_positions(), FiberPoint::p(0)};
    const std::vector<int> columns{2, 3, 4, 5};
    const auto grid = threshold_grid(2.0, 4.0, 9);
    const auto v = classify_pair(a, b, grid, column_checkpoints(columns));
    EXPECT_EQ(v.proximal_lower_bound, 1.0);
    EXPECT_FALSE(v.li_yorke_possible);
    for (std::size_t k = 0; k < columns.size(); ++k) {
        const int n = columns[k];
        const double top = static_cast<double>(column_top(n)) + 1.0;  // samples up to the checkpoint
        const double tens = std::pow(10.0, n);
        const bool shared = (n - 1) % 2 == 1;
        for (std::size_t j = 0; j < grid.size(); ++j) {
            if (shared) EXPECT_GE(v.profile.freq[k][j], tens / top) << n << " s=" << grid[j];
            else EXPECT_LE(v.profile.freq[k][j], (top - tens) / top) << n << " s=" << grid[j];
        }
    }
    ASSERT_TRUE(v.dc3);
    EXPECT_EQ(v.dc3->s_lo, 2.0);
    EXPECT_EQ(v.dc3->s_hi, 4.0);
    EXPECT_GE(v.dc3->gap, 0.7);
}

TEST(ClassifyDistances, BoundIsNotCertified) {
    const std::vector<double> d{0.5, 0.7, 0.6, 3.0};
    const auto v = classify_distances(d, {1.0}, {2, 4});
    EXPECT_FALSE(v.bound_certified);
    EXPECT_EQ(v.proximal_lower_bound, 0.0);
    EXPECT_EQ(v.min_observed_distance, 0.5);
    EXPECT_TRUE(v.li_yorke_possible);
}

TEST(FindDc3Evidence, WidestRun) {
    DistributionProfile p;
    p.thresholds = {1, 2, 3, 4, 5, 6};
    p.min_freq = {0.0, 0.1, 0.0, 0.0, 0.0, 0.1};
    p.max_freq = {0.9, 0.2, 0.9, 0.8, 0.7, 0.9};
    const auto e = find_dc3_evidence(p, 0.5);
    ASSERT_TRUE(e);
    EXPECT_EQ(e->s_lo, 3.0);
    EXPECT_EQ(e->s_hi, 6.0);
    EXPECT_NEAR(e->gap, 0.7, 1e-15);
    EXPECT_FALSE(find_dc3_evidence(p, 0.95));
}

TEST(ScrambledFamily, SingleMember) {
    const auto f = scrambled_family([](std::size_t i) { return i % 2 == 0; }, 1, 8);
    EXPECT_EQ(f.size(), 1u);
}

TEST(ScrambledFamily, EvenCodingFourMembers) {
    const auto f = scrambled_family([](std::size_t i) { return i % 2 == 0; }, 4, 16);
    ASSERT_EQ(f.size(), 4u);
    const auto stats = family_stats(f, 1, 8);
    EXPECT_TRUE(stats.pairwise_distinct);
    EXPECT_GE(stats.min_agreements, 4u);
    EXPECT_GE(stats.min_disagreements, 2u);
    for (const auto& w : f)
        for (std::size_t i = 1; i < 16; i += 2) EXPECT_FALSE(w.bit(i));
}

TEST(ScrambledFamily, EveryWindowSeesBoth) {
    const auto f = scrambled_family([](std::size_t i) { return i % 3 == 0; }, 2, 30);
    ASSERT_EQ(f.size(), 2u);
    for (std::size_t start = 0; start + 3 <= 30; ++start) {
        const auto stats = family_stats(f, start, start + 2);
        EXPECT_GE(stats.min_agreements, 1u) << start;
        EXPECT_GE(stats.min_disagreements, 1u) << start;
    }
}

TEST(ScrambledFamily, CapacityLimit) {
    try {
        scrambled_family([](std::size_t i) { return i % 8 == 0; }, 4, 8);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CountTooLarge);
    }
    EXPECT_NO_THROW(scrambled_family([](std::size_t i) { return i % 8 == 0; }, 4, 9));
}

TEST(Output, ProfileCsvVerdictJsonSvg) {
    const std::vector<double> d{0.5, 1.5, 2.5, 3.5};
    const auto v = classify_distances(d, {1.0, 2.0}, {2, 4});
    std::ostringstream csv;
    write_profile_csv(csv, v.profile);
    EXPECT_EQ(csv.str(), "s,N,freq\n1,2,0.5\n2,2,1\n1,4,0.25\n2,4,0.5\n");

    const auto doc = verdict_to_json(v);
    for (const char* key : {"proximal_lower_bound", "li_yorke_possible", "dc3", "checkpoints"})
        EXPECT_TRUE(doc.contains(key)) << key;
    EXPECT_TRUE(doc["dc3"].is_null());

    const auto svg = render_profile_svg(v.profile);
    const std::regex polyline("<polyline");
    EXPECT_EQ(std::distance(std::sregex_iterator(svg.begin(), svg.end(), polyline), std::sregex_iterator()), 2);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
}
