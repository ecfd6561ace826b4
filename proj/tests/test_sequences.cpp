#include <gtest/gtest.h>

#include "dendrix/sequences.hpp"

using namespace dendrix;

TEST(ColumnTops, ClosedForm) {
    const std::uint64_t expected[] = {10, 112, 1115, 11119, 111124, 1111130, 11111137};
    for (int n = 1; n <= 7; ++n) EXPECT_EQ(column_top(n), expected[n - 1]) << n;
    EXPECT_EQ(column_top(18), 1111111111111111280ULL);
    EXPECT_THROW(column_top(0), Error);
    EXPECT_THROW(column_top(19), Error);
}

TEST(ColumnTops, SizesAddUp) {
    for (int n = 2; n <= 18; ++n) EXPECT_EQ(column_top(n) - column_top(n - 1), column_size(n));
    EXPECT_EQ(column_size(1), 11u);
}

TEST(FiberPoint, Figure3Points) {
    const SequenceParams params;
    auto p0 = fiber_point(0, params);
    EXPECT_EQ(p0.coords, (Coords{1.0, 1.0}));
    EXPECT_EQ(p0.column, 1);
    EXPECT_FALSE(p0.is_top);

    auto p10 = fiber_point(10, params);
    EXPECT_EQ(p10.coords, (Coords{1.0, 3.0}));
    EXPECT_TRUE(p10.is_top);

    auto p112 = fiber_point(112, params);
    EXPECT_EQ(p112.coords, (Coords{0.5, 3.0}));
    EXPECT_EQ(p112.column, 2);
    EXPECT_TRUE(p112.is_top);

    // column 2 starts at (x_2, y_2), then (x_2, y_1), then z_100
    EXPECT_EQ(fiber_point(11, params).coords, (Coords{0.5, 0.5}));
    EXPECT_EQ(fiber_point(12, params).coords, (Coords{0.5, 1.0}));
    EXPECT_EQ(fiber_point(13, params).coords, (Coords{0.5, 2.0 + 1.0 / 100.0}));
}

TEST(FiberPoint, RowsClimbWithinEachColumn) {
    const SequenceParams params;
    for (int n = 1; n <= 4; ++n) {
        for (std::uint64_t t = column_start(n); t < column_top(n); ++t) {
            ASSERT_LT(fiber_point(t, params).coords.y, fiber_point(t + 1, params).coords.y) << t;
        }
    }
}

TEST(FiberPoint, LocateAndOverflow) {
    const auto loc = locate_fiber_index(column_top(18));
    EXPECT_EQ(loc.column, 18);
    EXPECT_TRUE(loc.is_top);
    EXPECT_THROW(locate_fiber_index(column_top(18) + 1), Error);
}

TEST(SequenceParams, RejectsBadRules) {
    auto one_over = [](std::uint64_t i) { return 1.0 / static_cast<double>(i); };
    auto z = [](std::uint64_t i) { return 2.0 + 1.0 / static_cast<double>(i); };
    EXPECT_NO_THROW(SequenceParams(one_over, one_over, z));
    EXPECT_THROW(SequenceParams([](std::uint64_t i) { return 2.0 / static_cast<double>(i); }, one_over, z), Error);
    EXPECT_THROW(SequenceParams(one_over, [](std::uint64_t) { return 1.0; }, z), Error);
    EXPECT_THROW(SequenceParams(one_over, one_over, [](std::uint64_t i) { return 3.0 / static_cast<double>(i); }),
                 Error);
}
