#include <gtest/gtest.h>

#include <random>

#include "evk/event.hpp"

using namespace evk;

namespace {

EventStream stream_at(std::initializer_list<double> times, Geometry g = {4, 4}) {
    EventStream s{g, {}};
    for (double t : times) s.events.push_back({t, 1, 1, Polarity::Positive});
    return s;
}

EventStream random_stream(std::mt19937_64& rng, std::size_t n, Geometry g) {
    std::uniform_real_distribution<double> t(0.0, 10.0);
    std::uniform_int_distribution<int> x(0, g.width - 1);
    std::uniform_int_distribution<int> y(0, g.height - 1);
    EventStream s{g, {}};
    for (std::size_t i = 0; i < n; ++i) {
        s.events.push_back({t(rng), x(rng), y(rng), rng() % 2 ? Polarity::Positive : Polarity::Negative});
    }
    std::sort(s.events.begin(), s.events.end(), event_order);
    return s;
}

} // namespace

TEST(Validate, EmptyStreamHasNoViolations) { EXPECT_TRUE(validate(EventStream{{8, 8}, {}}).empty()); }

TEST(Validate, ReportsUnsortedAtSecondIndex) {
    const auto v = validate(stream_at({2.0, 1.0}));
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, Violation::Kind::Unsorted);
    EXPECT_EQ(v[0].index, 1u);
    EXPECT_EQ(v[0].message(), "unsorted at index 1");
}

TEST(Validate, ReportsOutOfBounds) {
    EventStream s{{4, 3}, {{0.0, 4, 0, Polarity::Positive}}};
    const auto v = validate(s);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].message(), "out of bounds at index 0");
}

TEST(Validate, ReportsInvalidTime) {
    const auto v = validate(stream_at({-1.0}));
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].kind, Violation::Kind::InvalidTime);
}

TEST(Validate, OnlyFirstOffenderPerKind) {
    const auto v = validate(stream_at({3.0, 2.0, 1.0}));
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].index, 1u);
}

TEST(TimeWindow, RejectsEmptyOrReversed) {
    EXPECT_THROW(TimeWindow(1.0, 1.0), Error);
    EXPECT_THROW(TimeWindow(2.0, 1.0), Error);
    EXPECT_TRUE(TimeWindow(0.0, 1.0).contains(0.0));
    EXPECT_FALSE(TimeWindow(0.0, 1.0).contains(1.0));
}

TEST(ThresholdMap, RejectsNonPositive) {
    EXPECT_THROW(ThresholdMap::uniform({2, 2}, 0.0, 0.1, 0.0), Error);
    EXPECT_THROW(ThresholdMap::uniform({2, 2}, 0.1, -0.1, 0.0), Error);
    EXPECT_THROW(ThresholdMap::uniform({2, 2}, 0.1, 0.1, -1.0), Error);
    EXPECT_THROW(ThresholdMap({2, 2}, {0.1}, {0.1, 0.1, 0.1, 0.1}, 0.0), Error);
}

TEST(SliceByWindow, HalfOpenOverlap) {
    const auto s = stream_at({0.0, 2.5, 5.0, 7.5, 10.0});
    const auto part = slice_by_window(s, {5.0, 20.0});
    ASSERT_EQ(part.size(), 3u);
    EXPECT_EQ(part.events.front().t, 5.0);
    EXPECT_EQ(part.geometry, s.geometry);
}

TEST(SliceByWindow, WindowBeyondLastEventIsIdentity) {
    const auto s = stream_at({0.0, 1.0, 2.0});
    EXPECT_EQ(slice_by_window(s, {0.0, 3.0}), s);
}

TEST(SliceByWindow, MatchesBruteForceFilter) {
    const auto s = stream_at({1.0, 2.0, 3.0});
    const auto part = slice_by_window(s, {2.0, 3.0});
    ASSERT_EQ(part.size(), 1u);
    EXPECT_EQ(part.events[0].t, 2.0);

    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto big = random_stream(rng, 500, {16, 12});
        std::uniform_real_distribution<double> u(-1.0, 11.0);
        double a = u(rng), b = u(rng);
        if (a == b) continue;
        const TimeWindow w(std::min(a, b), std::max(a, b));
        std::vector<Event> expected;
        for (const auto& e : big.events) {
            if (e.t >= w.t0() && e.t < w.tN()) expected.push_back(e);
        }
        EXPECT_EQ(slice_by_window(big, w).events, expected);
    }
}

TEST(SliceByWindow, Idempotent) {
    std::mt19937_64 rng(5);
    const auto s = random_stream(rng, 1000, {10, 10});
    const TimeWindow w(2.0, 6.5);
    const auto once = slice_by_window(s, w);
    EXPECT_EQ(slice_by_window(once, w), once);
}

TEST(SliceByWindow, PartitionReconstructsRange) {
    std::mt19937_64 rng(6);
    const auto s = random_stream(rng, 2000, {10, 10});
    const std::vector<double> cuts{1.0, 1.0 + 1e-9, 2.75, 4.0, 8.125, 9.0};
    std::vector<Event> joined;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
        const auto part = slice_by_window(s, {cuts[i - 1], cuts[i]});
        joined.insert(joined.end(), part.events.begin(), part.events.end());
    }
    EXPECT_EQ(joined, slice_by_window(s, {cuts.front(), cuts.back()}).events);
}

TEST(EventOrder, TieBreakByRowColumnPolarity) {
    const Event a{1.0, 5, 0, Polarity::Negative};
    const Event b{1.0, 0, 1, Polarity::Positive};
    const Event c{1.0, 5, 0, Polarity::Positive};
    EXPECT_TRUE(event_order(a, b));
    EXPECT_TRUE(event_order(c, a));
    EXPECT_FALSE(event_order(a, c));
}
