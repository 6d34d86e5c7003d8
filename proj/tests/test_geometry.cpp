#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mfk/geometry.hpp"

using namespace mfk;

namespace {

std::vector<SpectrumPoint> parabola() {
    std::vector<SpectrumPoint> pts;
    for (int k = 0; k <= 8; ++k) {
        const double a = 0.8 + 0.05 * k;
        pts.push_back({a, 1.0 - 4.0 * (a - 1.0) * (a - 1.0)});
    }
    return pts;
}

// Cap whose middle five points sit exactly on f = 0.5 alpha + 0.2.
std::vector<SpectrumPoint> crisis_fixture() {
    return {{0.60, 0.30}, {0.70, 0.50}, {0.80, 0.60}, {0.90, 0.65}, {1.00, 0.70},
            {1.10, 0.75}, {1.20, 0.80}, {1.30, 0.55}, {1.40, 0.20}};
}

// Independent least-squares max residual, normal equations in long double.
long double ls_max_residual(const std::vector<SpectrumPoint>& pts, std::size_t start, std::size_t len) {
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = start; i < start + len; ++i) {
        const long double x = pts[i].alpha, y = pts[i].f;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const long double n = static_cast<long double>(len);
    const long double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const long double icpt = (sy - slope * sx) / n;
    long double worst = 0;
    for (std::size_t i = start; i < start + len; ++i)
        worst = std::max(worst, std::fabs(pts[i].f - (slope * pts[i].alpha + icpt)));
    return worst;
}

} // namespace

TEST(Features, ThreePointCap) {
    std::vector<SpectrumPoint> pts{{0.9091, 0.30}, {0.9694, 0.7235}, {1.120, 0.25}};
    auto f = features(pts);
    EXPECT_EQ(f.alpha_min, 0.9091);
    EXPECT_EQ(f.alpha_peak, 0.9694);
    EXPECT_EQ(f.f_max, 0.7235);
    EXPECT_EQ(f.alpha_max, 1.120);
    EXPECT_NEAR(f.bisectrix_gap, 0.2459, 1e-12);
}

TEST(Features, DeltaAlpha) {
    std::vector<SpectrumPoint> pts{{0.943, 0.4}, {1.133, 0.3}};
    EXPECT_NEAR(features(pts).delta_alpha, 0.19, 1e-12);
}

TEST(Features, SinglePoint) {
    std::vector<SpectrumPoint> pts{{0.6309, 0.6309}};
    auto f = features(pts);
    EXPECT_EQ(f.alpha_min, 0.6309);
    EXPECT_EQ(f.alpha_max, 0.6309);
    EXPECT_EQ(f.alpha_peak, 0.6309);
    EXPECT_EQ(f.f_max, 0.6309);
    EXPECT_EQ(f.delta_alpha, 0.0);
    EXPECT_LE(f.bisectrix_gap, 1e-12);
}

TEST(Features, TieGoesToSmallerAlpha) {
    std::vector<SpectrumPoint> pts{{1.2, 0.8}, {0.9, 0.8}, {1.0, 0.5}};
    EXPECT_EQ(features(pts).alpha_peak, 0.9);
}

TEST(Features, EmptyThrows) {
    EXPECT_THROW(features(std::span<const SpectrumPoint>{}), Error);
}

TEST(Features, OrderInvariantAndOrdered) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<SpectrumPoint> pts(1 + trial % 12);
        for (auto& p : pts)
            p = {u(rng), u(rng) / 2};
        auto a = features(pts);
        std::shuffle(pts.begin(), pts.end(), rng);
        auto b = features(pts);
        EXPECT_EQ(a.alpha_peak, b.alpha_peak);
        EXPECT_EQ(a.f_max, b.f_max);
        EXPECT_EQ(a.bisectrix_gap, b.bisectrix_gap);
        EXPECT_LE(a.alpha_min, a.alpha_peak);
        EXPECT_LE(a.alpha_peak, a.alpha_max);
        EXPECT_GE(a.delta_alpha, 0.0);
    }
}

TEST(CompareSweep, LeftAndUpShiftApproachesBisectrix) {
    SpectrumFeatures b100{0.9091, 1.120, 0.9694, 0.7235, 1.120 - 0.9091, 0.20};
    SpectrumFeatures b200{0.8768, 1.100, 0.9500, 0.7457, 1.100 - 0.8768, 0.15};
    std::vector<SpectrumFeatures> sets{b100, b200};
    auto t = compare_sweep(sets);
    EXPECT_NEAR(t.total.alpha_min, 0.8768 - 0.9091, 1e-12);
    EXPECT_NEAR(t.total.f_max, 0.7457 - 0.7235, 1e-12);
    EXPECT_TRUE(t.left_shift);
    EXPECT_TRUE(t.up_shift);
    EXPECT_TRUE(t.approaching_bisectrix);
}

TEST(CompareSweep, CuspMovesUpAndLeft) {
    SpectrumFeatures a{0.9, 1.1, 0.9788, 0.7235, 0.2, 0.2};
    SpectrumFeatures b{0.9, 1.1, 0.9762, 0.7923, 0.2, 0.18};
    std::vector<SpectrumFeatures> sets{a, b};
    auto t = compare_sweep(sets);
    EXPECT_TRUE(t.left_shift);
    EXPECT_TRUE(t.up_shift);
}

TEST(CompareSweep, IdenticalSetsNoFlags) {
    SpectrumFeatures a{0.9, 1.1, 1.0, 0.8, 0.2, 0.1};
    std::vector<SpectrumFeatures> sets{a, a, a};
    auto t = compare_sweep(sets);
    EXPECT_EQ(t.total.alpha_min, 0.0);
    EXPECT_EQ(t.total.f_max, 0.0);
    EXPECT_FALSE(t.left_shift);
    EXPECT_FALSE(t.up_shift);
    EXPECT_FALSE(t.approaching_bisectrix);
    EXPECT_EQ(t.steps.size(), 2u);
}

TEST(CompareSweep, GapMustShrinkMonotonically) {
    SpectrumFeatures a{}, b{}, c{};
    a.bisectrix_gap = 0.3;
    b.bisectrix_gap = 0.35;
    c.bisectrix_gap = 0.1;
    std::vector<SpectrumFeatures> sets{a, b, c};
    EXPECT_FALSE(compare_sweep(sets).approaching_bisectrix);
}

TEST(CompareSweep, NeedsTwo) {
    std::vector<SpectrumFeatures> one(1);
    try {
        compare_sweep(one);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NeedsSweep);
    }
}

TEST(CapShape, ParabolaIsCap) {
    auto c = cap_shape_check(parabola(), 0.0);
    EXPECT_TRUE(c.cap_shaped);
    EXPECT_FALSE(c.degenerate);
}

TEST(CapShape, WShapeFailsAtDip) {
    std::vector<SpectrumPoint> w{{0.9, 0.5}, {1.0, 0.2}, {1.1, 0.5}};
    auto c = cap_shape_check(w, 0.05);
    EXPECT_FALSE(c.cap_shaped);
    EXPECT_EQ(c.violations, (std::vector<std::size_t>{1}));
}

TEST(CapShape, MonotoneIsDegenerateCap) {
    std::vector<SpectrumPoint> up{{0.9, 0.1}, {1.0, 0.2}, {1.1, 0.5}};
    auto c = cap_shape_check(up, 0.0);
    EXPECT_TRUE(c.cap_shaped);
    EXPECT_TRUE(c.degenerate);
}

TEST(CapShape, ToleranceAbsorbsSmallWiggle) {
    std::vector<SpectrumPoint> pts{{0.8, 0.3}, {0.9, 0.28}, {1.0, 0.9}, {1.1, 0.5}};
    EXPECT_TRUE(cap_shape_check(pts, 0.05).cap_shaped);
    EXPECT_FALSE(cap_shape_check(pts, 0.01).cap_shaped);
}

TEST(CapShape, TooFewPoints) {
    std::vector<SpectrumPoint> two{{0.9, 0.1}, {1.0, 0.2}};
    EXPECT_THROW(cap_shape_check(two, 0.05), Error);
}

TEST(Segment, FindsEmbeddedRun) {
    auto r = detect_segment(crisis_fixture(), 1e-9, 5);
    ASSERT_TRUE(r.found);
    EXPECT_EQ(r.run_start, 2u);
    EXPECT_EQ(r.run_end, 6u);
    EXPECT_NEAR(r.slope, 0.5, 1e-9);
    EXPECT_LE(r.residual, 1e-12);
}

TEST(Segment, ParabolaResidualsMatchBruteForce) {
    // best max residual over all windows of each length, frozen from an exact fit
    const auto pts = parabola();
    const double frozen[] = {0.01, 0.02, 0.1 / 3.0, 0.05, 0.07, 0.28 / 3.0};
    for (std::size_t len = 4; len <= 9; ++len) {
        long double best = std::numeric_limits<long double>::infinity();
        for (std::size_t s = 0; s + len <= pts.size(); ++s)
            best = std::min(best, ls_max_residual(pts, s, len));
        EXPECT_NEAR(static_cast<double>(best), frozen[len - 4], 1e-12) << "len " << len;
    }
}

TEST(Segment, ParabolaRejectedAtTightTolerance) {
    const auto pts = parabola();
    EXPECT_FALSE(detect_segment(pts, 1e-6, 4).found);
    EXPECT_FALSE(detect_segment(pts, 1e-6, default_min_run(pts.size())).found);
}

TEST(Segment, ParabolaFourRunAcceptedJustAboveItsResidual) {
    auto r = detect_segment(parabola(), 0.0101, 4);
    ASSERT_TRUE(r.found);
    EXPECT_EQ(r.run_end - r.run_start + 1, 4u);
}

TEST(Segment, NoisyRunFound) {
    auto pts = crisis_fixture();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e-4, 1e-4);
    for (std::size_t i = 2; i <= 6; ++i)
        pts[i].f += u(rng);
    auto r = detect_segment(pts, 1e-3, 5);
    ASSERT_TRUE(r.found);
    EXPECT_NEAR(r.slope, 0.5, 1e-2);
}

TEST(Segment, Preconditions) {
    EXPECT_THROW(detect_segment(parabola(), 0.02, 3), Error);
    std::vector<SpectrumPoint> few{{0.1, 0.1}, {0.2, 0.2}, {0.3, 0.3}};
    EXPECT_FALSE(detect_segment(few, 0.02, 4).found);
    EXPECT_EQ(default_min_run(9), 5u);
    EXPECT_EQ(default_min_run(3), 4u);
    EXPECT_EQ(default_min_run(12), 6u);
}

TEST(Segment, FoundImpliesRunAndResidualBounds) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<SpectrumPoint> pts;
        const int n = 4 + trial % 9;
        for (int i = 0; i < n; ++i)
            pts.push_back({0.5 + 0.1 * i, u(rng)});
        const double tol = 0.05 * u(rng);
        const auto mr = default_min_run(pts.size());
        auto r = detect_segment(pts, tol, mr);
        if (r.found) {
            EXPECT_GE(r.run_end - r.run_start + 1, mr);
            EXPECT_LE(r.residual, tol);
        }
    }
}

TEST(Fragments, SingleGap) {
    std::vector<SpectrumPoint> pts{{0.90, 0.5}, {0.95, 0.6}, {1.00, 0.5}, {1.40, 0.2}};
    auto r = detect_fragments(pts, 0.2);
    ASSERT_EQ(r.fragments.size(), 2u);
    EXPECT_EQ(r.fragments[0].first, 0u);
    EXPECT_EQ(r.fragments[0].last, 2u);
    ASSERT_EQ(r.isolated_points.size(), 1u);
    EXPECT_EQ(r.isolated_points[0].alpha, 1.40);
    EXPECT_FALSE(r.isolated_points[0].on_axis);
    EXPECT_TRUE(r.has_embryonic_spectrum());
    ASSERT_EQ(r.gaps.size(), 1u);
    EXPECT_NEAR(r.gaps[0], 0.40, 1e-12);
}

TEST(Fragments, OnAxisIsolatedPointIsNotEmbryonic) {
    std::vector<SpectrumPoint> pts{{0.90, 0.5}, {0.95, 0.6}, {1.00, 0.5}, {1.40, 0.0}};
    auto r = detect_fragments(pts, 0.2);
    ASSERT_EQ(r.isolated_points.size(), 1u);
    EXPECT_TRUE(r.isolated_points[0].on_axis);
    EXPECT_FALSE(r.has_embryonic_spectrum());
}

TEST(Fragments, EvenSpacingOneFragment) {
    auto r = detect_fragments(parabola(), 0.1);
    EXPECT_EQ(r.fragments.size(), 1u);
    EXPECT_TRUE(r.gaps.empty());
}

TEST(Fragments, Preconditions) {
    EXPECT_THROW(detect_fragments(parabola(), 0.0), Error);
    EXPECT_THROW(detect_fragments(std::span<const SpectrumPoint>{}, 0.1), Error);
}

TEST(Fragments, DefaultThreshold) {
    std::vector<SpectrumPoint> pts{{0.1, 0.1}, {0.2, 0.1}, {0.3, 0.1}, {0.9, 0.1}};
    EXPECT_NEAR(default_gap_threshold(pts), 0.25, 1e-12);
    std::vector<SpectrumPoint> one{{0.1, 0.1}};
    EXPECT_TRUE(std::isinf(default_gap_threshold(one)));
}

TEST(Fragments, PartitionProperties) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<SpectrumPoint> pts(1 + trial % 15);
        for (auto& p : pts)
            p = {u(rng), u(rng) / 3};
        std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.alpha < b.alpha; });
        pts.erase(std::unique(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.alpha == b.alpha; }), pts.end());

        EXPECT_EQ(detect_fragments(pts, std::numeric_limits<double>::infinity()).fragments.size(), 1u);
        EXPECT_EQ(detect_fragments(pts, std::numeric_limits<double>::denorm_min()).fragments.size(), pts.size());

        const double thr = 0.5 * u(rng) + 1e-3;
        auto r = detect_fragments(pts, thr);
        std::size_t covered = 0, expect_first = 0;
        for (const auto& fr : r.fragments) {
            EXPECT_EQ(fr.first, expect_first);
            for (std::size_t i = fr.first + 1; i <= fr.last; ++i)
                EXPECT_LE(pts[i].alpha - pts[i - 1].alpha, thr);
            covered += fr.size();
            expect_first = fr.last + 1;
        }
        EXPECT_EQ(covered, pts.size());
        for (double g : r.gaps)
            EXPECT_GT(g, thr);
    }
}

TEST(Classify, Fixtures) {
    EXPECT_EQ(classify(crisis_fixture()).regime, Regime::Crisis);
    // the best 5-point fit of the parabola leaves exactly 0.02, the default tolerance;
    // pin both sides of that edge instead of relying on rounding at it
    ClassifyConfig tight, loose;
    tight.residual_tol = 0.019;
    loose.residual_tol = 0.021;
    EXPECT_EQ(classify(parabola(), tight).regime, Regime::PreCrisis);
    EXPECT_EQ(classify(parabola(), loose).regime, Regime::Crisis);

    std::vector<SpectrumPoint> two{{0.5, 0.4}, {0.55, 0.5}, {0.6, 0.4}, {1.5, 0.3}, {1.55, 0.4}, {1.6, 0.3}};
    auto r = classify(two);
    EXPECT_EQ(r.regime, Regime::PostCrisisBiMultifractal);
    EXPECT_EQ(r.fragmentation.fragments.size(), 2u);

    std::vector<SpectrumPoint> one{{0.7, 0.7}};
    auto s = classify(one);
    EXPECT_EQ(s.regime, Regime::Indeterminate);
    EXPECT_FALSE(s.cap.has_value());

    std::vector<SpectrumPoint> w{{0.9, 0.5}, {1.0, 0.2}, {1.1, 0.5}};
    EXPECT_EQ(classify(w).regime, Regime::Indeterminate);
}

TEST(Classify, EchoesThresholds) {
    ClassifyConfig cfg;
    cfg.residual_tol = 0.01;
    cfg.min_run = 6;
    cfg.gap_threshold = 0.3;
    auto r = classify(parabola(), cfg);
    EXPECT_EQ(r.residual_tol, 0.01);
    EXPECT_EQ(r.min_run, 6u);
    EXPECT_EQ(r.fragmentation.gap_threshold, 0.3);
    EXPECT_EQ(r.cap_tol, 0.05);
}

// regime follows the literal decision rule on arbitrary inputs, and replays identically
TEST(Classify, DecisionRuleReplay) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<SpectrumPoint> pts(1 + trial % 11);
        for (auto& p : pts)
            p = {0.5 + 1.5 * u(rng), u(rng)};
        auto r = classify(pts);
        auto again = classify(pts);
        EXPECT_EQ(r.regime, again.regime);
        EXPECT_EQ(r.segment.found, again.segment.found);

        const bool bi = r.fragmentation.fragments.size() >= 2;
        EXPECT_EQ(r.regime == Regime::PostCrisisBiMultifractal, bi);
        if (!bi) {
            if (r.segment.found)
                EXPECT_EQ(r.regime, Regime::Crisis);
            else if (r.cap && r.cap->cap_shaped)
                EXPECT_EQ(r.regime, Regime::PreCrisis);
            else
                EXPECT_EQ(r.regime, Regime::Indeterminate);
        }
    }
}
