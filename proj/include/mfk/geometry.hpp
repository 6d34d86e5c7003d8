#pragma once

/**
 * @file geometry.hpp
 * @brief Shape features of an estimated spectrum and regime classification.
 *
 * Three regimes are told apart by the shape of f(alpha):
 *  - PreCrisis: one connected, single-peaked cap.
 *  - Crisis: one piece containing a long run with constant slope f'(alpha),
 *    i.e. the Lagrangian coordinate q = f'(alpha) has collapsed.
 *  - PostCrisisBiMultifractal: the curve breaks into fragments separated
 *    by gaps in alpha (two or more measures share the support).
 *
 * "Cap-shaped" is a unimodal test (rise then fall), not a second-difference
 * concavity test; the word "convex" is sometimes used for the same shape.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "mfk/error.hpp"
#include "mfk/estimator.hpp"

namespace mfk {

struct SpectrumFeatures {
    double alpha_min = 0.0;
    double alpha_max = 0.0;
    double alpha_peak = 0.0;  // alpha_M, argmax of f (smallest alpha on ties)
    double f_max = 0.0;
    double delta_alpha = 0.0;
    double bisectrix_gap = 0.0; // min over points of (alpha - f)
};

namespace detail {

inline std::vector<SpectrumPoint> sorted_points(std::span<const SpectrumPoint> pts) {
    std::vector<SpectrumPoint> v(pts.begin(), pts.end());
    std::sort(v.begin(), v.end(), [](const SpectrumPoint& a, const SpectrumPoint& b) {
        return a.alpha < b.alpha || (a.alpha == b.alpha && a.f < b.f);
    });
    return v;
}

// index of max f; the first (smallest alpha) wins ties
inline std::size_t peak_index(std::span<const SpectrumPoint> pts) {
    std::size_t m = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].f > pts[m].f)
            m = i;
    return m;
}

struct LineFit {
    double slope;
    double intercept;
    double max_residual;
};

inline LineFit fit_line(std::span<const SpectrumPoint> pts) {
    const double n = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : pts) {
        mx += p.alpha;
        my += p.f;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : pts) {
        sxx += (p.alpha - mx) * (p.alpha - mx);
        sxy += (p.alpha - mx) * (p.f - my);
    }
    LineFit fit{};
    fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    fit.intercept = my - fit.slope * mx;
    fit.max_residual = 0.0;
    for (const auto& p : pts)
        fit.max_residual = std::max(fit.max_residual, std::abs(p.f - (fit.slope * p.alpha + fit.intercept)));
    return fit;
}

inline double median(std::vector<double> v) {
    const auto mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double upper = v[mid];
    if (v.size() % 2 == 1)
        return upper;
    double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

} // namespace detail

inline SpectrumFeatures features(std::span<const SpectrumPoint> points) {
    if (points.empty())
        throw Error(ErrorCode::TooFewPoints, "features need at least one point");
    const auto pts = detail::sorted_points(points);
    SpectrumFeatures out;
    out.alpha_min = pts.front().alpha;
    out.alpha_max = pts.back().alpha;
    const auto m = detail::peak_index(pts);
    out.alpha_peak = pts[m].alpha;
    out.f_max = pts[m].f;
    out.delta_alpha = out.alpha_max - out.alpha_min;
    out.bisectrix_gap = std::numeric_limits<double>::infinity();
    for (const auto& p : pts)
        out.bisectrix_gap = std::min(out.bisectrix_gap, p.alpha - p.f);
    return out;
}

inline SpectrumFeatures features(const Spectrum& s) { return features(std::span(s.points)); }

struct FeatureDelta {
    double alpha_min = 0.0;
    double alpha_peak = 0.0;
    double f_max = 0.0;
    double bisectrix_gap = 0.0;
};

/// How features move as B grows.
struct SweepTrend {
    std::vector<FeatureDelta> steps; // consecutive differences, next minus previous
    FeatureDelta total;              // last minus first
    bool left_shift = false;         // alpha_peak moved left
    bool up_shift = false;           // f_max moved up
    bool approaching_bisectrix = false;
};

/// Feature sets must be ordered by increasing B.
inline SweepTrend compare_sweep(std::span<const SpectrumFeatures> sets) {
    if (sets.size() < 2)
        throw Error(ErrorCode::NeedsSweep, "trend needs at least two box counts");

    auto diff = [](const SpectrumFeatures& a, const SpectrumFeatures& b) {
        return FeatureDelta{b.alpha_min - a.alpha_min, b.alpha_peak - a.alpha_peak,
                            b.f_max - a.f_max, b.bisectrix_gap - a.bisectrix_gap};
    };

    SweepTrend t;
    bool gap_never_grows = true;
    for (std::size_t i = 1; i < sets.size(); ++i) {
        t.steps.push_back(diff(sets[i - 1], sets[i]));
        if (t.steps.back().bisectrix_gap > 0.0)
            gap_never_grows = false;
    }
    t.total = diff(sets.front(), sets.back());
    t.left_shift = t.total.alpha_peak < 0.0;
    t.up_shift = t.total.f_max > 0.0;
    t.approaching_bisectrix = gap_never_grows && t.total.bisectrix_gap < 0.0;
    return t;
}

struct CapCheck {
    bool cap_shaped = false;
    std::vector<std::size_t> violations; // indices (alpha order) of dips breaking the single peak
    bool degenerate = false;             // peak sits at an end point
};

inline CapCheck cap_shape_check(std::span<const SpectrumPoint> points, double tol) {
    if (points.size() < 3)
        throw Error(ErrorCode::TooFewPoints, "cap check needs at least 3 points");
    const auto pts = detail::sorted_points(points);
    const auto m = detail::peak_index(pts);

    CapCheck out;
    for (std::size_t i = 0; i < m; ++i)
        if (pts[i + 1].f < pts[i].f - tol)
            out.violations.push_back(i + 1);
    for (std::size_t i = m; i + 1 < pts.size(); ++i)
        if (pts[i + 1].f > pts[i].f + tol)
            out.violations.push_back(i);
    std::sort(out.violations.begin(), out.violations.end());
    out.violations.erase(std::unique(out.violations.begin(), out.violations.end()), out.violations.end());
    out.cap_shaped = out.violations.empty();
    out.degenerate = m == 0 || m + 1 == pts.size();
    return out;
}

struct SegmentReport {
    bool found = false;
    std::size_t run_start = 0; // inclusive, alpha order
    std::size_t run_end = 0;   // inclusive
    double slope = 0.0;        // collapsed q = f'(alpha) along the run
    double residual = 0.0;     // max |f - line| over the run
};

inline std::size_t default_min_run(std::size_t n) {
    return std::max<std::size_t>(4, (n + 1) / 2);
}

/**
 * Longest run of consecutive points whose least-squares line stays within
 * residual_tol of every point (Chebyshev residual). Among runs of equal
 * length the smaller residual wins, then the leftmost.
 */
inline SegmentReport detect_segment(std::span<const SpectrumPoint> points, double residual_tol,
                                    std::size_t min_run) {
    if (min_run < 4)
        throw Error(ErrorCode::BadArgument, "min_run must be >= 4");
    SegmentReport best;
    const auto pts = detail::sorted_points(points);
    const auto n = pts.size();
    if (n < min_run)
        return best;

    for (std::size_t len = n; len >= min_run && !best.found; --len) {
        for (std::size_t start = 0; start + len <= n; ++start) {
            const auto fit = detail::fit_line(std::span(pts).subspan(start, len));
            if (fit.max_residual > residual_tol)
                continue;
            if (!best.found || fit.max_residual < best.residual) {
                best.found = true;
                best.run_start = start;
                best.run_end = start + len - 1;
                best.slope = fit.slope;
                best.residual = fit.max_residual;
            }
        }
    }
    return best;
}

struct IsolatedPoint {
    std::size_t index;
    double alpha;
    double f;
    bool on_axis; // f == 0: one box alone, not a second spectrum
};

struct Fragment {
    std::size_t first; // inclusive, alpha order
    std::size_t last;  // inclusive
    std::size_t size() const noexcept { return last - first + 1; }
};

struct FragmentReport {
    double gap_threshold = 0.0;
    std::vector<Fragment> fragments;
    std::vector<double> gaps; // alpha spacing across each break
    std::vector<IsolatedPoint> isolated_points;

    /// Size-1 fragment off the alpha axis next to a larger fragment.
    bool has_embryonic_spectrum() const noexcept {
        if (fragments.size() < 2)
            return false;
        return std::any_of(isolated_points.begin(), isolated_points.end(),
                           [](const IsolatedPoint& p) { return !p.on_axis; });
    }
};

/// Spacings of three median steps or more count as gaps; the lattice of binned
/// spacings is integral in epsilon_alpha, so the cut sits half a step below.
inline double default_gap_threshold(std::span<const SpectrumPoint> points) {
    if (points.size() < 2)
        return std::numeric_limits<double>::infinity();
    const auto pts = detail::sorted_points(points);
    std::vector<double> spacing;
    spacing.reserve(pts.size() - 1);
    for (std::size_t i = 1; i < pts.size(); ++i)
        spacing.push_back(pts[i].alpha - pts[i - 1].alpha);
    return 2.5 * detail::median(std::move(spacing));
}

inline FragmentReport detect_fragments(std::span<const SpectrumPoint> points, double gap_threshold) {
    if (points.empty())
        throw Error(ErrorCode::TooFewPoints, "fragment detection needs at least one point");
    if (!(gap_threshold > 0.0))
        throw Error(ErrorCode::BadArgument, "gap_threshold must be positive");

    const auto pts = detail::sorted_points(points);
    FragmentReport out;
    out.gap_threshold = gap_threshold;
    std::size_t first = 0;
    for (std::size_t i = 1; i <= pts.size(); ++i) {
        const bool at_end = i == pts.size();
        const double spacing = at_end ? 0.0 : pts[i].alpha - pts[i - 1].alpha;
        if (!at_end && spacing <= gap_threshold)
            continue;
        out.fragments.push_back({first, i - 1});
        if (!at_end)
            out.gaps.push_back(spacing);
        first = i;
    }
    for (const auto& fr : out.fragments) {
        if (fr.size() == 1) {
            const auto& p = pts[fr.first];
            out.isolated_points.push_back({fr.first, p.alpha, p.f, p.f == 0.0});
        }
    }
    return out;
}

enum class Regime { PreCrisis, Crisis, PostCrisisBiMultifractal, Indeterminate };

constexpr const char* to_string(Regime r) noexcept {
    switch (r) {
    case Regime::PreCrisis: return "PreCrisis";
    case Regime::Crisis: return "Crisis";
    case Regime::PostCrisisBiMultifractal: return "PostCrisisBiMultifractal";
    case Regime::Indeterminate: return "Indeterminate";
    }
    return "?";
}

/// Unset thresholds fall back to defaults computed from the spectrum itself.
struct ClassifyConfig {
    double residual_tol = 0.02;
    std::optional<std::size_t> min_run;
    std::optional<double> gap_threshold;
    double cap_tol = 0.05;
};

struct RegimeReport {
    Regime regime = Regime::Indeterminate;
    SpectrumFeatures features;
    SegmentReport segment;
    FragmentReport fragmentation;
    std::optional<CapCheck> cap; // absent below 3 points
    // thresholds actually used
    double residual_tol = 0.0;
    std::size_t min_run = 0;
    double cap_tol = 0.0;
};

inline RegimeReport classify(std::span<const SpectrumPoint> points, const ClassifyConfig& config = {}) {
    if (points.empty())
        throw Error(ErrorCode::TooFewPoints, "cannot classify an empty spectrum");

    RegimeReport r;
    r.residual_tol = config.residual_tol;
    r.min_run = config.min_run.value_or(default_min_run(points.size()));
    r.cap_tol = config.cap_tol;
    r.features = features(points);
    r.fragmentation = detect_fragments(points, config.gap_threshold.value_or(default_gap_threshold(points)));
    r.segment = detect_segment(points, r.residual_tol, r.min_run);
    if (points.size() >= 3)
        r.cap = cap_shape_check(points, r.cap_tol);

    const auto pieces = r.fragmentation.fragments.size();
    if (pieces >= 2)
        r.regime = Regime::PostCrisisBiMultifractal;
    else if (r.segment.found)
        r.regime = Regime::Crisis;
    else if (r.cap && r.cap->cap_shaped)
        r.regime = Regime::PreCrisis;
    else
        r.regime = Regime::Indeterminate;
    return r;
}

inline RegimeReport classify(const Spectrum& s, const ClassifyConfig& config = {}) {
    return classify(std::span(s.points), config);
}

} // namespace mfk
