#pragma once

/**
 * @file measure.hpp
 * @brief Cantor dusts on the unit segment and their box-cover natural measure.
 *
 * A dust is a finite sorted multiset of points in [0,1]. Covering it with B
 * equal boxes gives the natural measure: the fraction of sample points in
 * each box. Box i is [i/B, (i+1)/B) except the last one, which is closed so
 * that the point 1 is counted.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mfk/error.hpp"

namespace mfk {

struct SignalMeta {
    std::optional<double> kappa; // acceleration, units of g
    std::optional<double> nu;    // frequency, Hz
};

/// Raw contact-event times on an observation window.
struct EventSignal {
    std::vector<double> events;
    double t_start = 0.0;
    double t_end = 0.0;
    SignalMeta meta;
};

class CantorDust {
public:
    CantorDust() = default;

    /// Sorts the input. Throws BadArgument if a point is outside [0,1] or NaN.
    explicit CantorDust(std::vector<double> points) : points_(std::move(points)) {
        for (double p : points_) {
            if (!(p >= 0.0 && p <= 1.0))
                throw Error(ErrorCode::BadArgument, "dust point outside [0,1]");
        }
        std::sort(points_.begin(), points_.end());
    }

    std::span<const double> points() const noexcept { return points_; }
    std::size_t sample_size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }

    friend bool operator==(const CantorDust&, const CantorDust&) = default;

private:
    std::vector<double> points_;
};

struct NaturalMeasure {
    std::size_t box_count = 0;          // B
    double box_length = 0.0;            // epsilon_l = 1/B
    std::size_t sample_size = 0;        // S
    std::vector<std::uint64_t> counts;  // per-box point counts
    std::vector<double> mu;             // counts / S
    std::vector<std::size_t> occupied;  // indices with mu > 0, increasing
};

inline CantorDust normalize_signal(const EventSignal& signal) {
    if (signal.events.empty())
        throw Error(ErrorCode::EmptySignal, "signal has no events");
    if (!(std::isfinite(signal.t_start) && std::isfinite(signal.t_end)) ||
        !(signal.t_start < signal.t_end))
        throw Error(ErrorCode::BadWindow, "window must satisfy t_start < t_end");

    const double span = signal.t_end - signal.t_start;
    std::vector<double> points;
    points.reserve(signal.events.size());
    double previous = -INFINITY;
    for (double t : signal.events) {
        if (t < signal.t_start || t > signal.t_end)
            throw Error(ErrorCode::BadWindow, "event outside the observation window");
        if (!(t > previous))
            throw Error(ErrorCode::BadArgument, "event times must be strictly increasing");
        previous = t;
        // endpoints map exactly; the clamp absorbs rounding just inside the window
        points.push_back(std::clamp((t - signal.t_start) / span, 0.0, 1.0));
    }
    return CantorDust(std::move(points));
}

/// Index of the box holding x under the half-open convention, last box closed.
inline std::size_t box_index(double x, std::size_t box_count) noexcept {
    const auto last = box_count - 1;
    const double b = static_cast<double>(box_count);
    auto i = static_cast<std::size_t>(std::min(std::floor(x * b), static_cast<double>(last)));
    // floor(x*B) can land one box off near a boundary; compare against i/B itself
    while (i > 0 && x < static_cast<double>(i) / b)
        --i;
    while (i < last && x >= static_cast<double>(i + 1) / b)
        ++i;
    return i;
}

inline NaturalMeasure cover(const CantorDust& dust, std::size_t box_count) {
    if (box_count < 2)
        throw Error(ErrorCode::BadBoxCount, "need at least 2 boxes");
    if (dust.empty())
        throw Error(ErrorCode::EmptySignal, "dust is empty");

    NaturalMeasure m;
    m.box_count = box_count;
    m.box_length = 1.0 / static_cast<double>(box_count);
    m.sample_size = dust.sample_size();
    m.counts.assign(box_count, 0);
    for (double p : dust.points())
        ++m.counts[box_index(p, box_count)];

    const double s = static_cast<double>(m.sample_size);
    m.mu.resize(box_count);
    for (std::size_t i = 0; i < box_count; ++i) {
        m.mu[i] = static_cast<double>(m.counts[i]) / s;
        if (m.counts[i] > 0)
            m.occupied.push_back(i);
    }
    return m;
}

} // namespace mfk
