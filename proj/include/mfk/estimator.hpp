#pragma once

/**
 * @file estimator.hpp
 * @brief Histogram (definitional) multifractal spectrum at a single box scale.
 *
 * Each occupied box gets a concentration alpha = log(mu_i) / log(eps_l).
 * The alphas are binned into A equal-width bins spanning their observed
 * range, and a bin holding N boxes contributes the point
 * (bin midpoint, log N / log(1/eps_l)). Empty bins contribute nothing.
 *
 * Sample size S, box count B and bin count A must be separated by squares,
 * S >= B^2 >= A^4, for the three scales eps_s << eps_l << eps_alpha to hold.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mfk/error.hpp"
#include "mfk/measure.hpp"

namespace mfk {

struct AlphaEntry {
    std::size_t box;
    double alpha;
};

struct AlphaField {
    std::vector<AlphaEntry> entries; // one per occupied box, box order
    double box_length = 0.0;
    std::size_t box_count = 0;
};

enum class SizingStatus { Ok, Warning, Violation };

constexpr const char* to_string(SizingStatus s) noexcept {
    switch (s) {
    case SizingStatus::Ok: return "Ok";
    case SizingStatus::Warning: return "Warning";
    case SizingStatus::Violation: return "Violation";
    }
    return "?";
}

struct SizingVerdict {
    SizingStatus status = SizingStatus::Ok;
    std::vector<std::string> messages;
};

struct SpectrumPoint {
    double alpha;
    double f;
    friend bool operator==(const SpectrumPoint&, const SpectrumPoint&) = default;
};

struct SpectrumParams {
    std::size_t sample_size = 0;  // S
    std::size_t box_count = 0;    // B
    std::size_t bin_count = 0;    // A
    double epsilon_alpha = 0.0;   // bin width, 0 when all alphas coincide
    std::optional<SizingVerdict> sizing;
};

struct Spectrum {
    std::vector<SpectrumPoint> points; // strictly increasing alpha
    SpectrumParams params;
};

inline AlphaField alpha_field(const NaturalMeasure& measure) {
    AlphaField field;
    field.box_length = measure.box_length;
    field.box_count = measure.box_count;
    field.entries.reserve(measure.occupied.size());
    const double log_eps = std::log(measure.box_length);
    for (std::size_t i : measure.occupied)
        field.entries.push_back({i, std::log(measure.mu[i]) / log_eps});
    return field;
}

inline Spectrum histogram_spectrum(const AlphaField& field, std::size_t bins) {
    if (bins < 1)
        throw Error(ErrorCode::BadArgument, "bin count must be >= 1");
    if (field.entries.empty())
        throw Error(ErrorCode::BadArgument, "alpha field is empty");

    Spectrum out;
    out.params.box_count = field.box_count;
    out.params.bin_count = bins;

    const double log_scale = std::log(static_cast<double>(field.box_count));
    auto dimension = [log_scale](std::size_t n) {
        return std::log(static_cast<double>(n)) / log_scale;
    };

    auto [lo_it, hi_it] = std::minmax_element(
        field.entries.begin(), field.entries.end(),
        [](const AlphaEntry& a, const AlphaEntry& b) { return a.alpha < b.alpha; });
    const double lo = lo_it->alpha;
    const double hi = hi_it->alpha;

    if (lo == hi) {
        out.points.push_back({lo, dimension(field.entries.size())});
        return out;
    }

    const double width = (hi - lo) / static_cast<double>(bins);
    out.params.epsilon_alpha = width;
    std::vector<std::size_t> counts(bins, 0);
    for (const auto& e : field.entries) {
        auto j = static_cast<std::size_t>((e.alpha - lo) / width);
        ++counts[std::min(j, bins - 1)];
    }
    for (std::size_t j = 0; j < bins; ++j) {
        if (counts[j] == 0)
            continue;
        const double mid = lo + (static_cast<double>(j) + 0.5) * width;
        out.points.push_back({mid, dimension(counts[j])});
    }
    return out;
}

inline SizingVerdict validate_sizing(std::uint64_t samples, std::uint64_t boxes, std::uint64_t bins) {
    if (samples == 0 || boxes == 0 || bins == 0)
        throw Error(ErrorCode::BadArgument, "S, B and A must be positive");

    SizingVerdict v;
    // x*x <= y  <=>  x <= floor(y/x), which cannot overflow
    const bool box_rule = boxes <= samples / boxes;
    const bool bin_rule = bins <= boxes / bins;
    // B <= 2 sqrt(S)  <=>  B^2 <= 4 S
    const bool box_relaxed = boxes <= (4 * samples) / boxes;

    if (!bin_rule) {
        v.status = SizingStatus::Violation;
        v.messages.push_back("B >= A^2 violated: B=" + std::to_string(boxes) +
                             " < A^2=" + std::to_string(bins * bins));
    }
    if (!box_rule) {
        if (box_relaxed) {
            if (v.status != SizingStatus::Violation)
                v.status = SizingStatus::Warning;
            v.messages.push_back("S >= B^2 not met: B=" + std::to_string(boxes) +
                                 " exceeds sqrt(S) but stays within 2 sqrt(S); spectrum may lose smoothness");
        } else {
            v.status = SizingStatus::Violation;
            v.messages.push_back("S >= B^2 violated: B=" + std::to_string(boxes) +
                                 " > 2 sqrt(S) for S=" + std::to_string(samples));
        }
    }
    return v;
}

struct Sizing {
    std::size_t boxes;
    std::size_t bins;
    friend bool operator==(const Sizing&, const Sizing&) = default;
};

inline std::uint64_t isqrt(std::uint64_t n) noexcept {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    // compare by division so r + 1 near 2^32 cannot overflow the square
    while (r > 0 && r > n / r)
        --r;
    while (r + 1 <= n / (r + 1))
        ++r;
    return r;
}

/// B = floor(sqrt S), A a little under sqrt B with a floor of 3.
inline Sizing auto_size(std::uint64_t samples) {
    if (samples < 16)
        throw Error(ErrorCode::TooFewSamples, "auto sizing needs S >= 16, got " + std::to_string(samples));
    const auto boxes = isqrt(samples);
    const auto root = isqrt(boxes);
    const auto bins = std::max<std::uint64_t>(3, root - 1);
    return {static_cast<std::size_t>(boxes), static_cast<std::size_t>(bins)};
}

struct EstimateOptions {
    bool allow_violation = false;
};

inline Spectrum estimate(const CantorDust& dust, std::size_t boxes, std::size_t bins,
                         EstimateOptions opts = {}) {
    if (dust.empty())
        throw Error(ErrorCode::EmptySignal, "dust is empty");
    if (bins < 1)
        throw Error(ErrorCode::BadArgument, "bin count must be >= 1");
    if (boxes < 2)
        throw Error(ErrorCode::BadBoxCount, "need at least 2 boxes");

    auto verdict = validate_sizing(dust.sample_size(), boxes, bins);
    if (verdict.status == SizingStatus::Violation && !opts.allow_violation) {
        std::string why;
        for (const auto& m : verdict.messages)
            why += (why.empty() ? "" : "; ") + m;
        throw Error(ErrorCode::SizingViolation, why);
    }
    auto spectrum = histogram_spectrum(alpha_field(cover(dust, boxes)), bins);
    spectrum.params.sample_size = dust.sample_size();
    spectrum.params.sizing = std::move(verdict);
    return spectrum;
}

struct SweepEntry {
    std::size_t boxes = 0;
    std::optional<Spectrum> spectrum;
    std::optional<ErrorCode> error;
    std::string message;

    bool ok() const noexcept { return spectrum.has_value(); }
};

/// One estimate per box count. Entries run concurrently; failures stay in their slot.
inline std::vector<SweepEntry> sweep_boxes(const CantorDust& dust, const std::vector<std::size_t>& box_list,
                                           std::size_t bins, EstimateOptions opts = {}) {
    std::vector<std::future<SweepEntry>> pending;
    pending.reserve(box_list.size());
    for (std::size_t boxes : box_list) {
        pending.push_back(std::async(std::launch::async, [&dust, boxes, bins, opts] {
            SweepEntry entry;
            entry.boxes = boxes;
            try {
                entry.spectrum = estimate(dust, boxes, bins, opts);
            } catch (const Error& e) {
                entry.error = e.code();
                entry.message = e.what();
            }
            return entry;
        }));
    }
    std::vector<SweepEntry> out;
    out.reserve(pending.size());
    for (auto& f : pending)
        out.push_back(f.get());
    return out;
}

} // namespace mfk
