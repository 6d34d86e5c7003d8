#pragma once

/**
 * @file oracles.hpp
 * @brief Point sets with known multifractal structure, and their exact spectra.
 *
 * Two-map self-similar cascades: at each level a sample descends into the
 * left child (length ratio r1, probability p1) or the right child (r2, p2).
 * Children sit at the two ends of the parent, so r1 + r2 < 1 leaves a hole
 * in the middle. The thermodynamic spectrum follows from
 *
 *     p1^q r1^(-tau) + p2^q r2^(-tau) = 1,  alpha = tau'(q),  f = q alpha - tau,
 *
 * which has a closed form when r1 = r2.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mfk/error.hpp"
#include "mfk/measure.hpp"

namespace mfk {

struct SelfSimilarSpec {
    double p1 = 0.5, p2 = 0.5;
    double r1 = 0.5, r2 = 0.5;
    unsigned depth = 1;
    std::size_t sample_size = 1;
    std::uint64_t seed = 0;

    friend bool operator==(const SelfSimilarSpec&, const SelfSimilarSpec&) = default;
};

inline void validate(const SelfSimilarSpec& s) {
    if (!(s.p1 > 0.0 && s.p2 > 0.0))
        throw Error(ErrorCode::SpecError, "probabilities must be positive");
    if (std::abs(s.p1 + s.p2 - 1.0) > 1e-12)
        throw Error(ErrorCode::SpecError, "probabilities must sum to 1");
    if (!(s.r1 > 0.0 && s.r2 > 0.0))
        throw Error(ErrorCode::SpecError, "contraction ratios must be positive");
    if (s.r1 + s.r2 > 1.0)
        throw Error(ErrorCode::SpecError, "contraction ratios must satisfy r1 + r2 <= 1");
    if (s.depth < 1)
        throw Error(ErrorCode::SpecError, "depth must be >= 1");
    if (s.sample_size < 1)
        throw Error(ErrorCode::SpecError, "sample size must be >= 1");
}

namespace detail {

// Uniform double in [0,1) from the top 53 bits; same stream on every platform.
inline double unit_draw(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Finest interval must stay above double resolution on [0,1].
inline void check_depth(const SelfSimilarSpec& s) {
    const double finest = static_cast<double>(s.depth) * std::log(1.0 / std::min(s.r1, s.r2));
    if (finest > 52.0 * std::log(2.0))
        throw Error(ErrorCode::DepthTooLarge,
                    "depth " + std::to_string(s.depth) + " resolves intervals below double precision");
}

inline std::vector<double> cascade_samples(const SelfSimilarSpec& s, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        double lo = 0.0, len = 1.0;
        for (unsigned d = 0; d < s.depth; ++d) {
            if (unit_draw(rng) < s.p1) {
                len *= s.r1;
            } else {
                lo += len * (1.0 - s.r2);
                len *= s.r2;
            }
        }
        out.push_back(lo + 0.5 * len);
    }
    return out;
}

} // namespace detail

inline CantorDust gen_selfsimilar(const SelfSimilarSpec& spec) {
    validate(spec);
    detail::check_depth(spec);
    return CantorDust(detail::cascade_samples(spec, spec.sample_size, spec.seed));
}

struct OraclePoint {
    double q;
    double tau;
    double alpha;
    double f;
};

struct OracleSpectrum {
    std::vector<OraclePoint> curve; // in q_grid order
};

/// Largest q-grid step accepted for the centered difference tau'(q).
inline constexpr double kMaxOracleStep = 0.05;

/// Root of p1^q r1^(-tau) + p2^q r2^(-tau) = 1, residual within 1e-12.
inline double solve_tau(const SelfSimilarSpec& s, double q) {
    const double a = std::pow(s.p1, q), b = std::pow(s.p2, q);
    const double la = std::log(s.r1), lb = std::log(s.r2);
    // g is increasing in tau since log r < 0
    auto g = [&](double tau) { return a * std::exp(-tau * la) + b * std::exp(-tau * lb) - 1.0; };

    double lo = -1.0, hi = 1.0;
    while (g(lo) > 0.0)
        lo *= 2.0;
    while (g(hi) < 0.0)
        hi *= 2.0;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        const bool narrow = hi - lo <= 4 * std::numeric_limits<double>::epsilon() * std::abs(mid);
        if (std::abs(gm) <= 1e-14 || narrow)
            return mid;
        (gm < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace detail {

inline OraclePoint closed_form_point(const SelfSimilarSpec& s, double q) {
    const double a = std::pow(s.p1, q), b = std::pow(s.p2, q);
    const double z = a + b;
    const double log_r = std::log(s.r1);
    OraclePoint pt{};
    pt.q = q;
    pt.alpha = (a * std::log(s.p1) + b * std::log(s.p2)) / (z * log_r);
    pt.tau = std::log(z) / log_r;
    pt.f = q * pt.alpha - pt.tau;
    return pt;
}

inline void check_grid(std::span<const double> q_grid) {
    if (q_grid.empty())
        throw Error(ErrorCode::GridTooCoarse, "q grid is empty");
    for (std::size_t i = 1; i < q_grid.size(); ++i)
        if (!(q_grid[i] > q_grid[i - 1]))
            throw Error(ErrorCode::BadArgument, "q grid must be strictly increasing");
}

} // namespace detail

/// Equal-ratio closed form; needs r1 == r2.
inline OracleSpectrum oracle_spectrum_closed_form(const SelfSimilarSpec& spec, std::span<const double> q_grid) {
    validate(spec);
    if (spec.r1 != spec.r2)
        throw Error(ErrorCode::BadArgument, "closed form needs equal contraction ratios");
    detail::check_grid(q_grid);
    OracleSpectrum out;
    out.curve.reserve(q_grid.size());
    for (double q : q_grid)
        out.curve.push_back(detail::closed_form_point(spec, q));
    return out;
}

/// Root-found tau(q); alpha is the centered difference with the local grid step.
inline OracleSpectrum oracle_spectrum_numeric(const SelfSimilarSpec& spec, std::span<const double> q_grid) {
    validate(spec);
    detail::check_grid(q_grid);
    if (q_grid.size() < 2)
        throw Error(ErrorCode::GridTooCoarse, "numeric oracle needs at least two grid points");
    for (std::size_t i = 1; i < q_grid.size(); ++i)
        if (q_grid[i] - q_grid[i - 1] > kMaxOracleStep + 1e-12)
            throw Error(ErrorCode::GridTooCoarse, "q grid step exceeds " + std::to_string(kMaxOracleStep));

    OracleSpectrum out;
    out.curve.reserve(q_grid.size());
    const auto n = q_grid.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double q = q_grid[i];
        const double h_left = i > 0 ? q - q_grid[i - 1] : q_grid[1] - q_grid[0];
        const double h_right = i + 1 < n ? q_grid[i + 1] - q : q_grid[n - 1] - q_grid[n - 2];
        const double h = std::min(h_left, h_right);
        OraclePoint pt{};
        pt.q = q;
        pt.tau = solve_tau(spec, q);
        pt.alpha = (solve_tau(spec, q + h) - solve_tau(spec, q - h)) / (2.0 * h);
        pt.f = q * pt.alpha - pt.tau;
        out.curve.push_back(pt);
    }
    return out;
}

/// Exact spectrum along q_grid: closed form when r1 == r2, root finding otherwise.
inline OracleSpectrum oracle_spectrum(const SelfSimilarSpec& spec, std::span<const double> q_grid) {
    if (spec.r1 == spec.r2)
        return oracle_spectrum_closed_form(spec, q_grid);
    return oracle_spectrum_numeric(spec, q_grid);
}

/// Grid lo, lo + 1/n, ..., hi for n steps per unit; points are k/n so 0 and 1 are exact.
inline std::vector<double> q_grid(int lo, int hi, int steps_per_unit) {
    std::vector<double> g;
    for (long k = static_cast<long>(lo) * steps_per_unit; k <= static_cast<long>(hi) * steps_per_unit; ++k)
        g.push_back(static_cast<double>(k) / steps_per_unit);
    return g;
}

enum class Placement { Overlap, Disjoint };

struct SuperposedSpec {
    SelfSimilarSpec a;
    SelfSimilarSpec b;
    double mix = 0.5; // fraction of the sample drawn from a
    std::size_t sample_size = 0;
    Placement placement = Placement::Overlap;
};

/**
 * Union of two cascades. Disjoint placement squeezes a into [0, 0.5) and b
 * into [0.5, 1]; overlap leaves both on the whole segment.
 */
inline CantorDust gen_superposed(const SuperposedSpec& spec) {
    validate(spec.a);
    validate(spec.b);
    detail::check_depth(spec.a);
    detail::check_depth(spec.b);
    if (!(spec.mix > 0.0 && spec.mix < 1.0))
        throw Error(ErrorCode::SpecError, "mix must lie strictly between 0 and 1");
    if (spec.sample_size < 2)
        throw Error(ErrorCode::SpecError, "superposed sample size must be >= 2");

    const auto n_a = static_cast<std::size_t>(std::llround(spec.mix * static_cast<double>(spec.sample_size)));
    if (n_a == 0 || n_a >= spec.sample_size)
        throw Error(ErrorCode::SpecError, "mix leaves one component without samples");
    auto pa = detail::cascade_samples(spec.a, n_a, spec.a.seed);
    auto pb = detail::cascade_samples(spec.b, spec.sample_size - n_a, spec.b.seed);

    if (spec.placement == Placement::Disjoint) {
        // a stays strictly below 0.5: its samples are midpoints, never 1
        for (double& x : pa)
            x *= 0.5;
        for (double& x : pb)
            x = 0.5 + 0.5 * x;
    }
    pa.insert(pa.end(), pb.begin(), pb.end());
    return CantorDust(std::move(pa));
}

/// All reduced fractions p/q in [0,1] with q <= max_denominator, once each.
inline CantorDust gen_farey(std::uint64_t max_denominator) {
    if (max_denominator < 2)
        throw Error(ErrorCode::SpecError, "Farey generator needs Q >= 2");
    // Successive Farey terms from the neighbour recurrence, already sorted.
    std::vector<double> pts;
    std::uint64_t a = 0, b = 1, c = 1, d = max_denominator;
    pts.push_back(0.0);
    while (c <= max_denominator) {
        const std::uint64_t k = (max_denominator + b) / d;
        const std::uint64_t next_c = k * c - a, next_d = k * d - b;
        a = c;
        b = d;
        c = next_c;
        d = next_d;
        pts.push_back(static_cast<double>(a) / static_cast<double>(b));
        if (a == b)
            break;
    }
    return CantorDust(std::move(pts));
}

enum class UniformMode { Equispaced, Random };

inline CantorDust gen_uniform(std::size_t samples, UniformMode mode, std::uint64_t seed = 0) {
    if (samples < 1)
        throw Error(ErrorCode::SpecError, "uniform generator needs S >= 1");
    std::vector<double> pts;
    pts.reserve(samples);
    if (mode == UniformMode::Equispaced) {
        const double s = static_cast<double>(samples);
        for (std::size_t k = 0; k < samples; ++k)
            pts.push_back((static_cast<double>(k) + 0.5) / s);
    } else {
        std::mt19937_64 rng(seed);
        for (std::size_t k = 0; k < samples; ++k)
            pts.push_back(detail::unit_draw(rng));
    }
    return CantorDust(std::move(pts));
}

} // namespace mfk
