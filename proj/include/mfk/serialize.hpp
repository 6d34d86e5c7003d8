#pragma once

// JSON mappings for reports and generator specs (nlohmann/json).

#include <string>

#include <json.hpp>

#include "mfk/error.hpp"
#include "mfk/geometry.hpp"
#include "mfk/oracles.hpp"

namespace mfk {

using json = nlohmann::ordered_json;

inline json to_json(const SpectrumFeatures& f) {
    return {{"alpha_min", f.alpha_min},       {"alpha_max", f.alpha_max},
            {"alpha_M", f.alpha_peak},        {"f_max", f.f_max},
            {"delta_alpha", f.delta_alpha},   {"bisectrix_gap", f.bisectrix_gap}};
}

inline json to_json(const SegmentReport& s) {
    json j = {{"found", s.found}};
    if (s.found) {
        j["run"] = {s.run_start, s.run_end};
        j["slope"] = s.slope;
        j["residual"] = s.residual;
    }
    return j;
}

inline json to_json(const FragmentReport& r) {
    json frags = json::array();
    for (const auto& fr : r.fragments)
        frags.push_back({fr.first, fr.last});
    json isolated = json::array();
    for (const auto& p : r.isolated_points)
        isolated.push_back({{"index", p.index}, {"alpha", p.alpha}, {"f", p.f}, {"on_axis", p.on_axis}});
    return {{"fragment_count", r.fragments.size()},
            {"fragments", frags},
            {"gaps", r.gaps},
            {"isolated_points", isolated},
            {"embryonic_second_spectrum", r.has_embryonic_spectrum()},
            {"gap_threshold", r.gap_threshold}};
}

inline json to_json(const CapCheck& c) {
    return {{"cap_shaped", c.cap_shaped}, {"violations", c.violations}, {"degenerate", c.degenerate}};
}

inline json to_json(const RegimeReport& r) {
    json j = {{"regime", to_string(r.regime)},
              {"features", to_json(r.features)},
              {"segment", to_json(r.segment)},
              {"fragmentation", to_json(r.fragmentation)}};
    j["cap"] = r.cap ? to_json(*r.cap) : json(nullptr);
    j["config"] = {{"residual_tol", r.residual_tol},
                   {"min_run", r.min_run},
                   {"gap_threshold", r.fragmentation.gap_threshold},
                   {"cap_tol", r.cap_tol}};
    return j;
}

inline json to_json(const FeatureDelta& d) {
    return {{"alpha_min", d.alpha_min}, {"alpha_M", d.alpha_peak}, {"f_max", d.f_max},
            {"bisectrix_gap", d.bisectrix_gap}};
}

inline json to_json(const SweepTrend& t) {
    json steps = json::array();
    for (const auto& s : t.steps)
        steps.push_back(to_json(s));
    return {{"steps", steps},
            {"total", to_json(t.total)},
            {"left_shift", t.left_shift},
            {"up_shift", t.up_shift},
            {"approaching_bisectrix", t.approaching_bisectrix}};
}

inline json to_json(const SelfSimilarSpec& s) {
    return {{"probabilities", {s.p1, s.p2}},
            {"ratios", {s.r1, s.r2}},
            {"depth", s.depth},
            {"S", s.sample_size},
            {"seed", s.seed}};
}

inline SelfSimilarSpec self_similar_from_json(const json& j) {
    try {
        SelfSimilarSpec s;
        const auto& p = j.at("probabilities");
        const auto& r = j.at("ratios");
        if (p.size() != 2 || r.size() != 2)
            throw Error(ErrorCode::SpecError, "probabilities and ratios need two entries each");
        s.p1 = p.at(0).get<double>();
        s.p2 = p.at(1).get<double>();
        s.r1 = r.at(0).get<double>();
        s.r2 = r.at(1).get<double>();
        s.depth = j.at("depth").get<unsigned>();
        s.sample_size = j.at("S").get<std::size_t>();
        s.seed = j.value("seed", std::uint64_t{0});
        validate(s);
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SpecError, e.what());
    }
}

inline json to_json(const SuperposedSpec& s) {
    return {{"a", to_json(s.a)},
            {"b", to_json(s.b)},
            {"mix", s.mix},
            {"S", s.sample_size},
            {"placement", s.placement == Placement::Disjoint ? "disjoint" : "overlap"}};
}

inline SuperposedSpec superposed_from_json(const json& j) {
    try {
        SuperposedSpec s;
        s.a = self_similar_from_json(j.at("a"));
        s.b = self_similar_from_json(j.at("b"));
        s.mix = j.at("mix").get<double>();
        s.sample_size = j.at("S").get<std::size_t>();
        const auto placement = j.value("placement", std::string("overlap"));
        if (placement == "disjoint")
            s.placement = Placement::Disjoint;
        else if (placement == "overlap")
            s.placement = Placement::Overlap;
        else
            throw Error(ErrorCode::SpecError, "placement must be 'overlap' or 'disjoint'");
        return s;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SpecError, e.what());
    }
}

} // namespace mfk
