#include "cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mfk/mfk.hpp"

namespace mfk::cli {
namespace {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::EmptySignal:
    case ErrorCode::BadWindow:
    case ErrorCode::TooFewPoints:
        return kExitIo;
    case ErrorCode::SizingViolation:
        return kExitSizing;
    default:
        return kExitBadSpec;
    }
}

std::string paint(const Console& c, const char* ansi, const std::string& text) {
    if (!c.color)
        return text;
    return std::string("\x1b[") + ansi + "m" + text + "\x1b[0m";
}

void emit(const Console& c, const std::string& out_path, const std::string& content) {
    if (out_path.empty() || out_path == "-")
        c.out << content;
    else
        io::write_file_atomic(out_path, content);
}

struct GenerateArgs {
    std::string kind;
    std::string spec_path;
    std::uint64_t max_denominator = 0;
    std::size_t samples = 0;
    std::string mode = "equispaced";
    std::vector<double> p{0.5};
    std::vector<double> r{0.5};
    unsigned depth = 13;
    std::uint64_t seed = 0;
    std::vector<double> p_b{0.5};
    std::vector<double> r_b{1.0 / 3.0};
    unsigned depth_b = 13;
    std::optional<std::uint64_t> seed_b;
    double mix = 0.5;
    bool disjoint = false;
    std::string out;
};

struct AnalyzeArgs {
    std::string input;
    std::optional<std::size_t> boxes;
    std::optional<std::size_t> bins;
    bool auto_size = false;
    bool force = false;
    bool signal = false;
    std::string out;
};

struct ThresholdArgs {
    std::optional<double> gap_threshold;
    double segment_tol = ClassifyConfig{}.residual_tol;
    std::optional<std::size_t> min_run;
    double cap_tol = ClassifyConfig{}.cap_tol;
};

struct ClassifyArgs {
    std::string input;
    ThresholdArgs thresholds;
    std::string out;
};

struct SweepArgs {
    std::string input;
    std::vector<std::size_t> boxes;
    std::optional<std::size_t> bins;
    bool force = false;
    bool signal = false;
    std::string out;
};

struct PlotArgs {
    std::vector<std::string> inputs;
    std::optional<double> gap_threshold;
    std::string out;
};

void add_thresholds(CLI::App* cmd, ThresholdArgs& t) {
    cmd->add_option("--gap-threshold", t.gap_threshold, "alpha spacing that separates fragments (default 2.5 x median)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--segment-tol", t.segment_tol, "max residual of a constant-slope run")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--min-run", t.min_run, "minimum points in a segment (default max(4, ceil(n/2)))")
        ->check(CLI::Range(4, 1 << 20));
    cmd->add_option("--cap-tol", t.cap_tol, "tolerance of the single-peak test")->capture_default_str();
}

std::pair<double, double> two_probabilities(const std::vector<double>& v) {
    if (v.size() == 1)
        return {v[0], 1.0 - v[0]};
    return {v[0], v[1]};
}

std::pair<double, double> two_ratios(const std::vector<double>& v) {
    if (v.size() == 1)
        return {v[0], v[0]};
    return {v[0], v[1]};
}

SelfSimilarSpec spec_from_flags(const std::vector<double>& p, const std::vector<double>& r, unsigned depth,
                                std::size_t samples, std::uint64_t seed) {
    SelfSimilarSpec s;
    std::tie(s.p1, s.p2) = two_probabilities(p);
    std::tie(s.r1, s.r2) = two_ratios(r);
    s.depth = depth;
    s.sample_size = samples;
    s.seed = seed;
    return s;
}

int cmd_generate(const GenerateArgs& a, const Console& c) {
    CantorDust dust;
    std::vector<std::string> header{"kind=" + a.kind};
    if (a.kind == "farey") {
        dust = gen_farey(a.max_denominator);
        header.push_back("Q=" + std::to_string(a.max_denominator));
    } else if (a.kind == "uniform") {
        UniformMode mode;
        if (a.mode == "equispaced")
            mode = UniformMode::Equispaced;
        else if (a.mode == "random")
            mode = UniformMode::Random;
        else
            throw Error(ErrorCode::SpecError, "mode must be 'equispaced' or 'random'");
        dust = gen_uniform(a.samples, mode, a.seed);
        header.push_back("S=" + std::to_string(a.samples) + " mode=" + a.mode + " seed=" + std::to_string(a.seed));
    } else if (a.kind == "selfsimilar") {
        SelfSimilarSpec spec = a.spec_path.empty()
                                   ? spec_from_flags(a.p, a.r, a.depth, a.samples, a.seed)
                                   : self_similar_from_json(json::parse(io::read_file(a.spec_path)));
        dust = gen_selfsimilar(spec);
        header.push_back("spec=" + to_json(spec).dump());
    } else if (a.kind == "superposed") {
        SuperposedSpec spec;
        if (!a.spec_path.empty()) {
            spec = superposed_from_json(json::parse(io::read_file(a.spec_path)));
        } else {
            spec.a = spec_from_flags(a.p, a.r, a.depth, a.samples, a.seed);
            spec.b = spec_from_flags(a.p_b, a.r_b, a.depth_b, a.samples, a.seed_b.value_or(a.seed + 1));
            spec.mix = a.mix;
            spec.sample_size = a.samples;
            spec.placement = a.disjoint ? Placement::Disjoint : Placement::Overlap;
        }
        dust = gen_superposed(spec);
        header.push_back("spec=" + to_json(spec).dump());
    } else {
        throw Error(ErrorCode::SpecError, "unknown kind '" + a.kind + "'");
    }
    emit(c, a.out, io::format_dust(dust, header));
    return kExitOk;
}

CantorDust load_dust(const std::string& path, bool as_signal) {
    const auto text = io::read_file(path);
    if (as_signal)
        return normalize_signal(io::parse_signal(text));
    return io::parse_dust(text);
}

int cmd_analyze(const AnalyzeArgs& a, const Console& c) {
    const auto dust = load_dust(a.input, a.signal);
    std::size_t boxes = 0, bins = 0;
    if (a.auto_size || (!a.boxes && !a.bins)) {
        const auto sz = auto_size(dust.sample_size());
        boxes = sz.boxes;
        bins = sz.bins;
    } else {
        boxes = a.boxes ? *a.boxes : static_cast<std::size_t>(isqrt(dust.sample_size()));
        bins = a.bins ? *a.bins : std::max<std::size_t>(3, static_cast<std::size_t>(isqrt(boxes)) - 1);
    }
    auto spectrum = estimate(dust, boxes, bins, {.allow_violation = a.force});
    const auto& verdict = *spectrum.params.sizing;
    if (verdict.status != SizingStatus::Ok) {
        for (const auto& m : verdict.messages)
            c.err << paint(c, "33", std::string("sizing ") + to_string(verdict.status) + ": ") << m << "\n";
    }
    emit(c, a.out, io::format_spectrum(spectrum));
    return kExitOk;
}

ClassifyConfig config_from(const ThresholdArgs& t) {
    ClassifyConfig cfg;
    cfg.residual_tol = t.segment_tol;
    cfg.min_run = t.min_run;
    cfg.gap_threshold = t.gap_threshold;
    cfg.cap_tol = t.cap_tol;
    return cfg;
}

int cmd_classify(const ClassifyArgs& a, const Console& c) {
    const auto spectrum = io::parse_spectrum(io::read_file(a.input));
    const auto report = classify(spectrum, config_from(a.thresholds));
    emit(c, a.out, to_json(report).dump(2) + "\n");
    return kExitOk;
}

int cmd_sweep(const SweepArgs& a, const Console& c) {
    const auto dust = load_dust(a.input, a.signal);
    const auto bins = a.bins ? *a.bins : auto_size(dust.sample_size()).bins;
    const auto entries = sweep_boxes(dust, a.boxes, bins, {.allow_violation = a.force});

    const fs::path dir = a.out.empty() ? fs::path(".") : fs::path(a.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw Error(ErrorCode::ParseError, "cannot create output directory " + dir.string());

    json report = {{"input", a.input}, {"bins", bins}, {"force", a.force}};
    json rows = json::array();
    std::vector<SpectrumFeatures> feats;
    bool any_ok = false, all_sizing = true;
    for (const auto& e : entries) {
        json row = {{"B", e.boxes}};
        if (e.ok()) {
            any_ok = true;
            const auto name = "spectrum_B" + std::to_string(e.boxes) + ".csv";
            io::write_file_atomic(dir / name, io::format_spectrum(*e.spectrum));
            row["status"] = "ok";
            row["sizing"] = to_string(e.spectrum->params.sizing->status);
            row["csv"] = name;
            feats.push_back(features(*e.spectrum));
            row["features"] = to_json(feats.back());
        } else {
            all_sizing = all_sizing && e.error == ErrorCode::SizingViolation;
            row["status"] = "failed";
            row["error"] = std::string(to_string(*e.error));
            row["message"] = e.message;
            c.err << paint(c, "31", "B=" + std::to_string(e.boxes) + " failed: ") << e.message << "\n";
        }
        rows.push_back(std::move(row));
    }
    report["entries"] = std::move(rows);
    if (feats.size() >= 2)
        report["trend"] = to_json(compare_sweep(feats));
    else
        report["trend"] = {{"error", std::string(to_string(ErrorCode::NeedsSweep))}};

    const auto text = report.dump(2) + "\n";
    io::write_file_atomic(dir / "sweep.json", text);
    c.out << text;
    if (any_ok)
        return kExitOk;
    return all_sizing ? kExitSizing : kExitBadSpec;
}

int cmd_plot(const PlotArgs& a, const Console& c) {
    std::vector<plot::Series> series;
    for (const auto& path : a.inputs) {
        auto s = io::parse_spectrum(io::read_file(path));
        std::string label = s.params.box_count > 0 ? "B=" + std::to_string(s.params.box_count)
                                                   : fs::path(path).stem().string();
        series.push_back({std::move(label), std::move(s)});
    }
    plot::PlotOptions opts;
    opts.gap_threshold = a.gap_threshold;
    emit(c, a.out, plot::render_svg(series, opts));
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, Console console) {
    CLI::App app{"Histogram-method multifractal spectra of point sets on [0,1]", "mfk"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "write a synthetic dust");
    g->add_option("kind", gen.kind, "selfsimilar | superposed | farey | uniform")->required();
    g->add_option("--spec", gen.spec_path, "JSON spec file (selfsimilar, superposed)");
    g->add_option("--Q", gen.max_denominator, "Farey: largest denominator");
    g->add_option("--S", gen.samples, "sample size");
    g->add_option("--mode", gen.mode, "uniform: equispaced | random")->capture_default_str();
    g->add_option("--p", gen.p, "p1 [p2]; p2 defaults to 1 - p1")->expected(1, 2);
    g->add_option("--r", gen.r, "r1 [r2]; r2 defaults to r1")->expected(1, 2);
    g->add_option("--depth", gen.depth)->capture_default_str();
    g->add_option("--seed", gen.seed)->capture_default_str();
    g->add_option("--p-b", gen.p_b, "superposed: second measure p1 [p2]")->expected(1, 2);
    g->add_option("--r-b", gen.r_b, "superposed: second measure r1 [r2]")->expected(1, 2);
    g->add_option("--depth-b", gen.depth_b)->capture_default_str();
    g->add_option("--seed-b", gen.seed_b, "superposed: second seed (default seed + 1)");
    g->add_option("--mix", gen.mix, "superposed: fraction of samples from the first measure")->capture_default_str();
    g->add_flag("--disjoint", gen.disjoint, "superposed: first measure on [0,0.5), second on [0.5,1]");
    g->add_option("--out", gen.out, "output file (default stdout)");

    AnalyzeArgs an;
    auto* a = app.add_subcommand("analyze", "estimate the spectrum of a dust");
    a->add_option("input", an.input)->required();
    auto* boxes_opt = a->add_option("--boxes", an.boxes, "number of boxes B")->check(CLI::PositiveNumber);
    auto* bins_opt = a->add_option("--bins", an.bins, "number of alpha bins A")->check(CLI::PositiveNumber);
    auto* auto_opt = a->add_flag("--auto-size", an.auto_size, "B = floor(sqrt S), A = max(3, floor(sqrt B) - 1)");
    auto_opt->excludes(boxes_opt)->excludes(bins_opt);
    a->add_flag("--force", an.force, "estimate even when the sizing rule is violated");
    a->add_flag("--signal", an.signal, "input holds raw event times instead of a dust");
    a->add_option("--out", an.out, "output CSV (default stdout)");

    ClassifyArgs cl;
    auto* k = app.add_subcommand("classify", "classify the regime of a spectrum CSV");
    k->add_option("input", cl.input)->required();
    add_thresholds(k, cl.thresholds);
    k->add_option("--out", cl.out, "output JSON (default stdout)");

    SweepArgs sw;
    auto* s = app.add_subcommand("sweep", "estimate at several box counts and report trends");
    s->add_option("input", sw.input)->required();
    s->add_option("--boxes", sw.boxes, "comma-separated box counts, increasing")->required()->delimiter(',');
    s->add_option("--bins", sw.bins, "number of alpha bins (default from auto sizing)")->check(CLI::PositiveNumber);
    s->add_flag("--force", sw.force);
    s->add_flag("--signal", sw.signal);
    s->add_option("--out", sw.out, "output directory (default .)");

    PlotArgs pl;
    auto* p = app.add_subcommand("plot", "render spectra as SVG");
    p->add_option("inputs", pl.inputs, "spectrum CSV files")->required();
    p->add_option("--gap-threshold", pl.gap_threshold)->check(CLI::PositiveNumber);
    p->add_option("--out", pl.out, "output SVG (default stdout)");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& arg : args)
        argv.push_back(arg.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        console.out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        console.out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        console.err << paint(console, "31", "error: ") << e.what() << "\n";
        return kExitBadSpec;
    }

    try {
        if (g->parsed())
            return cmd_generate(gen, console);
        if (a->parsed())
            return cmd_analyze(an, console);
        if (k->parsed())
            return cmd_classify(cl, console);
        if (s->parsed())
            return cmd_sweep(sw, console);
        if (p->parsed())
            return cmd_plot(pl, console);
    } catch (const Error& e) {
        console.err << paint(console, "31", "error: ") << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const json::exception& e) {
        console.err << paint(console, "31", "error: ") << e.what() << "\n";
        return kExitBadSpec;
    } catch (const std::exception& e) {
        console.err << paint(console, "31", "error: ") << e.what() << "\n";
        return kExitIo;
    }
    return kExitBadSpec;
}

} // namespace mfk::cli
