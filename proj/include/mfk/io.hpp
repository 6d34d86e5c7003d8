#pragma once

// Plain-text formats:
//   signal   one event time per line; "# key=value" headers (kappa, nu, t_start, t_end)
//   dust     one real in [0,1] per line; '#' lines are comments
//   spectrum "# key=value" metadata lines, then the header "alpha,f", then rows

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mfk/error.hpp"
#include "mfk/estimator.hpp"
#include "mfk/measure.hpp"

namespace mfk::io {

/// Shortest fixed-notation text that reads back to the same double.
inline std::string format_number(double v) {
    char buf[400];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    if (res.ec != std::errc{})
        res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline double parse_double(std::string_view s, std::size_t line) {
    s = trim(s);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": not a number: '" + std::string(s) + "'");
    return v;
}

// "# a=1 b=2" -> {a:1, b:2}; tokens without '=' are ignored
inline void parse_header(std::string_view body, std::map<std::string, std::string>& out) {
    std::istringstream in{std::string(body)};
    std::string tok;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq != std::string::npos && eq > 0)
            out[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
}

inline std::vector<std::string> lines_of(std::istream& in) {
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line))
        lines.push_back(line);
    return lines;
}

} // namespace detail

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::ParseError, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes to a sibling temp file, then renames over the target.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::ParseError, "cannot write " + tmp.string());
        out << content;
        if (!out)
            throw Error(ErrorCode::ParseError, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::ParseError, "cannot move output into " + path.string());
    }
}

inline EventSignal parse_signal(std::istream& in) {
    EventSignal sig;
    std::map<std::string, std::string> header;
    std::size_t n = 0;
    for (const auto& raw : detail::lines_of(in)) {
        ++n;
        auto line = detail::trim(raw);
        if (line.empty())
            continue;
        if (line.front() == '#') {
            detail::parse_header(line.substr(1), header);
            continue;
        }
        sig.events.push_back(detail::parse_double(line, n));
    }
    auto number = [&](const char* key) -> std::optional<double> {
        auto it = header.find(key);
        if (it == header.end())
            return std::nullopt;
        return detail::parse_double(it->second, 0);
    };
    sig.meta.kappa = number("kappa");
    sig.meta.nu = number("nu");
    const auto t0 = number("t_start");
    const auto t1 = number("t_end");
    if (!sig.events.empty()) {
        sig.t_start = t0.value_or(sig.events.front());
        sig.t_end = t1.value_or(sig.events.back());
    } else {
        sig.t_start = t0.value_or(0.0);
        sig.t_end = t1.value_or(0.0);
    }
    return sig;
}

inline CantorDust parse_dust(std::istream& in) {
    std::vector<double> pts;
    std::size_t n = 0;
    for (const auto& raw : detail::lines_of(in)) {
        ++n;
        auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#')
            continue;
        const double v = detail::parse_double(line, n);
        if (v < 0.0 || v > 1.0)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(n) + ": dust point outside [0,1]");
        pts.push_back(v);
    }
    if (pts.empty())
        throw Error(ErrorCode::ParseError, "dust file has no points");
    return CantorDust(std::move(pts));
}

inline std::string format_dust(const CantorDust& dust, const std::vector<std::string>& comments = {}) {
    std::string out;
    for (const auto& c : comments)
        out += "# " + c + "\n";
    for (double p : dust.points()) {
        out += format_number(p);
        out += '\n';
    }
    return out;
}

inline std::string format_spectrum(const Spectrum& s) {
    std::string out;
    const auto status = s.params.sizing ? to_string(s.params.sizing->status) : "Unchecked";
    out += std::string("# sizing=") + status + " B=" + std::to_string(s.params.box_count) +
           " A=" + std::to_string(s.params.bin_count) + "\n";
    out += "# S=" + std::to_string(s.params.sample_size) +
           " epsilon_alpha=" + format_number(s.params.epsilon_alpha) + " binning=equal-width\n";
    if (s.params.sizing)
        for (const auto& m : s.params.sizing->messages)
            out += "# note: " + m + "\n";
    out += "alpha,f\n";
    for (const auto& p : s.points)
        out += format_number(p.alpha) + "," + format_number(p.f) + "\n";
    return out;
}

inline Spectrum parse_spectrum(std::istream& in) {
    Spectrum s;
    std::map<std::string, std::string> header;
    bool seen_header = false;
    std::size_t n = 0;
    for (const auto& raw : detail::lines_of(in)) {
        ++n;
        auto line = detail::trim(raw);
        if (line.empty())
            continue;
        if (line.front() == '#') {
            if (line.find("note:") == std::string_view::npos)
                detail::parse_header(line.substr(1), header);
            continue;
        }
        if (!seen_header) {
            if (line != "alpha,f")
                throw Error(ErrorCode::ParseError, "line " + std::to_string(n) + ": expected header 'alpha,f'");
            seen_header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
            throw Error(ErrorCode::ParseError, "line " + std::to_string(n) + ": expected two columns");
        s.points.push_back({detail::parse_double(line.substr(0, comma), n),
                            detail::parse_double(line.substr(comma + 1), n)});
    }
    if (!seen_header)
        throw Error(ErrorCode::ParseError, "missing 'alpha,f' header");
    if (s.points.empty())
        throw Error(ErrorCode::ParseError, "spectrum has no points");
    for (std::size_t i = 1; i < s.points.size(); ++i)
        if (!(s.points[i].alpha > s.points[i - 1].alpha))
            throw Error(ErrorCode::ParseError, "alpha column must be strictly increasing");

    auto count = [&](const char* key) -> std::size_t {
        auto it = header.find(key);
        if (it == header.end())
            return 0;
        std::size_t v = 0;
        const auto& t = it->second;
        auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
        if (ec != std::errc{} || ptr != t.data() + t.size())
            throw Error(ErrorCode::ParseError, std::string("bad header value for ") + key);
        return v;
    };
    s.params.box_count = count("B");
    s.params.bin_count = count("A");
    s.params.sample_size = count("S");
    if (auto it = header.find("epsilon_alpha"); it != header.end())
        s.params.epsilon_alpha = detail::parse_double(it->second, 0);
    if (auto it = header.find("sizing"); it != header.end() && it->second != "Unchecked") {
        SizingVerdict v;
        if (it->second == "Ok")
            v.status = SizingStatus::Ok;
        else if (it->second == "Warning")
            v.status = SizingStatus::Warning;
        else if (it->second == "Violation")
            v.status = SizingStatus::Violation;
        else
            throw Error(ErrorCode::ParseError, "unknown sizing status '" + it->second + "'");
        s.params.sizing = v;
    }
    return s;
}

inline Spectrum parse_spectrum(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_spectrum(in);
}

inline CantorDust parse_dust(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_dust(in);
}

inline EventSignal parse_signal(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_signal(in);
}

} // namespace mfk::io
