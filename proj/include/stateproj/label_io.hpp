#pragma once

// Label files.
//
// Jump-list form:
//
//     # format: jumps
//     # horizon: 60
//     # states: 3
//     # initial: 1
//     time,state
//     5.000000000,2
//     15.000000000,3
//
// Sampled form, one state per sample, sample i covering [i/f, (i+1)/f):
//
//     # format: sampled
//     # frequency: 500
//     # states: 3
//     state
//     1
//     1
//     2
//
// Header rows start with '#'. Times are written with 9 decimals. States are
// 1-based.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stateproj/core.hpp"

namespace stateproj {

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LabelFile {
    LabelTrack track;
    int state_count = 2;
    std::optional<double> frequency;  // set for sampled input
    std::size_t samples = 0;          // sampled input only
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline double parse_double(const std::string& text, std::size_t line) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ParseError("line " + std::to_string(line) + ": bad number '" + t + "'");
    }
    return v;
}

inline int parse_int(const std::string& text, std::size_t line) {
    const std::string t = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw ParseError("line " + std::to_string(line) + ": bad integer '" + t + "'");
    }
    return v;
}

inline std::vector<std::string> split_fields(const std::string& row) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : row) {
        if (c == ',' || c == ';' || c == '\t' || c == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

inline bool is_numeric_row(const std::vector<std::string>& fields) {
    for (const auto& f : fields) {
        if (f.empty()) return false;
        const char c = f.front();
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.')) {
            return false;
        }
    }
    return !fields.empty();
}

}  // namespace detail

inline LabelFile read_label_file(std::istream& in) {
    std::map<std::string, std::string> header;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool seen_data = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = detail::trim(line);
        if (t.empty()) {
            continue;
        }
        if (t.front() == '#') {
            const std::string body = detail::trim(t.substr(1));
            const auto colon = body.find(':');
            if (colon != std::string::npos) {
                std::string key = detail::trim(body.substr(0, colon));
                for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
                header[key] = detail::trim(body.substr(colon + 1));
            }
            continue;
        }
        auto fields = detail::split_fields(t);
        if (!seen_data && !detail::is_numeric_row(fields)) {
            seen_data = true;  // column header
            continue;
        }
        seen_data = true;
        rows.emplace_back(line_no, std::move(fields));
    }

    std::string format;
    if (auto it = header.find("format"); it != header.end()) {
        format = it->second;
    } else {
        format = header.count("frequency") ? "sampled" : "jumps";
    }

    std::optional<int> states;
    if (auto it = header.find("states"); it != header.end()) {
        states = detail::parse_int(it->second, 0);
        if (*states < 2) {
            throw ParseError("state count must be at least 2");
        }
    }
    auto check_state = [&](int s, std::size_t ln) {
        if (s < 1 || (states && s > *states)) {
            throw ParseError("line " + std::to_string(ln) + ": state " + std::to_string(s) + " out of range");
        }
    };

    if (format == "sampled") {
        auto it = header.find("frequency");
        if (it == header.end()) {
            throw ParseError("sampled file needs a frequency header");
        }
        const double freq = detail::parse_double(it->second, 0);
        if (!(freq > 0.0)) {
            throw ParseError("sampling frequency must be positive");
        }
        if (rows.empty()) {
            throw ParseError("sampled file has no samples");
        }
        std::vector<int> samples;
        samples.reserve(rows.size());
        int top = 0;
        for (const auto& [ln, fields] : rows) {
            if (fields.size() != 1) {
                throw ParseError("line " + std::to_string(ln) + ": expected one state per sample");
            }
            const int s = detail::parse_int(fields[0], ln);
            check_state(s, ln);
            top = std::max(top, s);
            samples.push_back(s);
        }
        std::vector<Jump> jumps;
        for (std::size_t i = 1; i < samples.size(); ++i) {
            if (samples[i] != samples[i - 1]) {
                jumps.push_back({static_cast<double>(i) / freq, samples[i]});
            }
        }
        const double horizon = static_cast<double>(samples.size()) / freq;
        LabelFile out{LabelTrack(horizon, StateSequence(samples.front(), std::move(jumps))),
                      states.value_or(std::max(2, top)), freq, samples.size()};
        return out;
    }
    if (format != "jumps") {
        throw ParseError("unknown label format '" + format + "'");
    }

    for (const char* key : {"horizon", "states", "initial"}) {
        if (!header.count(key)) {
            throw ParseError(std::string("jump-list file needs a '") + key + "' header");
        }
    }
    const double horizon = detail::parse_double(header["horizon"], 0);
    if (!(horizon > 0.0)) {
        throw ParseError("horizon must be positive");
    }
    const int initial = detail::parse_int(header["initial"], 0);
    check_state(initial, 0);
    std::vector<Jump> jumps;
    for (const auto& [ln, fields] : rows) {
        if (fields.size() != 2) {
            throw ParseError("line " + std::to_string(ln) + ": expected 'time,state'");
        }
        const double t = detail::parse_double(fields[0], ln);
        const int s = detail::parse_int(fields[1], ln);
        check_state(s, ln);
        if (t < 0.0 || t >= horizon) {
            throw ParseError("line " + std::to_string(ln) + ": time outside [0, horizon)");
        }
        if (!jumps.empty() && t < jumps.back().time) {
            throw ParseError("line " + std::to_string(ln) + ": times are not sorted");
        }
        jumps.push_back({t, s});
    }
    try {
        return LabelFile{LabelTrack::from_jumps(horizon, initial, std::move(jumps)), *states, std::nullopt, 0};
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
}

inline LabelFile load_label_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open " + path);
    }
    return read_label_file(in);
}

inline std::string format_time(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", t);
    return buf;
}

inline void write_label_file(std::ostream& out, const LabelTrack& track, int state_count) {
    out << "# format: jumps\n";
    out << "# horizon: " << format_time(track.horizon()) << '\n';
    out << "# states: " << state_count << '\n';
    out << "# initial: " << track.sequence().initial_state() << '\n';
    out << "time,state\n";
    for (const Jump& j : track.sequence().jumps()) {
        out << format_time(j.time) << ',' << j.state << '\n';
    }
}

inline void save_label_file(const std::string& path, const LabelTrack& track, int state_count) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    write_label_file(out, track, state_count);
}

}  // namespace stateproj
