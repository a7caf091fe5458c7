#pragma once

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "reflex/common.hpp"
#include "reflex/knowledge/store.hpp"

namespace reflex::knowledge {

// One tuple per line, tab-separated:
//   polarity  author  origin  C  X  V  place  event_time  recording_time  term...
// polarity is '+' or '-'; absent optionals are written as '-'; times are
// scale|start|duration|kind with exact rationals. Backslash escapes \\ \t \n \r
// protect text fields, and a literal '-' is written as "\-".
namespace tuple_io_detail {

inline std::string escape(const std::string& s) {
    if (s == "-") return "\\-";
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '|': out += "\\p"; break;
            default: out += ch;
        }
    }
    return out;
}

inline std::string unescape(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out += s[i];
            continue;
        }
        if (++i >= s.size()) throw ConfigError("dangling escape in tuple field");
        switch (s[i]) {
            case '\\': out += '\\'; break;
            case 't': out += '\t'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            case 'p': out += '|'; break;
            case '-': out += '-'; break;
            default: throw ConfigError(std::string("unknown escape \\") + s[i]);
        }
    }
    return out;
}

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("bad number '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("bad number '" + s + "'");
    return v;
}

inline std::string format_time(const std::optional<memory::TimeInterval>& t) {
    if (!t) return "-";
    return escape(t->scale) + "|" + t->start.str() + "|" + t->duration.str() + "|" +
           (t->kind == memory::TimeKind::EventTime ? "event" : "recording");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t pos; (pos = s.find(sep, start)) != std::string::npos; start = pos + 1)
        parts.push_back(s.substr(start, pos - start));
    parts.push_back(s.substr(start));
    return parts;
}

inline std::optional<memory::TimeInterval> parse_time(const std::string& f) {
    if (f == "-") return std::nullopt;
    auto parts = split(f, '|');
    if (parts.size() != 4) throw ConfigError("time field needs scale|start|duration|kind");
    memory::TimeInterval t;
    t.scale = unescape(parts[0]);
    try {
        t.start = memory::Rational(parts[1]);
        t.duration = memory::Rational(parts[2]);
    } catch (const std::exception&) {
        throw ConfigError("bad rational in time field '" + f + "'");
    }
    if (parts[3] == "event")
        t.kind = memory::TimeKind::EventTime;
    else if (parts[3] == "recording")
        t.kind = memory::TimeKind::RecordingTime;
    else
        throw ConfigError("bad time kind '" + parts[3] + "'");
    return t;
}

inline const char* origin_name(Origin o) {
    switch (o) {
        case Origin::Perceived: return "perceived";
        case Origin::Produced: return "produced";
        case Origin::Deliberated: return "deliberated";
    }
    return "?";
}

}  // namespace tuple_io_detail

inline std::string format_tuple(const SentenceTuple& t) {
    using namespace tuple_io_detail;
    std::string line = t.polarity == Polarity::Asserted ? "+" : "-";
    line += '\t' + escape(t.author);
    line += '\t' + std::string(origin_name(t.origin));
    line += '\t' + format_double(t.confidence.C);
    line += '\t' + format_double(t.confidence.X);
    line += '\t' + format_double(t.confidence.V);
    line += '\t' + (t.place ? escape(*t.place) : std::string("-"));
    line += '\t' + format_time(t.event_time);
    line += '\t' + format_time(t.recording_time);
    for (const auto& term : t.terms) line += '\t' + escape(term);
    return line;
}

inline SentenceTuple parse_tuple(const std::string& line) {
    using namespace tuple_io_detail;
    auto f = split(line, '\t');
    if (f.size() < 10) throw ConfigError("tuple line needs at least 10 fields");
    SentenceTuple t;
    if (f[0] == "+")
        t.polarity = Polarity::Asserted;
    else if (f[0] == "-")
        t.polarity = Polarity::Negated;
    else
        throw ConfigError("bad polarity '" + f[0] + "'");
    t.author = unescape(f[1]);
    if (f[2] == "perceived")
        t.origin = Origin::Perceived;
    else if (f[2] == "produced")
        t.origin = Origin::Produced;
    else if (f[2] == "deliberated")
        t.origin = Origin::Deliberated;
    else
        throw ConfigError("bad origin '" + f[2] + "'");
    t.confidence = {parse_double(f[3]), parse_double(f[4]), parse_double(f[5])};
    if (!t.confidence.valid()) throw ConfigError("confidence outside [0, 1]");
    if (f[6] != "-") t.place = unescape(f[6]);
    t.event_time = parse_time(f[7]);
    t.recording_time = parse_time(f[8]);
    for (std::size_t i = 9; i < f.size(); ++i) t.terms.push_back(unescape(f[i]));
    return t;
}

inline void export_tuples(std::ostream& os, const std::vector<SentenceTuple>& tuples) {
    for (const auto& t : tuples) os << format_tuple(t) << '\n';
}

inline std::vector<SentenceTuple> import_tuples(std::istream& is) {
    std::vector<SentenceTuple> out;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        out.push_back(parse_tuple(line));
    }
    return out;
}

}  // namespace reflex::knowledge
