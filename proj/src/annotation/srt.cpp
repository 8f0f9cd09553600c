#include "signcrowd/annotation/srt.hpp"

#include <cctype>
#include <cstdio>

namespace signcrowd {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        pos = nl + 1;
    }
    return lines;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

[[noreturn]] void syntax_error(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::SrtSyntax, "line " + std::to_string(line) + ": " + what);
}

// HH:MM:SS,mmm (hours may have more than two digits).
std::optional<Millis> parse_timestamp(std::string_view s) {
    const auto c1 = s.find(':');
    if (c1 == std::string_view::npos || c1 < 1) return std::nullopt;
    const auto rest = s.substr(c1 + 1);
    if (rest.size() != 9 || rest[2] != ':' || rest[5] != ',') return std::nullopt;
    const auto hh = s.substr(0, c1);
    const auto mm = rest.substr(0, 2);
    const auto ss = rest.substr(3, 2);
    const auto ms = rest.substr(6, 3);
    if (!all_digits(hh) || !all_digits(mm) || !all_digits(ss) || !all_digits(ms)) return std::nullopt;
    const auto minutes = std::stoll(std::string(mm));
    const auto seconds = std::stoll(std::string(ss));
    if (minutes > 59 || seconds > 59) return std::nullopt;
    return ((std::stoll(std::string(hh)) * 60 + minutes) * 60 + seconds) * 1000 +
           std::stoll(std::string(ms));
}

}  // namespace

std::string format_srt_timestamp(Millis ms) {
    if (ms < 0) throw Error(ErrorCode::InvalidTrack, "negative subtitle time");
    char buf[48];
    std::snprintf(buf, sizeof buf, "%02lld:%02lld:%02lld,%03lld", static_cast<long long>(ms / 3'600'000),
                  static_cast<long long>(ms / 60'000 % 60), static_cast<long long>(ms / 1000 % 60),
                  static_cast<long long>(ms % 1000));
    return buf;
}

std::string render_srt(const AnnotationTrack& track, const TrimWindow& trim) {
    if (track.segments.empty()) throw Error(ErrorCode::InvalidTrack, "track has no segments");
    if (auto issues = check_track_structure(track.segments, trim); !issues.empty()) {
        auto detail = issues.front().detail;
        throw Error(ErrorCode::InvalidTrack, std::move(detail), std::move(issues));
    }
    std::string out;
    std::size_t index = 1;
    for (const auto& s : track.segments) {
        out += std::to_string(index++);
        out += '\n';
        out += format_srt_timestamp(s.start_ms - trim.start_ms);
        out += " --> ";
        out += format_srt_timestamp(s.end_ms - trim.start_ms);
        out += '\n';
        out += s.text;
        out += "\n\n";
    }
    return out;
}

std::vector<Segment> parse_srt(std::string_view text, Millis offset_ms) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    const auto lines = split_lines(text);
    std::vector<Segment> segments;
    std::size_t i = 0;
    while (i < lines.size()) {
        if (lines[i].empty()) {
            ++i;
            continue;
        }
        if (!all_digits(lines[i])) syntax_error(i + 1, "expected cue index");
        if (++i >= lines.size()) syntax_error(i, "cue index without timing line");

        const auto timing = lines[i];
        const auto arrow = timing.find(" --> ");
        if (arrow == std::string_view::npos) syntax_error(i + 1, "missing '-->'");
        const auto start = parse_timestamp(timing.substr(0, arrow));
        const auto end = parse_timestamp(timing.substr(arrow + 5));
        if (!start || !end) syntax_error(i + 1, "malformed timestamp");
        ++i;

        std::string body;
        while (i < lines.size() && !lines[i].empty()) {
            if (!body.empty()) body += '\n';
            body += lines[i];
            ++i;
        }
        if (body.empty()) syntax_error(i, "cue without text");
        segments.push_back({*start + offset_ms, *end + offset_ms, std::move(body)});
    }
    return segments;
}

}  // namespace signcrowd
