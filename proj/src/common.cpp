#include "triage/error.hpp"
#include "triage/labels.hpp"
#include "triage/time.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

namespace triage {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::not_registrable: return "not-registrable";
    case ErrorKind::empty_node: return "empty-node";
    case ErrorKind::shape: return "shape";
    case ErrorKind::unstratifiable: return "unstratifiable";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::io: return "io";
    case ErrorKind::empty_class: return "empty-class";
    case ErrorKind::incompatible_model: return "incompatible-model";
    case ErrorKind::not_found: return "not-found";
    case ErrorKind::conflict: return "conflict";
    case ErrorKind::validation: return "validation";
    case ErrorKind::startup: return "startup";
    case ErrorKind::invalid_argument: return "invalid-argument";
    }
    return "unknown";
}

std::string_view to_string(Label l) {
    switch (l) {
    case Label::disinformation: return "disinformation";
    case Label::news: return "news";
    case Label::other: return "other";
    }
    return "other";
}

std::optional<Label> parse_label(std::string_view text) {
    for (Label l : kClassOrder) {
        if (to_string(l) == text) return l;
    }
    return std::nullopt;
}

Label argmax(const ClassProbabilities& p) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p[i] > p[best]) best = i;
    }
    return kClassOrder[best];
}

namespace {

bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    }
    auto r = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return r.ec == std::errc{};
}

}  // namespace

std::optional<Timestamp> parse_iso8601(std::string_view text) {
    using namespace std::chrono;
    int y = 0, mo = 0, d = 0;
    if (!read_int(text, 0, 4, y) || text.size() < 10 || text[4] != '-' || !read_int(text, 5, 2, mo) ||
        text[7] != '-' || !read_int(text, 8, 2, d)) {
        return std::nullopt;
    }
    year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    Timestamp ts = sys_days{ymd};
    if (text.size() == 10) return ts;

    if (text[10] != 'T' && text[10] != 't' && text[10] != ' ') return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (!read_int(text, 11, 2, hh) || text.size() < 16 || text[13] != ':' || !read_int(text, 14, 2, mm)) {
        return std::nullopt;
    }
    std::size_t pos = 16;
    if (pos < text.size() && text[pos] == ':') {
        if (!read_int(text, 17, 2, ss)) return std::nullopt;
        pos = 19;
    }
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    }
    seconds offset{0};
    if (pos < text.size()) {
        char c = text[pos];
        if ((c == 'Z' || c == 'z') && pos + 1 == text.size()) {
            pos = text.size();
        } else if (c == '+' || c == '-') {
            int oh = 0, om = 0;
            if (!read_int(text, pos + 1, 2, oh)) return std::nullopt;
            std::size_t mpos = pos + 3;
            if (mpos < text.size() && text[mpos] == ':') ++mpos;
            if (mpos < text.size() && !read_int(text, mpos, 2, om)) return std::nullopt;
            if (mpos < text.size()) mpos += 2;
            if (mpos != text.size()) return std::nullopt;
            offset = hours{oh} + minutes{om};
            if (c == '-') offset = -offset;
            pos = text.size();
        } else {
            return std::nullopt;
        }
    }
    return ts + hours{hh} + minutes{mm} + seconds{ss} - offset;
}

std::string format_iso8601(Timestamp ts) {
    using namespace std::chrono;
    const auto day_point = floor<days>(ts);
    const year_month_day ymd{day_point};
    const hh_mm_ss hms{ts - day_point};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long>(hms.seconds().count()));
    return buf;
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::int64_t floor_days(Timestamp from, Timestamp to) {
    return std::chrono::floor<std::chrono::days>(to - from).count();
}

Timestamp now_utc() {
    return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

}  // namespace triage
