#include "triage/enrich.hpp"

#include "triage/error.hpp"
#include "triage/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

namespace triage {

// ---------------------------------------------------------------------------
// ASN

AsnTable::AsnTable(std::vector<AsnEntry> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& prefix = entries_[i].prefix;
        const int fam = prefix.network.is_v4() ? 0 : 1;
        auto [it, inserted] = by_length_[fam][prefix.length].emplace(prefix.network, i);
        if (!inserted) throw Error(ErrorKind::validation, "duplicate prefix " + prefix.to_string());
    }
    for (int fam = 0; fam < 2; ++fam) {
        for (int len = 128; len >= 0; --len) {
            if (!by_length_[fam][len].empty()) lengths_[fam].push_back(static_cast<unsigned>(len));
        }
    }
}

AsnTable AsnTable::load(const std::filesystem::path& path) {
    std::vector<AsnEntry> entries;
    std::size_t line_no = 0;
    for (const auto& line : read_list_file(path)) {
        ++line_no;
        const auto fields = split(line, '\t');
        if (fields.size() < 2) throw Error(ErrorKind::validation, path.string() + ": malformed line " + line);
        auto prefix = IpPrefix::parse(trim(fields[0]));
        std::string_view asn = trim(fields[1]);
        if (asn.starts_with("AS") || asn.starts_with("as")) asn.remove_prefix(2);
        std::uint32_t number = 0;
        const auto r = std::from_chars(asn.data(), asn.data() + asn.size(), number);
        if (!prefix || r.ec != std::errc{} || r.ptr != asn.data() + asn.size()) {
            throw Error(ErrorKind::validation, path.string() + ": malformed line " + line);
        }
        entries.push_back({*prefix, {number, fields.size() > 2 ? std::string(trim(fields[2])) : std::string{}}});
    }
    return AsnTable(std::move(entries));
}

std::optional<AsnInfo> AsnTable::lookup(const IpAddress& ip) const {
    const int fam = ip.is_v4() ? 0 : 1;
    for (unsigned len : lengths_[fam]) {
        const auto& bucket = by_length_[fam][len];
        if (auto it = bucket.find(ip.masked(len)); it != bucket.end()) return entries_[it->second].as;
    }
    return std::nullopt;
}

std::optional<AsnInfo> asn_lookup(const IpAddress& ip, const AsnTable& table) { return table.lookup(ip); }

// ---------------------------------------------------------------------------
// Geo

GeoTable::GeoTable(std::vector<GeoRange> ranges) : ranges_(std::move(ranges)) {
    for (auto& r : ranges_) {
        if (r.start.family() != r.end.family() || r.end < r.start) {
            throw Error(ErrorKind::validation, "invalid range " + r.start.to_string() + "-" + r.end.to_string());
        }
        if (r.country.size() != 2 || !std::isalpha(static_cast<unsigned char>(r.country[0])) ||
            !std::isalpha(static_cast<unsigned char>(r.country[1]))) {
            throw Error(ErrorKind::validation, "invalid country code '" + r.country + "'");
        }
        std::transform(r.country.begin(), r.country.end(), r.country.begin(), ::toupper);
    }
    std::sort(ranges_.begin(), ranges_.end(), [](const GeoRange& a, const GeoRange& b) { return a.start < b.start; });
    for (std::size_t i = 1; i < ranges_.size(); ++i) {
        if (ranges_[i].start.family() == ranges_[i - 1].end.family() && !(ranges_[i - 1].end < ranges_[i].start)) {
            throw Error(ErrorKind::validation, "overlapping ranges at " + ranges_[i].start.to_string());
        }
    }
}

GeoTable GeoTable::load(const std::filesystem::path& path) {
    std::vector<GeoRange> ranges;
    for (const auto& line : read_list_file(path)) {
        const auto fields = split(line, ',');
        if (fields.size() != 3) throw Error(ErrorKind::validation, path.string() + ": malformed line " + line);
        auto start = IpAddress::parse(trim(fields[0]));
        auto end = IpAddress::parse(trim(fields[1]));
        if (!start || !end) {
            if (ranges.empty() && trim(fields[0]) == "start_ip") continue;
            throw Error(ErrorKind::validation, path.string() + ": malformed line " + line);
        }
        ranges.push_back({*start, *end, std::string(trim(fields[2]))});
    }
    return GeoTable(std::move(ranges));
}

std::optional<std::string> GeoTable::lookup(const IpAddress& ip) const {
    auto it = std::upper_bound(ranges_.begin(), ranges_.end(), ip,
                               [](const IpAddress& v, const GeoRange& r) { return v < r.start; });
    if (it == ranges_.begin()) return std::nullopt;
    --it;
    if (it->start.family() != ip.family() || it->end < ip) return std::nullopt;
    return it->country;
}

std::optional<std::string> geo_lookup(const IpAddress& ip, const GeoTable& table) { return table.lookup(ip); }

// ---------------------------------------------------------------------------
// CMS

namespace {

std::string collapse_whitespace(std::string_view body) {
    std::string out;
    out.reserve(body.size());
    bool in_space = false;
    for (char c : body) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(c);
    }
    return out;
}

bool slug_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
}

/// Slugs following each occurrence of `marker` and terminated by '/'.
std::vector<std::string> slugs_after(const std::string& original, const std::string& lowered, std::string_view marker) {
    std::vector<std::string> out;
    for (auto pos = lowered.find(marker); pos != std::string::npos; pos = lowered.find(marker, pos + 1)) {
        std::size_t i = pos + marker.size();
        const std::size_t start = i;
        while (i < original.size() && slug_char(original[i])) ++i;
        if (i > start && i < original.size() && original[i] == '/') out.push_back(original.substr(start, i - start));
    }
    return out;
}

bool generator_says_wordpress(const std::string& lowered) {
    for (auto pos = lowered.find("<meta"); pos != std::string::npos; pos = lowered.find("<meta", pos + 1)) {
        const auto close = lowered.find('>', pos);
        const std::string_view tag =
            std::string_view(lowered).substr(pos, close == std::string::npos ? std::string::npos : close - pos);
        if (tag.find("generator") != std::string_view::npos && tag.find("wordpress") != std::string_view::npos) {
            return true;
        }
    }
    return false;
}

}  // namespace

CmsInfo fingerprint_cms(std::string_view body, const std::vector<Header>& headers) {
    CmsInfo info;
    const std::string normalized = collapse_whitespace(body);
    const std::string lowered = to_lower(normalized);

    bool wordpress = lowered.find("wp-content/") != std::string::npos ||
                     lowered.find("wp-includes/") != std::string::npos || generator_says_wordpress(lowered);
    for (const auto& [name, value] : headers) {
        const std::string key = to_lower(name);
        if ((key == "link" && icontains(value, "api.w.org")) || (key == "x-generator" && icontains(value, "wordpress")) ||
            (key == "x-powered-by" && icontains(value, "wordpress"))) {
            wordpress = true;
        }
    }
    if (!wordpress) return info;

    info.wordpress = true;
    for (auto& slug : slugs_after(normalized, lowered, "wp-content/plugins/")) info.plugins.insert(std::move(slug));
    const auto themes = slugs_after(normalized, lowered, "wp-content/themes/");
    if (!themes.empty()) info.theme = *std::min_element(themes.begin(), themes.end());
    return info;
}

}  // namespace triage
