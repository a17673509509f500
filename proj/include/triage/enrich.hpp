#pragma once

#include "triage/ip.hpp"
#include "triage/probe.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace triage {

struct AsnInfo {
    std::uint32_t number = 0;
    std::string name;

    /// Category token used by the feature layer, e.g. "AS64500".
    std::string token() const { return "AS" + std::to_string(number); }
    bool operator==(const AsnInfo&) const = default;
};

struct AsnEntry {
    IpPrefix prefix;
    AsnInfo as;
};

/// Prefix-to-origin-AS snapshot with longest-prefix-match lookup.
/// Immutable after construction and safe to share across threads.
class AsnTable {
public:
    AsnTable() = default;
    /// Throws Error(validation) on a duplicate prefix.
    explicit AsnTable(std::vector<AsnEntry> entries);

    /// Lines `prefix<TAB>asn<TAB>name`; `#` comments and blank lines ignored.
    static AsnTable load(const std::filesystem::path& path);

    std::optional<AsnInfo> lookup(const IpAddress& ip) const;
    const std::vector<AsnEntry>& entries() const { return entries_; }

private:
    std::vector<AsnEntry> entries_;
    // One map per (family, prefix length): masked network -> entry index.
    std::unordered_map<IpAddress, std::size_t, IpAddressHash> by_length_[2][129];
    std::vector<unsigned> lengths_[2];  // populated lengths, longest first
};

std::optional<AsnInfo> asn_lookup(const IpAddress& ip, const AsnTable& table);

struct GeoRange {
    IpAddress start;
    IpAddress end;  // inclusive
    std::string country;
};

/// Inclusive IP ranges mapped to ISO 3166 alpha-2 codes.
class GeoTable {
public:
    GeoTable() = default;
    /// Sorts the ranges; throws Error(validation) on overlap, mixed-family
    /// ranges, start > end or a country code that is not two letters.
    explicit GeoTable(std::vector<GeoRange> ranges);

    /// CSV lines `start_ip,end_ip,country`; a header line is allowed.
    static GeoTable load(const std::filesystem::path& path);

    std::optional<std::string> lookup(const IpAddress& ip) const;
    const std::vector<GeoRange>& ranges() const { return ranges_; }

private:
    std::vector<GeoRange> ranges_;
};

std::optional<std::string> geo_lookup(const IpAddress& ip, const GeoTable& table);

struct CmsInfo {
    bool wordpress = false;
    std::set<std::string> plugins;
    std::optional<std::string> theme;

    bool operator==(const CmsInfo&) const = default;
};

/// WordPress fingerprint from asset paths, generator declarations and
/// WordPress-specific response headers. Whitespace runs in the body are
/// collapsed before matching.
CmsInfo fingerprint_cms(std::string_view body, const std::vector<Header>& headers);

}  // namespace triage
