#pragma once

#include "triage/enrich.hpp"
#include "triage/features.hpp"
#include "triage/ingest.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace triage {

/// Directory of bundled data files: $TRIAGE_DATA_DIR if set, else the
/// source-tree data/ directory recorded at build time.
std::filesystem::path default_data_dir();

/// Build version stamped into archive entries.
std::string_view pipeline_version();

struct ResourcePaths {
    std::filesystem::path data_dir = default_data_dir();
    std::optional<std::filesystem::path> asn_table;  // unset: no ASN enrichment
    std::optional<std::filesystem::path> geo_table;  // unset: no geolocation
    std::optional<std::filesystem::path> whois_aliases;
};

/// Everything feature extraction needs, loaded once and shared read-only.
struct Resources {
    SuffixList suffixes;
    KeywordList news_keywords;
    KeywordList proxy_keywords;
    std::vector<std::string> novelty_tlds;
    AsnTable asn;
    GeoTable geo;
    WhoisAliases whois_aliases = WhoisAliases::defaults();

    /// Throws Error(io) or Error(validation) when a file is unusable.
    static Resources load(const ResourcePaths& paths);

    ExtractContext context() const;
};

}  // namespace triage
