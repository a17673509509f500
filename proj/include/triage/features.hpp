#pragma once

#include "triage/enrich.hpp"
#include "triage/ingest.hpp"
#include "triage/probe.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace triage {

enum class FeatureCategory { domain, certificate, hosting };
enum class FeatureType { boolean, numeric, categorical, category_set };

std::string_view to_string(FeatureCategory c);
std::string_view to_string(FeatureType t);

/// The 33 infrastructure features, grouped domain / certificate / hosting,
/// followed by the three section-availability indicators. Indices into
/// FeatureVector and the encoder's source space.
enum class FeatureId : std::uint8_t {
    // domain
    news_keywords_in_domain,
    domain_name_length,
    news_in_domain,
    whois_privacy,
    registrar_name,
    nameserver_sld,
    nameserver_as,
    registrant_org,
    registrant_country,
    time_since_registration,
    domain_lifespan,
    time_to_expiration,
    time_since_update,
    nameserver_country,
    novelty_tld,
    digit_in_domain,
    hyphen_in_domain,
    domain_resolves,
    // certificate
    san_count,
    san_wildcard,
    cert_expired,
    cert_available,
    self_signed,
    domain_validated,
    issuer_name,
    issuer_country,
    cert_lifetime,
    // hosting
    wp_plugins,
    website_as,
    wordpress_cms,
    wp_theme,
    website_country,
    website_available,
    // availability indicators
    whois_data_present,
    cert_data_present,
    hosting_data_present,
};

inline constexpr std::size_t kFeatureCount = 33;
inline constexpr std::size_t kSourceCount = 36;

constexpr std::size_t index_of(FeatureId id) { return static_cast<std::size_t>(id); }

struct FeatureInfo {
    FeatureId id;
    std::string_view key;           // snake_case column name
    std::string_view display_name;  // human-readable name
    FeatureCategory category;
    FeatureType type;
    /// Importance rank reported for the original model (1 = most important);
    /// 0 for availability indicators. Used as the explanation tie-break.
    int rank;
};

/// All 36 source columns in FeatureId order; the first kFeatureCount are the
/// catalog features.
std::span<const FeatureInfo, kSourceCount> source_columns();
std::span<const FeatureInfo, kFeatureCount> feature_catalog();
const FeatureInfo& info(FeatureId id);
std::optional<FeatureId> feature_by_key(std::string_view key);

struct Missing {
    bool operator==(const Missing&) const = default;
};

using FeatureValue = std::variant<Missing, bool, double, std::string, std::vector<std::string>>;

/// One value per source column. Booleans are never Missing; numeric and
/// categorical values may be. Category sets hold sorted distinct tokens.
class FeatureVector {
public:
    FeatureVector();

    const FeatureValue& operator[](FeatureId id) const { return values_[index_of(id)]; }
    const FeatureValue& at(std::size_t source) const { return values_.at(source); }

    void set(FeatureId id, FeatureValue v);
    void set_bool(FeatureId id, bool v) { set(id, v); }
    void set_numeric(FeatureId id, std::optional<double> v);
    void set_category(FeatureId id, std::optional<std::string> v);
    void set_tokens(FeatureId id, std::optional<std::vector<std::string>> v);

    bool boolean(FeatureId id) const;
    std::optional<double> numeric(FeatureId id) const;
    std::optional<std::string> category(FeatureId id) const;
    std::optional<std::vector<std::string>> tokens(FeatureId id) const;
    bool is_missing(FeatureId id) const { return std::holds_alternative<Missing>(values_[index_of(id)]); }

    bool operator==(const FeatureVector&) const = default;

private:
    std::array<FeatureValue, kSourceCount> values_;
};

/// Static inputs of feature extraction. Tables are shared read-only.
struct ExtractContext {
    const SuffixList* suffixes = nullptr;
    const KeywordList* news_keywords = nullptr;
    const KeywordList* proxy_keywords = nullptr;
    std::vector<std::string> novelty_tlds;
    const AsnTable* asn = nullptr;
    const GeoTable* geo = nullptr;
};

/// The six features computed from the domain name alone.
void set_lexical_features(FeatureVector& v, std::string_view registrable, const ExtractContext& ctx);

/// Pure function of its inputs; never fails (absent data becomes Missing).
FeatureVector extract(const ProbeRecord& record, const CmsInfo& cms, const ExtractContext& ctx, Timestamp now);

/// Lexicographically smallest nameserver host and its first address.
std::optional<std::string> primary_nameserver(const DnsObservation& dns);

enum class FeatureSet { domain, domain_cert, all };

std::string_view to_string(FeatureSet s);
std::optional<FeatureSet> parse_feature_set(std::string_view text);

/// Source columns usable by a model restricted to `set`; indexed by source.
std::array<bool, kSourceCount> category_mask(FeatureSet set);

/// Fitted encoding of FeatureVectors into fixed-width numeric rows.
///
/// Column layout per source feature, in FeatureId order:
///   boolean       one column, 0/1
///   numeric       value (Missing -> -1) and a present bit
///   categorical   one-hot over vocabulary, then OTHER, then MISSING
///   category set  multi-hot over vocabulary, then OTHER, then MISSING
class Encoder {
public:
    struct Column {
        std::size_t source;
        std::string name;
    };

    Encoder() = default;

    /// Vocabulary per categorical/set feature: the k most frequent non-missing
    /// values in `train`, ties broken lexicographically.
    static Encoder fit(std::span<const FeatureVector> train, std::size_t k);

    /// Rebuilds an encoder from stored vocabularies (model loading).
    static Encoder from_vocabularies(std::array<std::vector<std::string>, kSourceCount> vocab, std::size_t k);

    std::size_t width() const { return columns_.size(); }
    std::size_t k() const { return k_; }
    const std::vector<Column>& columns() const { return columns_; }
    const std::vector<std::string>& vocabulary(FeatureId id) const { return vocab_[index_of(id)]; }
    const std::array<std::vector<std::string>, kSourceCount>& vocabularies() const { return vocab_; }

    std::vector<double> transform(const FeatureVector& v) const;
    void transform_into(const FeatureVector& v, std::span<double> out) const;

    /// Encoded column indices whose source is allowed by `mask`.
    std::vector<std::size_t> columns_for(const std::array<bool, kSourceCount>& mask) const;

    bool operator==(const Encoder& o) const { return k_ == o.k_ && vocab_ == o.vocab_; }

private:
    void build_columns();

    std::size_t k_ = 0;
    std::array<std::vector<std::string>, kSourceCount> vocab_;
    std::vector<Column> columns_;
    std::array<std::size_t, kSourceCount> offset_{};
};

inline constexpr double kMissingNumeric = -1.0;

}  // namespace triage
