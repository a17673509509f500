#include "triage/features.hpp"

#include "triage/error.hpp"
#include "triage/text.hpp"

#include <algorithm>
#include <map>

namespace triage {

namespace {

using C = FeatureCategory;
using T = FeatureType;
using F = FeatureId;

constexpr std::array<FeatureInfo, kSourceCount> kColumns{{
    {F::news_keywords_in_domain, "news_keywords_in_domain", "News Keyword(s) in Domain", C::domain, T::boolean, 1},
    {F::domain_name_length, "domain_name_length", "Domain Name Length", C::domain, T::numeric, 3},
    {F::news_in_domain, "news_in_domain", "\"News\" in Domain", C::domain, T::boolean, 8},
    {F::whois_privacy, "whois_privacy", "WHOIS Privacy", C::domain, T::boolean, 9},
    {F::registrar_name, "registrar_name", "Registrar Name", C::domain, T::categorical, 11},
    {F::nameserver_sld, "nameserver_sld", "Nameserver SLD", C::domain, T::categorical, 14},
    {F::nameserver_as, "nameserver_as", "Nameserver AS", C::domain, T::categorical, 16},
    {F::registrant_org, "registrant_org", "Registrant Organization", C::domain, T::categorical, 17},
    {F::registrant_country, "registrant_country", "Registrant Country", C::domain, T::categorical, 19},
    {F::time_since_registration, "time_since_registration", "Time Since Domain Registration", C::domain, T::numeric, 21},
    {F::domain_lifespan, "domain_lifespan", "Domain Lifespan", C::domain, T::numeric, 22},
    {F::time_to_expiration, "time_to_expiration", "Time to Domain Expiration", C::domain, T::numeric, 23},
    {F::time_since_update, "time_since_update", "Time Since Domain Update", C::domain, T::numeric, 25},
    {F::nameserver_country, "nameserver_country", "Nameserver Country", C::domain, T::categorical, 27},
    {F::novelty_tld, "novelty_tld", "Novelty TLD", C::domain, T::boolean, 29},
    {F::digit_in_domain, "digit_in_domain", "Digit in Domain", C::domain, T::boolean, 30},
    {F::hyphen_in_domain, "hyphen_in_domain", "Hyphen in Domain", C::domain, T::boolean, 31},
    {F::domain_resolves, "domain_resolves", "Domain Resolves", C::domain, T::boolean, 32},
    {F::san_count, "san_count", "SAN Count", C::certificate, T::numeric, 2},
    {F::san_wildcard, "san_wildcard", "SAN Contains Wildcard", C::certificate, T::boolean, 7},
    {F::cert_expired, "cert_expired", "Expired Certificate", C::certificate, T::boolean, 10},
    {F::cert_available, "cert_available", "Certificate Available", C::certificate, T::boolean, 12},
    {F::self_signed, "self_signed", "Self-signed Certificate", C::certificate, T::boolean, 13},
    {F::domain_validated, "domain_validated", "Domain-validated Certificate", C::certificate, T::boolean, 18},
    {F::issuer_name, "issuer_name", "Certificate Issuer Name", C::certificate, T::categorical, 24},
    {F::issuer_country, "issuer_country", "Certificate Issuer Country", C::certificate, T::categorical, 26},
    {F::cert_lifetime, "cert_lifetime", "Certificate Lifetime", C::certificate, T::numeric, 28},
    {F::wp_plugins, "wp_plugins", "WordPress Plugins", C::hosting, T::category_set, 4},
    {F::website_as, "website_as", "Website AS", C::hosting, T::categorical, 5},
    {F::wordpress_cms, "wordpress_cms", "WordPress CMS", C::hosting, T::boolean, 6},
    {F::wp_theme, "wp_theme", "WordPress Theme", C::hosting, T::categorical, 15},
    {F::website_country, "website_country", "Website Country", C::hosting, T::categorical, 20},
    {F::website_available, "website_available", "Website Available", C::hosting, T::boolean, 33},
    {F::whois_data_present, "whois_data_present", "WHOIS Data Present", C::domain, T::boolean, 0},
    {F::cert_data_present, "cert_data_present", "Certificate Data Present", C::certificate, T::boolean, 0},
    {F::hosting_data_present, "hosting_data_present", "Hosting Data Present", C::hosting, T::boolean, 0},
}};

constexpr bool columns_in_id_order() {
    for (std::size_t i = 0; i < kColumns.size(); ++i) {
        if (index_of(kColumns[i].id) != i) return false;
    }
    return true;
}
static_assert(columns_in_id_order());

FeatureValue default_value(FeatureType t) {
    if (t == FeatureType::boolean) return false;
    return Missing{};
}

}  // namespace

std::string_view to_string(FeatureCategory c) {
    switch (c) {
    case C::domain: return "domain";
    case C::certificate: return "certificate";
    case C::hosting: return "hosting";
    }
    return "domain";
}

std::string_view to_string(FeatureType t) {
    switch (t) {
    case T::boolean: return "boolean";
    case T::numeric: return "numeric";
    case T::categorical: return "categorical";
    case T::category_set: return "category_set";
    }
    return "boolean";
}

std::span<const FeatureInfo, kSourceCount> source_columns() { return kColumns; }

std::span<const FeatureInfo, kFeatureCount> feature_catalog() {
    return std::span<const FeatureInfo, kFeatureCount>(kColumns.data(), kFeatureCount);
}

const FeatureInfo& info(FeatureId id) { return kColumns[index_of(id)]; }

std::optional<FeatureId> feature_by_key(std::string_view key) {
    for (const auto& c : kColumns) {
        if (c.key == key) return c.id;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// FeatureVector

FeatureVector::FeatureVector() {
    for (std::size_t i = 0; i < kSourceCount; ++i) values_[i] = default_value(kColumns[i].type);
}

void FeatureVector::set(FeatureId id, FeatureValue v) {
    const auto type = info(id).type;
    const bool ok = std::visit(
        [&](const auto& x) {
            using V = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<V, Missing>) return type != T::boolean;
            else if constexpr (std::is_same_v<V, bool>) return type == T::boolean;
            else if constexpr (std::is_same_v<V, double>) return type == T::numeric;
            else if constexpr (std::is_same_v<V, std::string>) return type == T::categorical;
            else return type == T::category_set;
        },
        v);
    if (!ok) throw Error(ErrorKind::invalid_argument, "value type mismatch for feature " + std::string(info(id).key));
    if (auto* tokens = std::get_if<std::vector<std::string>>(&v)) {
        std::sort(tokens->begin(), tokens->end());
        tokens->erase(std::unique(tokens->begin(), tokens->end()), tokens->end());
    }
    values_[index_of(id)] = std::move(v);
}

void FeatureVector::set_numeric(FeatureId id, std::optional<double> v) {
    set(id, v ? FeatureValue{*v} : FeatureValue{Missing{}});
}

void FeatureVector::set_category(FeatureId id, std::optional<std::string> v) {
    set(id, v ? FeatureValue{std::move(*v)} : FeatureValue{Missing{}});
}

void FeatureVector::set_tokens(FeatureId id, std::optional<std::vector<std::string>> v) {
    set(id, v ? FeatureValue{std::move(*v)} : FeatureValue{Missing{}});
}

bool FeatureVector::boolean(FeatureId id) const {
    const auto* b = std::get_if<bool>(&values_[index_of(id)]);
    return b && *b;
}

std::optional<double> FeatureVector::numeric(FeatureId id) const {
    if (const auto* d = std::get_if<double>(&values_[index_of(id)])) return *d;
    return std::nullopt;
}

std::optional<std::string> FeatureVector::category(FeatureId id) const {
    if (const auto* s = std::get_if<std::string>(&values_[index_of(id)])) return *s;
    return std::nullopt;
}

std::optional<std::vector<std::string>> FeatureVector::tokens(FeatureId id) const {
    if (const auto* s = std::get_if<std::vector<std::string>>(&values_[index_of(id)])) return *s;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Extraction

std::optional<std::string> primary_nameserver(const DnsObservation& dns) {
    if (dns.nameserver_hosts.empty()) return std::nullopt;
    std::string best = to_lower(dns.nameserver_hosts.front());
    for (const auto& h : dns.nameserver_hosts) best = std::min(best, to_lower(h));
    if (!best.empty() && best.back() == '.') best.pop_back();
    return best;
}

namespace {

std::optional<double> nonneg_days(std::optional<Timestamp> from, std::optional<Timestamp> to) {
    if (!from || !to) return std::nullopt;
    return static_cast<double>(std::max<std::int64_t>(0, floor_days(*from, *to)));
}

std::optional<Timestamp> as_ts(const std::optional<Date>& d) {
    if (!d) return std::nullopt;
    return Timestamp{*d};
}

std::optional<std::string> non_empty(const std::optional<std::string>& s) {
    if (!s) return std::nullopt;
    auto t = trim(*s);
    if (t.empty()) return std::nullopt;
    return std::string(t);
}

}  // namespace

void set_lexical_features(FeatureVector& v, std::string_view registrable, const ExtractContext& ctx) {
    const std::string domain = to_lower(registrable);
    const std::string name = ctx.suffixes ? domain_without_suffix(domain, *ctx.suffixes) : domain;
    v.set_bool(F::news_keywords_in_domain, ctx.news_keywords && ctx.news_keywords->matches_any(name));
    v.set_numeric(F::domain_name_length, static_cast<double>(domain.size()));
    v.set_bool(F::news_in_domain, name.find("news") != std::string::npos);
    const auto dot = domain.rfind('.');
    const auto tld = dot == std::string::npos ? domain : domain.substr(dot + 1);
    v.set_bool(F::novelty_tld, std::find(ctx.novelty_tlds.begin(), ctx.novelty_tlds.end(), tld) != ctx.novelty_tlds.end());
    v.set_bool(F::digit_in_domain, std::any_of(domain.begin(), domain.end(), [](char c) { return c >= '0' && c <= '9'; }));
    v.set_bool(F::hyphen_in_domain, domain.find('-') != std::string::npos);
}

FeatureVector extract(const ProbeRecord& record, const CmsInfo& cms, const ExtractContext& ctx, Timestamp now) {
    FeatureVector v;
    const std::optional<Timestamp> now_ts = now;
    set_lexical_features(v, record.domain, ctx);

    // DNS
    v.set_bool(F::domain_resolves, record.dns.resolves);
    if (const auto ns = primary_nameserver(record.dns)) {
        std::string sld = *ns;
        if (ctx.suffixes) {
            try {
                sld = registrable_domain(*ns, *ctx.suffixes);
            } catch (const Error&) {
            }
        }
        v.set_category(F::nameserver_sld, sld);
        for (const auto& [host, ip] : record.dns.nameserver_addresses) {
            if (to_lower(host) != *ns && to_lower(host) != *ns + ".") continue;
            if (ctx.asn) {
                if (auto as = ctx.asn->lookup(ip)) v.set_category(F::nameserver_as, as->token());
            }
            if (ctx.geo) v.set_category(F::nameserver_country, ctx.geo->lookup(ip));
            break;
        }
    }

    // WHOIS
    const auto& w = record.whois;
    v.set_bool(F::whois_data_present, w.available);
    if (w.available) {
        v.set_category(F::registrar_name, non_empty(w.registrar));
        v.set_category(F::registrant_org, non_empty(w.registrant_org));
        v.set_category(F::registrant_country, non_empty(w.registrant_country));
        v.set_bool(F::whois_privacy, w.registrant_org && ctx.proxy_keywords && ctx.proxy_keywords->matches_any(*w.registrant_org));
        v.set_numeric(F::time_since_registration, nonneg_days(as_ts(w.created), now_ts));
        v.set_numeric(F::domain_lifespan, nonneg_days(as_ts(w.created), as_ts(w.expires)));
        v.set_numeric(F::time_to_expiration, nonneg_days(now_ts, as_ts(w.expires)));
        v.set_numeric(F::time_since_update, nonneg_days(as_ts(w.updated), now_ts));
    }

    // Certificate
    const auto& c = record.cert;
    v.set_bool(F::cert_available, c.available);
    v.set_bool(F::cert_data_present, c.available && !c.parse_error);
    if (c.available) {
        if (!c.parse_error) v.set_numeric(F::san_count, static_cast<double>(c.san_entries.size()));
        v.set_bool(F::san_wildcard, std::any_of(c.san_entries.begin(), c.san_entries.end(),
                                                [](const std::string& s) { return s.starts_with("*."); }));
        v.set_bool(F::cert_expired, c.not_after && *c.not_after < now);
        v.set_bool(F::self_signed, c.self_signed);
        v.set_bool(F::domain_validated, c.issuer_name && !c.self_signed && !non_empty(c.subject_org));
        v.set_category(F::issuer_name, non_empty(c.issuer_name));
        v.set_category(F::issuer_country, non_empty(c.issuer_country));
        v.set_numeric(F::cert_lifetime, nonneg_days(c.not_before, c.not_after));
    }

    // Hosting
    if (record.dns.resolves && !record.dns.addresses.empty()) {
        const auto& ip = record.dns.addresses.front();
        if (ctx.asn) {
            if (auto as = ctx.asn->lookup(ip)) v.set_category(F::website_as, as->token());
        }
        if (ctx.geo) v.set_category(F::website_country, ctx.geo->lookup(ip));
    }
    v.set_bool(F::website_available, record.http.available);
    v.set_bool(F::hosting_data_present, record.http.available);
    if (record.http.available) {
        v.set_bool(F::wordpress_cms, cms.wordpress);
        v.set_tokens(F::wp_plugins, std::vector<std::string>(cms.plugins.begin(), cms.plugins.end()));
        v.set_category(F::wp_theme, cms.wordpress ? cms.theme : std::nullopt);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Feature sets

std::string_view to_string(FeatureSet s) {
    switch (s) {
    case FeatureSet::domain: return "domain";
    case FeatureSet::domain_cert: return "domain_cert";
    case FeatureSet::all: return "all";
    }
    return "all";
}

std::optional<FeatureSet> parse_feature_set(std::string_view text) {
    if (text == "domain") return FeatureSet::domain;
    if (text == "domain_cert" || text == "domain+cert" || text == "domain-cert") return FeatureSet::domain_cert;
    if (text == "all") return FeatureSet::all;
    return std::nullopt;
}

std::array<bool, kSourceCount> category_mask(FeatureSet set) {
    std::array<bool, kSourceCount> mask{};
    for (const auto& c : kColumns) {
        bool on = false;
        switch (c.category) {
        case C::domain: on = true; break;
        case C::certificate: on = set != FeatureSet::domain; break;
        case C::hosting: on = set == FeatureSet::all; break;
        }
        mask[index_of(c.id)] = on;
    }
    return mask;
}

// ---------------------------------------------------------------------------
// Encoder

Encoder Encoder::fit(std::span<const FeatureVector> train, std::size_t k) {
    if (train.empty()) throw Error(ErrorKind::invalid_argument, "cannot fit encoder on an empty training set");
    if (k == 0) throw Error(ErrorKind::invalid_argument, "encoder vocabulary size must be >= 1");
    Encoder enc;
    enc.k_ = k;
    for (const auto& col : kColumns) {
        if (col.type != T::categorical && col.type != T::category_set) continue;
        std::map<std::string, std::size_t> counts;
        for (const auto& v : train) {
            if (col.type == T::categorical) {
                if (auto s = v.category(col.id)) ++counts[*s];
            } else if (auto toks = v.tokens(col.id)) {
                for (const auto& t : *toks) ++counts[t];
            }
        }
        std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
        std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
        if (ranked.size() > k) ranked.resize(k);
        auto& vocab = enc.vocab_[index_of(col.id)];
        for (auto& [value, n] : ranked) vocab.push_back(std::move(value));
    }
    enc.build_columns();
    return enc;
}

Encoder Encoder::from_vocabularies(std::array<std::vector<std::string>, kSourceCount> vocab, std::size_t k) {
    Encoder enc;
    enc.k_ = k;
    enc.vocab_ = std::move(vocab);
    enc.build_columns();
    return enc;
}

void Encoder::build_columns() {
    columns_.clear();
    for (const auto& col : kColumns) {
        const std::size_t src = index_of(col.id);
        offset_[src] = columns_.size();
        const std::string key(col.key);
        switch (col.type) {
        case T::boolean: columns_.push_back({src, key}); break;
        case T::numeric:
            columns_.push_back({src, key});
            columns_.push_back({src, key + "#present"});
            break;
        case T::categorical:
        case T::category_set:
            for (const auto& v : vocab_[src]) columns_.push_back({src, key + "=" + v});
            columns_.push_back({src, key + "#OTHER"});
            columns_.push_back({src, key + "#MISSING"});
            break;
        }
    }
}

std::vector<double> Encoder::transform(const FeatureVector& v) const {
    std::vector<double> row(width(), 0.0);
    transform_into(v, row);
    return row;
}

void Encoder::transform_into(const FeatureVector& v, std::span<double> out) const {
    if (out.size() != width()) throw Error(ErrorKind::shape, "encoded row width mismatch");
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& col : kColumns) {
        const std::size_t src = index_of(col.id);
        const std::size_t off = offset_[src];
        const auto& vocab = vocab_[src];
        switch (col.type) {
        case T::boolean: out[off] = v.boolean(col.id) ? 1.0 : 0.0; break;
        case T::numeric:
            if (auto x = v.numeric(col.id)) {
                out[off] = *x;
                out[off + 1] = 1.0;
            } else {
                out[off] = kMissingNumeric;
            }
            break;
        case T::categorical:
            if (auto s = v.category(col.id)) {
                const auto it = std::find(vocab.begin(), vocab.end(), *s);
                out[off + static_cast<std::size_t>(it - vocab.begin())] = 1.0;  // end() lands on OTHER
            } else {
                out[off + vocab.size() + 1] = 1.0;
            }
            break;
        case T::category_set:
            if (auto toks = v.tokens(col.id)) {
                for (const auto& t : *toks) {
                    const auto it = std::find(vocab.begin(), vocab.end(), t);
                    out[off + static_cast<std::size_t>(it - vocab.begin())] = 1.0;
                }
            } else {
                out[off + vocab.size() + 1] = 1.0;
            }
            break;
        }
    }
}

std::vector<std::size_t> Encoder::columns_for(const std::array<bool, kSourceCount>& mask) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (mask[columns_[i].source]) out.push_back(i);
    }
    return out;
}

}  // namespace triage
