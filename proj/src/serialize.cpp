#include "triage/serialize.hpp"

#include "triage/error.hpp"
#include "triage/text.hpp"

#include <charconv>
#include <cmath>

namespace triage {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::validation, what); }

template <typename T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

json opt_date(const std::optional<Date>& d) { return d ? json(format_date(*d)) : json(nullptr); }
json opt_ts(const std::optional<Timestamp>& t) { return t ? json(format_iso8601(*t)) : json(nullptr); }

std::optional<std::string> get_opt_string(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}

std::optional<Timestamp> get_opt_ts(const json& j, const char* key) {
    auto s = get_opt_string(j, key);
    if (!s) return std::nullopt;
    auto ts = parse_iso8601(*s);
    if (!ts) bad(std::string("bad timestamp in ") + key);
    return ts;
}

std::optional<Date> get_opt_date(const json& j, const char* key) {
    auto ts = get_opt_ts(j, key);
    if (!ts) return std::nullopt;
    return std::chrono::floor<std::chrono::days>(*ts);
}

IpAddress ip_from(const json& j) {
    auto ip = IpAddress::parse(j.get<std::string>());
    if (!ip) bad("bad IP address " + j.dump());
    return *ip;
}

}  // namespace

json to_json(const ProbeRecord& r) {
    json dns = {{"resolves", r.dns.resolves}, {"addresses", json::array()}, {"nameserver_hosts", r.dns.nameserver_hosts},
                {"nameserver_addresses", json::array()}};
    for (const auto& a : r.dns.addresses) dns["addresses"].push_back(a.to_string());
    for (const auto& [host, a] : r.dns.nameserver_addresses) dns["nameserver_addresses"].push_back({host, a.to_string()});

    const json whois = {{"available", r.whois.available},
                        {"registrar", opt(r.whois.registrar)},
                        {"registrant_org", opt(r.whois.registrant_org)},
                        {"registrant_country", opt(r.whois.registrant_country)},
                        {"created", opt_date(r.whois.created)},
                        {"updated", opt_date(r.whois.updated)},
                        {"expires", opt_date(r.whois.expires)},
                        {"raw_text", r.whois.raw_text}};
    const json cert = {{"available", r.cert.available},
                       {"subject_cn", opt(r.cert.subject_cn)},
                       {"subject_org", opt(r.cert.subject_org)},
                       {"issuer_name", opt(r.cert.issuer_name)},
                       {"issuer_country", opt(r.cert.issuer_country)},
                       {"san_entries", r.cert.san_entries},
                       {"not_before", opt_ts(r.cert.not_before)},
                       {"not_after", opt_ts(r.cert.not_after)},
                       {"self_signed", r.cert.self_signed},
                       {"parse_error", r.cert.parse_error}};
    json headers = json::array();
    for (const auto& [n, v] : r.http.headers) headers.push_back({n, v});
    const json http = {{"available", r.http.available},
                       {"final_url", opt(r.http.final_url)},
                       {"status", opt(r.http.status)},
                       {"redirect_count", r.http.redirect_count},
                       {"body", opt(r.http.body)},
                       {"headers", headers}};
    return {{"domain", r.domain},
            {"probed_at", format_iso8601(r.probed_at)},
            {"dns", dns},
            {"whois", whois},
            {"cert", cert},
            {"http", http}};
}

ProbeRecord probe_record_from_json(const json& j) {
    try {
        ProbeRecord r;
        r.domain = j.at("domain").get<std::string>();
        auto ts = parse_iso8601(j.at("probed_at").get<std::string>());
        if (!ts) bad("bad probed_at");
        r.probed_at = *ts;

        const auto& dns = j.at("dns");
        r.dns.resolves = dns.at("resolves").get<bool>();
        for (const auto& a : dns.at("addresses")) r.dns.addresses.push_back(ip_from(a));
        r.dns.nameserver_hosts = dns.at("nameserver_hosts").get<std::vector<std::string>>();
        for (const auto& p : dns.at("nameserver_addresses")) {
            r.dns.nameserver_addresses.emplace_back(p.at(0).get<std::string>(), ip_from(p.at(1)));
        }

        const auto& w = j.at("whois");
        r.whois.available = w.at("available").get<bool>();
        r.whois.registrar = get_opt_string(w, "registrar");
        r.whois.registrant_org = get_opt_string(w, "registrant_org");
        r.whois.registrant_country = get_opt_string(w, "registrant_country");
        r.whois.created = get_opt_date(w, "created");
        r.whois.updated = get_opt_date(w, "updated");
        r.whois.expires = get_opt_date(w, "expires");
        r.whois.raw_text = w.at("raw_text").get<std::string>();

        const auto& c = j.at("cert");
        r.cert.available = c.at("available").get<bool>();
        r.cert.subject_cn = get_opt_string(c, "subject_cn");
        r.cert.subject_org = get_opt_string(c, "subject_org");
        r.cert.issuer_name = get_opt_string(c, "issuer_name");
        r.cert.issuer_country = get_opt_string(c, "issuer_country");
        r.cert.san_entries = c.at("san_entries").get<std::vector<std::string>>();
        r.cert.not_before = get_opt_ts(c, "not_before");
        r.cert.not_after = get_opt_ts(c, "not_after");
        r.cert.self_signed = c.at("self_signed").get<bool>();
        r.cert.parse_error = c.at("parse_error").get<bool>();

        const auto& h = j.at("http");
        r.http.available = h.at("available").get<bool>();
        r.http.final_url = get_opt_string(h, "final_url");
        if (!h.at("status").is_null()) r.http.status = h.at("status").get<int>();
        r.http.redirect_count = h.at("redirect_count").get<int>();
        r.http.body = get_opt_string(h, "body");
        for (const auto& p : h.at("headers")) r.http.headers.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
        return r;
    } catch (const json::exception& e) {
        bad(std::string("malformed probe record: ") + e.what());
    }
}

json to_json(const FeatureVector& v) {
    json j = json::object();
    for (const auto& col : source_columns()) {
        const auto& value = v[col.id];
        const std::string key(col.key);
        if (std::holds_alternative<Missing>(value)) {
            j[key] = nullptr;
        } else if (const auto* b = std::get_if<bool>(&value)) {
            j[key] = *b;
        } else if (const auto* d = std::get_if<double>(&value)) {
            j[key] = *d;
        } else if (const auto* s = std::get_if<std::string>(&value)) {
            j[key] = *s;
        } else {
            j[key] = std::get<std::vector<std::string>>(value);
        }
    }
    return j;
}

FeatureVector feature_vector_from_json(const json& j) {
    if (!j.is_object()) bad("feature vector must be an object");
    FeatureVector v;
    try {
        for (const auto& col : source_columns()) {
            const std::string key(col.key);
            if (!j.contains(key)) bad("feature vector lacks " + key);
            const auto& x = j.at(key);
            switch (col.type) {
            case FeatureType::boolean: v.set(col.id, x.get<bool>()); break;
            case FeatureType::numeric:
                v.set_numeric(col.id, x.is_null() ? std::nullopt : std::optional<double>(x.get<double>()));
                break;
            case FeatureType::categorical:
                v.set_category(col.id, x.is_null() ? std::nullopt : std::optional<std::string>(x.get<std::string>()));
                break;
            case FeatureType::category_set:
                v.set_tokens(col.id, x.is_null() ? std::nullopt
                                                 : std::optional<std::vector<std::string>>(x.get<std::vector<std::string>>()));
                break;
            }
        }
    } catch (const json::exception& e) {
        bad(std::string("malformed feature vector: ") + e.what());
    }
    return v;
}

json to_json(const CmsInfo& c) {
    return {{"wordpress", c.wordpress}, {"plugins", c.plugins}, {"theme", opt(c.theme)}};
}

json to_json(const HyperParams& p) {
    return {{"n_trees", p.n_trees},
            {"max_depth", opt(p.max_depth)},
            {"min_samples_split", p.min_samples_split},
            {"min_leaf", p.min_leaf},
            {"features_per_split", p.features_rule == MaxFeaturesRule::count ? json(p.features_count)
                                                                             : json(std::string(to_string(p.features_rule)))},
            {"bootstrap", p.bootstrap}};
}

HyperParams hyper_params_from_json(const json& j) {
    try {
        HyperParams p;
        p.n_trees = j.at("n_trees").get<std::size_t>();
        if (!j.at("max_depth").is_null()) p.max_depth = j.at("max_depth").get<std::size_t>();
        p.min_samples_split = j.at("min_samples_split").get<std::size_t>();
        p.min_leaf = j.at("min_leaf").get<std::size_t>();
        const auto& fps = j.at("features_per_split");
        if (fps.is_number_unsigned()) {
            p.features_rule = MaxFeaturesRule::count;
            p.features_count = fps.get<std::size_t>();
        } else {
            auto rule = parse_max_features_rule(fps.get<std::string>());
            if (!rule || *rule == MaxFeaturesRule::count) bad("bad features_per_split");
            p.features_rule = *rule;
        }
        p.bootstrap = j.at("bootstrap").get<bool>();
        p.validate();
        return p;
    } catch (const json::exception& e) {
        bad(std::string("malformed hyperparameters: ") + e.what());
    }
}

json to_json(const Prediction& p) {
    json probs = json::object();
    for (std::size_t c = 0; c < kClassCount; ++c) probs[std::string(to_string(kClassOrder[c]))] = p.probabilities[c];
    json top = json::array();
    for (const auto& a : p.top_features) {
        top.push_back({{"feature", std::string(info(a.feature).key)},
                       {"name", std::string(info(a.feature).display_name)},
                       {"contribution", a.contribution}});
    }
    return {{"domain", p.domain},
            {"probabilities", probs},
            {"predicted_class", std::string(to_string(p.predicted_class))},
            {"top_features", top},
            {"model_version", p.model_version}};
}

Prediction prediction_from_json(const json& j) {
    try {
        Prediction p;
        p.domain = j.at("domain").get<std::string>();
        for (std::size_t c = 0; c < kClassCount; ++c) {
            p.probabilities[c] = j.at("probabilities").at(std::string(to_string(kClassOrder[c]))).get<double>();
        }
        auto label = parse_label(j.at("predicted_class").get<std::string>());
        if (!label) bad("bad predicted_class");
        p.predicted_class = *label;
        for (const auto& a : j.at("top_features")) {
            auto id = feature_by_key(a.at("feature").get<std::string>());
            if (!id) bad("unknown feature in top_features");
            p.top_features.push_back({*id, a.at("contribution").get<double>()});
        }
        p.model_version = j.at("model_version").get<std::string>();
        return p;
    } catch (const json::exception& e) {
        bad(std::string("malformed prediction: ") + e.what());
    }
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string to_cell(const FeatureValue& v) {
    if (std::holds_alternative<Missing>(v)) return "";
    if (const auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    const auto& tokens = std::get<std::vector<std::string>>(v);
    if (tokens.empty()) return "|";
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += '|';
        out += tokens[i];
    }
    return out;
}

FeatureValue value_from_cell(FeatureId id, std::string_view cell) {
    const auto& col = info(id);
    if (col.type == FeatureType::boolean) {
        if (cell == "true" || cell == "1") return true;
        if (cell == "false" || cell == "0" || cell.empty()) return false;
        bad("bad boolean '" + std::string(cell) + "' for " + std::string(col.key));
    }
    if (cell.empty()) return Missing{};
    switch (col.type) {
    case FeatureType::numeric: {
        double d = 0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), d);
        if (res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !(d >= 0) || !std::isfinite(d)) {
            bad("bad number '" + std::string(cell) + "' for " + std::string(col.key));
        }
        return d;
    }
    case FeatureType::categorical: return std::string(cell);
    case FeatureType::category_set: {
        std::vector<std::string> tokens;
        for (auto t : split(cell, '|')) {
            if (!t.empty()) tokens.emplace_back(t);
        }
        return tokens;
    }
    case FeatureType::boolean: break;
    }
    return Missing{};
}

}  // namespace triage
