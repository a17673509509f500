#include "triage/probe.hpp"

#include "triage/error.hpp"
#include "triage/text.hpp"

#include <nlohmann/json.hpp>
#include <openssl/pem.h>
#include <openssl/x509.h>
#include <openssl/x509v3.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <ctime>
#include <fstream>
#include <thread>

namespace triage {

using nlohmann::json;

ProbeRecord unavailable_record(std::string domain, Timestamp probed_at) {
    ProbeRecord r;
    r.domain = std::move(domain);
    r.probed_at = probed_at;
    return r;
}

// ---------------------------------------------------------------------------
// WHOIS

namespace {

constexpr std::pair<std::string_view, std::string_view> kDefaultAliases[] = {
    {"registrar", "registrar"},
    {"registrar name", "registrar"},
    {"sponsoring registrar", "registrar"},
    {"registrar organization", "registrar"},
    {"registrar-name", "registrar"},
    {"registrant organization", "registrant_org"},
    {"registrant organisation", "registrant_org"},
    {"registrant org", "registrant_org"},
    {"org", "registrant_org"},
    {"organization", "registrant_org"},
    {"registrant country", "registrant_country"},
    {"registrant country/economy", "registrant_country"},
    {"country", "registrant_country"},
    {"creation date", "created"},
    {"created", "created"},
    {"created on", "created"},
    {"registered on", "created"},
    {"registration time", "created"},
    {"domain registration date", "created"},
    {"registered", "created"},
    {"domain name commencement date", "created"},
    {"updated date", "updated"},
    {"last updated", "updated"},
    {"last updated on", "updated"},
    {"last modified", "updated"},
    {"changed", "updated"},
    {"modified", "updated"},
    {"registry expiry date", "expires"},
    {"registrar registration expiration date", "expires"},
    {"expiration date", "expires"},
    {"expiry date", "expires"},
    {"expires", "expires"},
    {"expires on", "expires"},
    {"paid-till", "expires"},
    {"renewal date", "expires"},
};

constexpr std::string_view kMonths[] = {"jan", "feb", "mar", "apr", "may", "jun",
                                        "jul", "aug", "sep", "oct", "nov", "dec"};

std::optional<int> to_int(std::string_view s) {
    int v = 0;
    if (s.empty()) return std::nullopt;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<Date> make_date(int y, int m, int d) {
    using namespace std::chrono;
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

std::optional<int> month_from_name(std::string_view name) {
    const std::string lower = to_lower(name.substr(0, 3));
    for (std::size_t i = 0; i < std::size(kMonths); ++i) {
        if (kMonths[i] == lower) return static_cast<int>(i + 1);
    }
    return std::nullopt;
}

}  // namespace

const WhoisAliases& WhoisAliases::defaults() {
    static const WhoisAliases table = [] {
        WhoisAliases t;
        for (const auto& [alias, field] : kDefaultAliases) t.alias_to_field_.emplace_back(alias, field);
        return t;
    }();
    return table;
}

WhoisAliases WhoisAliases::load(const std::filesystem::path& path) {
    WhoisAliases t;
    for (const auto& line : read_list_file(path)) {
        const auto tab = line.find('\t');
        if (tab == std::string::npos) continue;
        t.alias_to_field_.emplace_back(to_lower(trim(std::string_view(line).substr(tab + 1))),
                                       std::string(trim(std::string_view(line).substr(0, tab))));
    }
    return t;
}

std::string_view WhoisAliases::field_for(std::string_view key) const {
    for (const auto& [alias, field] : alias_to_field_) {
        if (alias == key) return field;
    }
    return {};
}

std::optional<Date> parse_whois_date(std::string_view value) {
    value = trim(value);
    if (value.empty()) return std::nullopt;
    if (const auto ts = parse_iso8601(value)) return std::chrono::floor<std::chrono::days>(*ts);

    const std::string_view token = value.substr(0, value.find_first_of(" \t"));
    if (const auto ts = parse_iso8601(token)) return std::chrono::floor<std::chrono::days>(*ts);

    // YYYY.MM.DD, YYYY/MM/DD, DD.MM.YYYY, DD-Mon-YYYY, DD/MM/YYYY
    for (char sep : {'.', '/', '-'}) {
        const auto parts = split(token, sep);
        if (parts.size() != 3) continue;
        if (parts[0].size() == 4) {
            auto y = to_int(parts[0]), m = to_int(parts[1]), d = to_int(parts[2]);
            if (y && m && d) return make_date(*y, *m, *d);
        } else if (parts[2].size() == 4) {
            auto d = to_int(parts[0]), y = to_int(parts[2]);
            auto m = to_int(parts[1]);
            if (!m) m = month_from_name(parts[1]);
            if (y && m && d) return make_date(*y, *m, *d);
        }
    }
    if (token.size() == 8) {
        auto y = to_int(token.substr(0, 4)), m = to_int(token.substr(4, 2)), d = to_int(token.substr(6, 2));
        if (y && m && d) return make_date(*y, *m, *d);
    }
    return std::nullopt;
}

WhoisObservation parse_whois(std::string_view raw, const WhoisAliases& aliases) {
    WhoisObservation obs;
    obs.raw_text = std::string(raw);

    for (std::string_view line : split(raw, '\n')) {
        line = trim(line);
        if (line.empty() || line.front() == '%' || line.front() == '#' || line.starts_with(">>>")) continue;
        const auto colon = line.find(':');
        if (colon == std::string_view::npos || colon == 0) continue;
        const std::string key = to_lower(trim(line.substr(0, colon)));
        const std::string_view value = trim(line.substr(colon + 1));
        if (value.empty()) continue;

        const std::string_view field = aliases.field_for(key);
        if (field == "registrar" && !obs.registrar) {
            obs.registrar = std::string(value);
        } else if (field == "registrant_org" && !obs.registrant_org) {
            obs.registrant_org = std::string(value);
        } else if (field == "registrant_country" && !obs.registrant_country) {
            std::string c(value);
            if (c.size() == 2) std::transform(c.begin(), c.end(), c.begin(), ::toupper);
            obs.registrant_country = std::move(c);
        } else if (field == "created" && !obs.created) {
            obs.created = parse_whois_date(value);
        } else if (field == "updated" && !obs.updated) {
            obs.updated = parse_whois_date(value);
        } else if (field == "expires" && !obs.expires) {
            obs.expires = parse_whois_date(value);
        }
    }
    if (obs.created && obs.expires && *obs.expires < *obs.created) obs.expires.reset();
    obs.available = obs.registrar || obs.registrant_org || obs.registrant_country || obs.created ||
                    obs.updated || obs.expires;
    return obs;
}

// ---------------------------------------------------------------------------
// Certificates

namespace {

struct X509Free {
    void operator()(X509* x) const { X509_free(x); }
};
struct GeneralNamesFree {
    void operator()(GENERAL_NAMES* g) const { GENERAL_NAMES_free(g); }
};

std::optional<std::string> name_entry(const X509_NAME* name, int nid) {
    if (!name) return std::nullopt;
    const int idx = X509_NAME_get_index_by_NID(name, nid, -1);
    if (idx < 0) return std::nullopt;
    const X509_NAME_ENTRY* entry = X509_NAME_get_entry(name, idx);
    const ASN1_STRING* data = X509_NAME_ENTRY_get_data(entry);
    unsigned char* utf8 = nullptr;
    const int len = ASN1_STRING_to_UTF8(&utf8, data);
    if (len < 0) return std::nullopt;
    std::string out(reinterpret_cast<char*>(utf8), static_cast<std::size_t>(len));
    OPENSSL_free(utf8);
    return out;
}

std::optional<Timestamp> asn1_time(const ASN1_TIME* t) {
    if (!t) return std::nullopt;
    std::tm tm{};
    if (ASN1_TIME_to_tm(t, &tm) != 1) return std::nullopt;
    return Timestamp{std::chrono::seconds{timegm(&tm)}};
}

}  // namespace

CertObservation parse_certificate(std::span<const std::uint8_t> der) {
    CertObservation obs;
    obs.available = true;
    if (der.empty()) {
        obs.parse_error = true;
        return obs;
    }
    const unsigned char* p = der.data();
    std::unique_ptr<X509, X509Free> cert(d2i_X509(nullptr, &p, static_cast<long>(der.size())));
    if (!cert) {
        obs.parse_error = true;
        return obs;
    }

    const X509_NAME* subject = X509_get_subject_name(cert.get());
    const X509_NAME* issuer = X509_get_issuer_name(cert.get());
    obs.subject_cn = name_entry(subject, NID_commonName);
    obs.subject_org = name_entry(subject, NID_organizationName);
    obs.issuer_name = name_entry(issuer, NID_organizationName);
    if (!obs.issuer_name) obs.issuer_name = name_entry(issuer, NID_commonName);
    obs.issuer_country = name_entry(issuer, NID_countryName);
    obs.not_before = asn1_time(X509_get0_notBefore(cert.get()));
    obs.not_after = asn1_time(X509_get0_notAfter(cert.get()));
    if (obs.not_before && obs.not_after && *obs.not_after < *obs.not_before) {
        obs.not_after.reset();
        obs.parse_error = true;
    }
    obs.self_signed = subject && issuer && X509_NAME_cmp(issuer, subject) == 0;

    if (X509_get_ext_by_NID(cert.get(), NID_subject_alt_name, -1) >= 0) {
        int critical = 0;
        std::unique_ptr<GENERAL_NAMES, GeneralNamesFree> names(static_cast<GENERAL_NAMES*>(
            X509_get_ext_d2i(cert.get(), NID_subject_alt_name, &critical, nullptr)));
        if (!names) {
            obs.parse_error = true;
        } else {
            for (int i = 0; i < sk_GENERAL_NAME_num(names.get()); ++i) {
                const GENERAL_NAME* gn = sk_GENERAL_NAME_value(names.get(), i);
                if (gn->type != GEN_DNS) continue;
                const ASN1_STRING* s = gn->d.dNSName;
                obs.san_entries.emplace_back(reinterpret_cast<const char*>(ASN1_STRING_get0_data(s)),
                                             static_cast<std::size_t>(ASN1_STRING_length(s)));
            }
        }
    }
    return obs;
}

std::optional<std::vector<std::uint8_t>> pem_to_der(std::string_view pem) {
    BIO* bio = BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size()));
    if (!bio) return std::nullopt;
    std::unique_ptr<X509, X509Free> cert(PEM_read_bio_X509(bio, nullptr, nullptr, nullptr));
    BIO_free(bio);
    if (!cert) return std::nullopt;
    unsigned char* out = nullptr;
    const int len = i2d_X509(cert.get(), &out);
    if (len <= 0) return std::nullopt;
    std::vector<std::uint8_t> der(out, out + len);
    OPENSSL_free(out);
    return der;
}

// ---------------------------------------------------------------------------
// Fixture transport

FixtureTransport::FixtureTransport(std::filesystem::path root) : root_(std::move(root)) {
    if (!std::filesystem::is_directory(root_)) {
        throw Error(ErrorKind::io, "fixture root is not a directory: " + root_.string());
    }
}

std::optional<std::filesystem::path> FixtureTransport::domain_dir(std::string_view domain) const {
    if (domain.empty() || domain.find('/') != std::string_view::npos || domain.starts_with('.')) {
        return std::nullopt;
    }
    auto dir = root_ / std::string(domain);
    if (!std::filesystem::is_directory(dir)) return std::nullopt;
    return dir;
}

bool FixtureTransport::simulate_latency(const std::filesystem::path& dir, std::string_view protocol,
                                        std::chrono::milliseconds timeout) const {
    const auto timing = dir / "timing.json";
    if (!std::filesystem::exists(timing)) return true;
    const json j = json::parse(read_file(timing), nullptr, false);
    if (!j.is_object() || !j.contains(protocol)) return true;
    const std::chrono::milliseconds latency{j.at(std::string(protocol)).get<long>()};
    std::this_thread::sleep_for(std::min(latency, timeout));
    return latency <= timeout;
}

std::optional<DnsObservation> FixtureTransport::resolve(std::string_view domain,
                                                        std::chrono::milliseconds timeout) {
    const auto dir = domain_dir(domain);
    if (!dir || !std::filesystem::exists(*dir / "dns.json")) return std::nullopt;
    if (!simulate_latency(*dir, "dns", timeout)) return std::nullopt;
    const json j = json::parse(read_file(*dir / "dns.json"), nullptr, false);
    if (!j.is_object()) return std::nullopt;

    DnsObservation obs;
    for (const auto& a : j.value("addresses", json::array())) {
        if (auto ip = IpAddress::parse(a.get<std::string>())) obs.addresses.push_back(*ip);
    }
    for (const auto& ns : j.value("nameservers", json::array())) {
        const std::string host = ns.at("host").get<std::string>();
        obs.nameserver_hosts.push_back(host);
        for (const auto& a : ns.value("addresses", json::array())) {
            if (auto ip = IpAddress::parse(a.get<std::string>())) obs.nameserver_addresses.emplace_back(host, *ip);
        }
    }
    obs.resolves = !obs.addresses.empty();
    return obs;
}

std::optional<std::string> FixtureTransport::whois(std::string_view domain, std::chrono::milliseconds timeout) {
    const auto dir = domain_dir(domain);
    if (!dir || !std::filesystem::exists(*dir / "whois.txt")) return std::nullopt;
    if (!simulate_latency(*dir, "whois", timeout)) return std::nullopt;
    return read_file(*dir / "whois.txt");
}

std::optional<std::vector<std::uint8_t>> FixtureTransport::tls_leaf_certificate(std::string_view host,
                                                                                 std::chrono::milliseconds timeout) {
    const auto dir = domain_dir(host);
    if (!dir) return std::nullopt;
    const auto pem = *dir / "cert.pem";
    const auto der = *dir / "cert.der";
    if (!std::filesystem::exists(pem) && !std::filesystem::exists(der)) return std::nullopt;
    if (!simulate_latency(*dir, "tls", timeout)) return std::nullopt;
    if (std::filesystem::exists(der)) {
        const std::string bytes = read_file(der);
        return std::vector<std::uint8_t>(bytes.begin(), bytes.end());
    }
    const std::string text = read_file(pem);
    if (auto decoded = pem_to_der(text)) return decoded;
    // Undecodable PEM still counts as a presented certificate.
    return std::vector<std::uint8_t>(text.begin(), text.end());
}

std::optional<HttpResponse> FixtureTransport::http_get(std::string_view url, std::chrono::milliseconds timeout,
                                                       std::size_t body_cap) {
    const auto host = [&]() -> std::string {
        std::string_view rest = url;
        if (const auto p = rest.find("://"); p != std::string_view::npos) rest.remove_prefix(p + 3);
        rest = rest.substr(0, rest.find_first_of("/:?#"));
        return to_lower(rest);
    }();
    const auto dir = domain_dir(host);
    if (!dir || !std::filesystem::exists(*dir / "http.json")) return std::nullopt;
    if (!simulate_latency(*dir, "http", timeout)) return std::nullopt;
    const json j = json::parse(read_file(*dir / "http.json"), nullptr, false);
    if (!j.is_object()) return std::nullopt;

    for (const auto& r : j.value("responses", json::array())) {
        if (r.value("url", "") != url) continue;
        HttpResponse resp;
        resp.status = r.value("status", 200);
        for (const auto& h : r.value("headers", json::array())) {
            resp.headers.emplace_back(h.at(0).get<std::string>(), h.at(1).get<std::string>());
        }
        if (r.contains("body_file")) {
            resp.body = read_file(*dir / r.at("body_file").get<std::string>());
        } else {
            resp.body = r.value("body", "");
        }
        if (resp.body.size() > body_cap) resp.body.resize(body_cap);
        return resp;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// probe_domain

namespace {

std::optional<std::string> header_value(const std::vector<Header>& headers, std::string_view name) {
    for (const auto& [k, v] : headers) {
        if (to_lower(k) == to_lower(name)) return v;
    }
    return std::nullopt;
}

std::string resolve_location(std::string_view base, std::string_view location) {
    if (location.find("://") != std::string_view::npos) return std::string(location);
    const auto scheme_end = base.find("://");
    const auto authority_end = base.find('/', scheme_end + 3);
    const std::string origin(base.substr(0, authority_end));
    if (location.starts_with("//")) return std::string(base.substr(0, scheme_end + 1)) + std::string(location);
    if (location.starts_with('/')) return origin + std::string(location);
    std::string dir(base.substr(0, base.rfind('/') + 1));
    if (dir.size() <= scheme_end + 3) dir = origin + "/";
    return dir + std::string(location);
}

/// Follows redirects from `start`. Returns the observation for the chain;
/// available only if a 2xx response is reached within the redirect cap.
HttpObservation fetch_following(std::string url, Transport& transport, const ProbeLimits& limits) {
    HttpObservation obs;
    for (int hop = 0; hop <= limits.max_redirects; ++hop) {
        auto resp = transport.http_get(url, limits.timeout, limits.body_cap);
        if (!resp) return obs;
        obs.status = resp->status;
        obs.final_url = url;
        obs.redirect_count = hop;
        if (resp->status >= 300 && resp->status < 400) {
            const auto location = header_value(resp->headers, "location");
            if (!location) return obs;
            url = resolve_location(url, *location);
            continue;
        }
        if (resp->status >= 200 && resp->status < 300) {
            obs.available = true;
            obs.headers = std::move(resp->headers);
            if (resp->body.size() > limits.body_cap) resp->body.resize(limits.body_cap);
            obs.body = std::move(resp->body);
        }
        return obs;
    }
    return obs;
}

}  // namespace

ProbeRecord probe_domain(std::string_view domain, Transport& transport, const ProbeLimits& limits,
                         Timestamp probed_at) {
    ProbeRecord record = unavailable_record(std::string(domain), probed_at);

    if (auto dns = transport.resolve(domain, limits.timeout)) {
        record.dns = std::move(*dns);
        if (!record.dns.resolves) record.dns.addresses.clear();
    }
    if (auto raw = transport.whois(domain, limits.timeout)) record.whois = parse_whois(*raw);
    if (auto der = transport.tls_leaf_certificate(domain, limits.timeout)) record.cert = parse_certificate(*der);

    const std::string base(domain);
    HttpObservation http = fetch_following("https://" + base + "/", transport, limits);
    if (!http.available) {
        HttpObservation plain = fetch_following("http://" + base + "/", transport, limits);
        if (plain.available || !http.status) http = std::move(plain);
    }
    record.http = std::move(http);
    return record;
}

std::vector<ProbeRecord> probe_many(const std::vector<std::string>& domains, Transport& transport,
                                    const ProbeLimits& limits, Timestamp probed_at, std::size_t workers) {
    std::vector<ProbeRecord> out(domains.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < domains.size(); i = next++) {
            out[i] = probe_domain(domains[i], transport, limits, probed_at);
        }
    };
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(domains.size(), 1));
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
        work();
    }
    return out;
}

}  // namespace triage
