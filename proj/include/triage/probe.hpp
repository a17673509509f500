#pragma once

#include "triage/ip.hpp"
#include "triage/time.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace triage {

using Header = std::pair<std::string, std::string>;

struct DnsObservation {
    bool resolves = false;
    std::vector<IpAddress> addresses;
    std::vector<std::string> nameserver_hosts;
    /// (nameserver host, address) pairs; hosts are always in nameserver_hosts.
    std::vector<std::pair<std::string, IpAddress>> nameserver_addresses;

    bool operator==(const DnsObservation&) const = default;
};

struct WhoisObservation {
    bool available = false;
    std::optional<std::string> registrar;
    std::optional<std::string> registrant_org;
    std::optional<std::string> registrant_country;
    std::optional<Date> created;
    std::optional<Date> updated;
    std::optional<Date> expires;
    std::string raw_text;

    bool operator==(const WhoisObservation&) const = default;
};

struct CertObservation {
    bool available = false;
    std::optional<std::string> subject_cn;
    std::optional<std::string> subject_org;
    std::optional<std::string> issuer_name;
    std::optional<std::string> issuer_country;
    std::vector<std::string> san_entries;
    std::optional<Timestamp> not_before;
    std::optional<Timestamp> not_after;
    bool self_signed = false;
    bool parse_error = false;

    bool operator==(const CertObservation&) const = default;
};

struct HttpObservation {
    bool available = false;
    std::optional<std::string> final_url;
    std::optional<int> status;
    int redirect_count = 0;
    std::optional<std::string> body;
    std::vector<Header> headers;

    bool operator==(const HttpObservation&) const = default;
};

struct ProbeRecord {
    std::string domain;
    Timestamp probed_at{};
    DnsObservation dns;
    WhoisObservation whois;
    CertObservation cert;
    HttpObservation http;

    bool operator==(const ProbeRecord&) const = default;
};

/// Record with every section unavailable.
ProbeRecord unavailable_record(std::string domain, Timestamp probed_at);

struct ProbeLimits {
    std::chrono::milliseconds timeout{10'000};
    int max_redirects = 10;
    std::size_t body_cap = 512 * 1024;
};

struct HttpResponse {
    int status = 0;
    std::vector<Header> headers;
    std::string body;
};

/// Network access used by probe_domain. Every call must return within
/// `timeout` (plus scheduling slack); failures and timeouts are nullopt.
/// Implementations must be safe for concurrent calls.
class Transport {
public:
    virtual ~Transport() = default;

    virtual std::optional<DnsObservation> resolve(std::string_view domain, std::chrono::milliseconds timeout) = 0;
    virtual std::optional<std::string> whois(std::string_view domain, std::chrono::milliseconds timeout) = 0;
    /// DER bytes of the leaf certificate presented on port 443 with SNI.
    virtual std::optional<std::vector<std::uint8_t>> tls_leaf_certificate(std::string_view host,
                                                                           std::chrono::milliseconds timeout) = 0;
    /// Single GET without following redirects; body truncated at body_cap.
    virtual std::optional<HttpResponse> http_get(std::string_view url, std::chrono::milliseconds timeout,
                                                 std::size_t body_cap) = 0;
};

/// Replays a directory of per-domain fixtures:
///   <root>/<domain>/dns.json, whois.txt, cert.pem | cert.der, http.json,
///   and optionally timing.json with per-protocol latencies in ms
///   ({"dns":..,"whois":..,"tls":..,"http":..}). A latency above the
/// timeout sleeps for the timeout and then fails. Missing files refuse.
class FixtureTransport final : public Transport {
public:
    explicit FixtureTransport(std::filesystem::path root);

    std::optional<DnsObservation> resolve(std::string_view domain, std::chrono::milliseconds timeout) override;
    std::optional<std::string> whois(std::string_view domain, std::chrono::milliseconds timeout) override;
    std::optional<std::vector<std::uint8_t>> tls_leaf_certificate(std::string_view host,
                                                                   std::chrono::milliseconds timeout) override;
    std::optional<HttpResponse> http_get(std::string_view url, std::chrono::milliseconds timeout,
                                         std::size_t body_cap) override;

    const std::filesystem::path& root() const { return root_; }

private:
    std::optional<std::filesystem::path> domain_dir(std::string_view domain) const;
    /// False when the simulated latency exceeds the timeout.
    bool simulate_latency(const std::filesystem::path& dir, std::string_view protocol,
                          std::chrono::milliseconds timeout) const;

    std::filesystem::path root_;
};

struct LiveTransportOptions {
    /// IPv4/IPv6 resolver address; empty uses the system resolver.
    std::string resolver;
    /// WHOIS server for every query; empty picks `whois.nic.<tld>`.
    std::string whois_server;
    std::string user_agent = "site-triage-probe/1.0";
};

/// Live network transport: DNS through the resolver library, WHOIS over
/// TCP/43 without referral following, TLS on 443 with SNI, HTTP(S) GET.
std::unique_ptr<Transport> make_live_transport(const LiveTransportOptions& options);

/// Builds a ProbeRecord for `domain`. Each failed sub-probe is recorded as an
/// unavailable section; the record as a whole never fails.
ProbeRecord probe_domain(std::string_view domain, Transport& transport, const ProbeLimits& limits,
                         Timestamp probed_at);

/// Probes domains with at most `workers` concurrent probes; output order
/// matches input order.
std::vector<ProbeRecord> probe_many(const std::vector<std::string>& domains, Transport& transport,
                                    const ProbeLimits& limits, Timestamp probed_at, std::size_t workers);

/// Key-alias table mapping WHOIS keys onto observation fields.
class WhoisAliases {
public:
    /// Built-in table (same content as data/whois_aliases.tsv).
    static const WhoisAliases& defaults();
    static WhoisAliases load(const std::filesystem::path& path);

    /// Field name for a lowercase key, or empty.
    std::string_view field_for(std::string_view key) const;

private:
    std::vector<std::pair<std::string, std::string>> alias_to_field_;
};

/// Total: any input yields an observation. Each field takes the first line
/// whose key matches one of its aliases (case-insensitive).
WhoisObservation parse_whois(std::string_view raw, const WhoisAliases& aliases = WhoisAliases::defaults());

/// Parses the date formats seen in WHOIS responses.
std::optional<Date> parse_whois_date(std::string_view value);

/// Total: any byte input yields an observation with available=true.
CertObservation parse_certificate(std::span<const std::uint8_t> der);

/// PEM to DER for the first CERTIFICATE block; nullopt if none decodes.
std::optional<std::vector<std::uint8_t>> pem_to_der(std::string_view pem);

}  // namespace triage
