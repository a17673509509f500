#include "triage/probe.hpp"

#include "triage/text.hpp"

#include <httplib.h>

#include <arpa/inet.h>
#include <arpa/nameser.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <openssl/err.h>
#include <openssl/ssl.h>
#include <poll.h>
#include <resolv.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <mutex>

namespace triage {
namespace {

using Clock = std::chrono::steady_clock;

class Socket {
public:
    explicit Socket(int fd = -1) : fd_(fd) {}
    Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    Socket& operator=(Socket&& o) noexcept {
        if (this != &o) {
            reset();
            fd_ = std::exchange(o.fd_, -1);
        }
        return *this;
    }
    ~Socket() { reset(); }
    int fd() const { return fd_; }
    explicit operator bool() const { return fd_ >= 0; }

private:
    void reset() {
        if (fd_ >= 0) ::close(fd_);
        fd_ = -1;
    }
    int fd_;
};

int remaining_ms(Clock::time_point deadline) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    return left > 0 ? static_cast<int>(left) : 0;
}

bool wait_fd(int fd, short events, Clock::time_point deadline) {
    pollfd p{fd, events, 0};
    const int rc = ::poll(&p, 1, remaining_ms(deadline));
    return rc > 0 && (p.revents & events);
}

Socket connect_tcp(const std::string& host, int port, Clock::time_point deadline) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0) return Socket{};
    std::unique_ptr<addrinfo, decltype(&::freeaddrinfo)> guard(res, ::freeaddrinfo);
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        Socket s(::socket(ai->ai_family, ai->ai_socktype | SOCK_NONBLOCK, ai->ai_protocol));
        if (!s) continue;
        if (::connect(s.fd(), ai->ai_addr, ai->ai_addrlen) == 0) return s;
        if (errno != EINPROGRESS || !wait_fd(s.fd(), POLLOUT, deadline)) continue;
        int err = 0;
        socklen_t len = sizeof err;
        if (::getsockopt(s.fd(), SOL_SOCKET, SO_ERROR, &err, &len) == 0 && err == 0) return s;
    }
    return Socket{};
}

struct SslCtxFree {
    void operator()(SSL_CTX* c) const { SSL_CTX_free(c); }
};
struct SslFree {
    void operator()(SSL* s) const { SSL_free(s); }
};
struct X509Free {
    void operator()(X509* x) const { X509_free(x); }
};

class LiveTransport final : public Transport {
public:
    explicit LiveTransport(LiveTransportOptions options) : options_(std::move(options)) {
        ctx_.reset(SSL_CTX_new(TLS_client_method()));
        if (!ctx_) throw std::runtime_error("cannot create TLS context");
        // Self-signed and expired leaves are observations, not failures.
        SSL_CTX_set_verify(ctx_.get(), SSL_VERIFY_NONE, nullptr);
    }

    std::optional<DnsObservation> resolve(std::string_view domain, std::chrono::milliseconds timeout) override {
        DnsObservation obs;
        const auto deadline = Clock::now() + timeout;
        obs.addresses = query_addresses(std::string(domain), deadline);
        obs.resolves = !obs.addresses.empty();
        for (const auto& host : query_names(std::string(domain), ns_t_ns, deadline)) {
            obs.nameserver_hosts.push_back(host);
            for (const auto& ip : query_addresses(host, deadline)) obs.nameserver_addresses.emplace_back(host, ip);
        }
        if (!obs.resolves && obs.nameserver_hosts.empty()) return std::nullopt;
        return obs;
    }

    std::optional<std::string> whois(std::string_view domain, std::chrono::milliseconds timeout) override {
        std::string server = options_.whois_server;
        if (server.empty()) {
            const auto dot = domain.rfind('.');
            server = "whois.nic." + std::string(domain.substr(dot == std::string_view::npos ? 0 : dot + 1));
            if (domain.ends_with(".com") || domain.ends_with(".net")) server = "whois.verisign-grs.com";
            if (domain.ends_with(".org")) server = "whois.pir.org";
        }
        const auto deadline = Clock::now() + timeout;
        Socket s = connect_tcp(server, 43, deadline);
        if (!s) return std::nullopt;
        const std::string query = std::string(domain) + "\r\n";
        if (::send(s.fd(), query.data(), query.size(), MSG_NOSIGNAL) != static_cast<ssize_t>(query.size())) {
            return std::nullopt;
        }
        std::string out;
        char buf[4096];
        while (out.size() < 1 << 20) {
            if (!wait_fd(s.fd(), POLLIN, deadline)) return out.empty() ? std::nullopt : std::optional(out);
            const ssize_t n = ::recv(s.fd(), buf, sizeof buf, 0);
            if (n <= 0) break;
            out.append(buf, static_cast<std::size_t>(n));
        }
        return out;
    }

    std::optional<std::vector<std::uint8_t>> tls_leaf_certificate(std::string_view host,
                                                                   std::chrono::milliseconds timeout) override {
        const auto deadline = Clock::now() + timeout;
        const std::string h(host);
        Socket s = connect_tcp(h, 443, deadline);
        if (!s) return std::nullopt;
        std::unique_ptr<SSL, SslFree> ssl(SSL_new(ctx_.get()));
        if (!ssl) return std::nullopt;
        SSL_set_fd(ssl.get(), s.fd());
        SSL_set_tlsext_host_name(ssl.get(), h.c_str());
        while (true) {
            const int rc = SSL_connect(ssl.get());
            if (rc == 1) break;
            const int err = SSL_get_error(ssl.get(), rc);
            short events = 0;
            if (err == SSL_ERROR_WANT_READ) events = POLLIN;
            else if (err == SSL_ERROR_WANT_WRITE) events = POLLOUT;
            else return std::nullopt;
            if (!wait_fd(s.fd(), events, deadline)) return std::nullopt;
        }
        std::unique_ptr<X509, X509Free> cert(SSL_get1_peer_certificate(ssl.get()));
        if (!cert) return std::nullopt;
        unsigned char* der = nullptr;
        const int len = i2d_X509(cert.get(), &der);
        if (len <= 0) return std::nullopt;
        std::vector<std::uint8_t> out(der, der + len);
        OPENSSL_free(der);
        return out;
    }

    std::optional<HttpResponse> http_get(std::string_view url, std::chrono::milliseconds timeout,
                                         std::size_t body_cap) override {
        const auto scheme_end = url.find("://");
        if (scheme_end == std::string_view::npos) return std::nullopt;
        const auto path_start = url.find('/', scheme_end + 3);
        const std::string origin(url.substr(0, path_start));
        const std::string path = path_start == std::string_view::npos ? "/" : std::string(url.substr(path_start));

        httplib::Client client(origin);
        client.set_follow_location(false);
        client.enable_server_certificate_verification(false);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());

        HttpResponse out;
        bool got_status = false;
        httplib::Headers headers{{"User-Agent", options_.user_agent}};
        auto result = client.Get(
            path, headers,
            [&](const httplib::Response& r) {
                got_status = true;
                out.status = r.status;
                for (const auto& [k, v] : r.headers) out.headers.emplace_back(k, v);
                return true;
            },
            [&](const char* data, std::size_t len) {
                const std::size_t take = std::min(len, body_cap - out.body.size());
                out.body.append(data, take);
                return out.body.size() < body_cap;
            });
        if (!got_status) return std::nullopt;
        if (!result && result.error() != httplib::Error::Canceled) return std::nullopt;
        return out;
    }

private:
    /// res_nquery is not re-entrant across a shared res_state; each call gets
    /// its own state.
    std::vector<std::uint8_t> raw_query(const std::string& name, int type, Clock::time_point deadline) {
        struct __res_state state {};
        if (res_ninit(&state) != 0) return {};
        state.retrans = std::max(1, remaining_ms(deadline) / 1000);
        state.retry = 1;
        if (!options_.resolver.empty()) {
            sockaddr_in addr{};
            addr.sin_family = AF_INET;
            addr.sin_port = htons(53);
            if (inet_pton(AF_INET, options_.resolver.c_str(), &addr.sin_addr) == 1) {
                state.nsaddr_list[0] = addr;
                state.nscount = 1;
            }
        }
        std::vector<std::uint8_t> answer(4096);
        const int len = res_nquery(&state, name.c_str(), ns_c_in, type, answer.data(), static_cast<int>(answer.size()));
        res_nclose(&state);
        if (len < 0 || remaining_ms(deadline) == 0) return {};
        answer.resize(static_cast<std::size_t>(len));
        return answer;
    }

    std::vector<IpAddress> query_addresses(const std::string& name, Clock::time_point deadline) {
        std::vector<IpAddress> out;
        for (int type : {ns_t_a, ns_t_aaaa}) {
            const auto answer = raw_query(name, type, deadline);
            ns_msg msg;
            if (answer.empty() || ns_initparse(answer.data(), static_cast<int>(answer.size()), &msg) != 0) continue;
            for (int i = 0; i < ns_msg_count(msg, ns_s_an); ++i) {
                ns_rr rr;
                if (ns_parserr(&msg, ns_s_an, i, &rr) != 0 || ns_rr_type(rr) != type) continue;
                char buf[INET6_ADDRSTRLEN];
                const int af = type == ns_t_a ? AF_INET : AF_INET6;
                if (inet_ntop(af, ns_rr_rdata(rr), buf, sizeof buf)) {
                    if (auto ip = IpAddress::parse(buf)) out.push_back(*ip);
                }
            }
        }
        return out;
    }

    std::vector<std::string> query_names(const std::string& name, int type, Clock::time_point deadline) {
        std::vector<std::string> out;
        const auto answer = raw_query(name, type, deadline);
        ns_msg msg;
        if (answer.empty() || ns_initparse(answer.data(), static_cast<int>(answer.size()), &msg) != 0) return out;
        for (int i = 0; i < ns_msg_count(msg, ns_s_an); ++i) {
            ns_rr rr;
            if (ns_parserr(&msg, ns_s_an, i, &rr) != 0 || ns_rr_type(rr) != type) continue;
            char buf[NS_MAXDNAME];
            if (ns_name_uncompress(ns_msg_base(msg), ns_msg_end(msg), ns_rr_rdata(rr), buf, sizeof buf) >= 0) {
                out.push_back(to_lower(buf));
            }
        }
        return out;
    }

    LiveTransportOptions options_;
    std::unique_ptr<SSL_CTX, SslCtxFree> ctx_;
};

}  // namespace

std::unique_ptr<Transport> make_live_transport(const LiveTransportOptions& options) {
    return std::make_unique<LiveTransport>(options);
}

}  // namespace triage
