#include "triage/ip.hpp"

#include <arpa/inet.h>

#include <charconv>
#include <cstring>

namespace triage {

std::optional<IpAddress> IpAddress::parse(std::string_view text) {
    if (text.empty() || text.size() >= INET6_ADDRSTRLEN) return std::nullopt;
    char buf[INET6_ADDRSTRLEN];
    std::memcpy(buf, text.data(), text.size());
    buf[text.size()] = '\0';

    IpAddress ip;
    if (text.find(':') == std::string_view::npos) {
        in_addr a{};
        if (inet_pton(AF_INET, buf, &a) != 1) return std::nullopt;
        ip.family_ = Family::v4;
        std::memcpy(ip.bytes_.data(), &a, 4);
    } else {
        in6_addr a{};
        if (inet_pton(AF_INET6, buf, &a) != 1) return std::nullopt;
        ip.family_ = Family::v6;
        std::memcpy(ip.bytes_.data(), &a, 16);
    }
    return ip;
}

IpAddress IpAddress::v4(std::uint32_t host_order) {
    IpAddress ip;
    ip.bytes_[0] = static_cast<std::uint8_t>(host_order >> 24);
    ip.bytes_[1] = static_cast<std::uint8_t>(host_order >> 16);
    ip.bytes_[2] = static_cast<std::uint8_t>(host_order >> 8);
    ip.bytes_[3] = static_cast<std::uint8_t>(host_order);
    return ip;
}

IpAddress IpAddress::masked(unsigned prefix_len) const {
    IpAddress out = *this;
    const unsigned width = bit_width();
    for (unsigned i = prefix_len; i < width; ++i) {
        out.bytes_[i / 8] &= static_cast<std::uint8_t>(~(0x80u >> (i % 8)));
    }
    return out;
}

bool IpAddress::bit(unsigned index) const { return (bytes_[index / 8] >> (7 - index % 8)) & 1u; }

std::string IpAddress::to_string() const {
    char buf[INET6_ADDRSTRLEN];
    if (is_v4()) {
        inet_ntop(AF_INET, bytes_.data(), buf, sizeof buf);
    } else {
        inet_ntop(AF_INET6, bytes_.data(), buf, sizeof buf);
    }
    return buf;
}

std::optional<IpPrefix> IpPrefix::parse(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return std::nullopt;
    auto ip = IpAddress::parse(text.substr(0, slash));
    if (!ip) return std::nullopt;
    unsigned len = 0;
    const auto tail = text.substr(slash + 1);
    const auto r = std::from_chars(tail.data(), tail.data() + tail.size(), len);
    if (r.ec != std::errc{} || r.ptr != tail.data() + tail.size() || len > ip->bit_width()) return std::nullopt;
    if (ip->masked(len) != *ip) return std::nullopt;
    return IpPrefix{*ip, len};
}

bool IpPrefix::contains(const IpAddress& ip) const {
    return ip.family() == network.family() && ip.masked(length) == network;
}

std::string IpPrefix::to_string() const { return network.to_string() + "/" + std::to_string(length); }

std::size_t IpAddressHash::operator()(const IpAddress& ip) const noexcept {
    std::uint64_t h = 1469598103934665603ull ^ static_cast<std::uint64_t>(ip.family());
    for (auto b : ip.bytes()) {
        h ^= b;
        h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
}

}  // namespace triage
