#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace triage {

/// IPv4 or IPv6 address. IPv4 addresses are stored in the low 4 bytes of a
/// 16-byte buffer together with their family, so the two families never
/// compare equal.
class IpAddress {
public:
    enum class Family : std::uint8_t { v4, v6 };

    IpAddress() = default;

    static std::optional<IpAddress> parse(std::string_view text);
    static IpAddress v4(std::uint32_t host_order);

    Family family() const { return family_; }
    bool is_v4() const { return family_ == Family::v4; }
    /// 32 or 128.
    unsigned bit_width() const { return is_v4() ? 32 : 128; }
    const std::array<std::uint8_t, 16>& bytes() const { return bytes_; }

    /// Address with all bits past `prefix_len` cleared.
    IpAddress masked(unsigned prefix_len) const;
    bool bit(unsigned index) const;

    std::string to_string() const;

    auto operator<=>(const IpAddress&) const = default;

private:
    Family family_ = Family::v4;
    std::array<std::uint8_t, 16> bytes_{};  // network order; v4 uses bytes_[0..3]
};

struct IpPrefix {
    IpAddress network;
    unsigned length = 0;

    /// `a.b.c.d/len` or `v6/len`; host bits must be zero.
    static std::optional<IpPrefix> parse(std::string_view text);
    bool contains(const IpAddress& ip) const;
    std::string to_string() const;

    auto operator<=>(const IpPrefix&) const = default;
};

struct IpAddressHash {
    std::size_t operator()(const IpAddress& ip) const noexcept;
};

}  // namespace triage
