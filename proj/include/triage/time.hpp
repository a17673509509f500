#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace triage {

using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

/// Parses `YYYY-MM-DD`, `YYYY-MM-DDTHH:MM:SS[.frac][Z|+HH:MM]` and the
/// space-separated variant. Returns nullopt on anything else.
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// Canonical `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_iso8601(Timestamp ts);
std::string format_date(Date d);

/// Whole days from `from` to `to`, floored (negative when `to` precedes `from`).
std::int64_t floor_days(Timestamp from, Timestamp to);

Timestamp now_utc();

}  // namespace triage
