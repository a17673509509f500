#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace triage {

/// Class order is fixed alphabetically; probability vectors and argmax
/// tie-breaks follow it.
enum class Label : std::uint8_t { disinformation = 0, news = 1, other = 2 };

inline constexpr std::size_t kClassCount = 3;
inline constexpr std::array<Label, kClassCount> kClassOrder{Label::disinformation, Label::news,
                                                            Label::other};

using ClassCounts = std::array<std::uint32_t, kClassCount>;
using ClassProbabilities = std::array<double, kClassCount>;

constexpr std::size_t index_of(Label l) { return static_cast<std::size_t>(l); }

std::string_view to_string(Label l);
std::optional<Label> parse_label(std::string_view text);

/// First maximal entry wins.
Label argmax(const ClassProbabilities& p);

}  // namespace triage
