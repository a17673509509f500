#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace triage {

std::string to_lower(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);

/// Character length of the last `count` labels of a dot-split name,
/// including the dots between them.
std::size_t tail_length(const std::vector<std::string_view>& labels, std::size_t count);

bool icontains(std::string_view haystack, std::string_view needle);

/// Non-empty, non-comment (`#`) trimmed lines. Throws Error(io) when the file
/// cannot be opened.
std::vector<std::string> read_list_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace triage
