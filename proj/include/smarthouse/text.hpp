#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace smarthouse::text {

/// Percent-escapes every byte outside printable ASCII plus the field
/// separators `%`, `|`, `;`, `,`, `&`, `=`, `?`, `+`, `#`, `:` and space.
std::string escape(std::string_view raw);

/// Inverse of escape(). Returns nullopt on a dangling or non-hex `%` sequence.
std::optional<std::string> unescape(std::string_view escaped);

std::vector<std::string_view> split(std::string_view s, char sep);

std::optional<std::int64_t> parse_int(std::string_view s);

bool is_token(std::string_view s, std::size_t max_len = 32);

}  // namespace smarthouse::text
