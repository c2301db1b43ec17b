#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace smarthouse::wire {

class WireError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct WireRequest {
    std::string path;
    std::vector<std::pair<std::string, std::string>> params;  // decoded, in arrival order

    /// First value for `key`.
    std::optional<std::string> get(std::string_view key) const;
    WireRequest& set(std::string key, std::string value);

    friend bool operator==(const WireRequest&, const WireRequest&) = default;
};

/// Parses "/path?k=v&k2=v2". `+` is taken literally; only %XX is decoded.
/// Throws WireError on bad escapes.
WireRequest parse_target(std::string_view target);
std::string format_target(const WireRequest& req);

struct WireResponse {
    bool ok = true;
    std::string error;                // e.g. "AUTH" or "PARAM u"; empty when ok
    std::vector<std::string> lines;   // body

    static WireResponse success(std::vector<std::string> body = {}) { return {true, {}, std::move(body)}; }
    static WireResponse failure(std::string code) { return {false, std::move(code), {}}; }

    std::string render() const;

    friend bool operator==(const WireResponse&, const WireResponse&) = default;
};

/// Parses a rendered response. Throws WireError when the status line is
/// neither `OK` nor `ERR <CODE>[ <arg>]`.
WireResponse parse_response(std::string_view text);

/// Re-parses a rendered response against the body grammar of `path`.
/// Returns a description of the first violation.
std::optional<std::string> check_response(std::string_view path, std::string_view text);

inline constexpr std::size_t kSmsMaxChars = 160;

enum class SmsErrc { too_large, malformed, not_mutating };

class SmsError : public std::runtime_error {
public:
    SmsError(SmsErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    SmsErrc code() const noexcept { return code_; }

private:
    SmsErrc code_;
};

/// Encodes a mutating request as `S|c|u|h|op|args...`. Throws SmsError.
std::string sms_encode(const WireRequest& req);
/// Rebuilds the equivalent GET request. Throws SmsError(malformed).
WireRequest sms_decode(std::string_view frame);

}  // namespace smarthouse::wire
