#include "smarthouse/wire.hpp"

#include <algorithm>
#include <array>

#include "smarthouse/auth.hpp"
#include "smarthouse/map_codec.hpp"
#include "smarthouse/records.hpp"
#include "smarthouse/text.hpp"

namespace smarthouse::wire {
namespace {

struct SmsOp {
    std::string_view op;
    std::string_view path;
    std::vector<std::string_view> args;
};

const std::array<SmsOp, 5>& sms_ops() {
    static const std::array<SmsOp, 5> ops{{
        {"cmd", "/m/command", {"oid", "action", "arg"}},
        {"sp", "/m/schedule_put", {"id", "name", "oid", "action", "arg", "when", "criteria", "enabled"}},
        {"se", "/m/schedule_enable", {"id", "enabled"}},
        {"rp", "/m/rule_put", {"id", "name", "conditions", "actions", "enabled"}},
        {"re", "/m/rule_enable", {"id", "enabled"}},
    }};
    return ops;
}

bool is_upper_code(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

std::optional<std::string> check_lines(const std::vector<std::string>& lines, auto&& parse_one, const char* what) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
        try {
            parse_one(lines[i]);
        } catch (const std::exception& e) {
            return std::string(what) + " line " + std::to_string(i + 2) + ": " + e.what();
        }
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> WireRequest::get(std::string_view key) const {
    for (const auto& [k, v] : params)
        if (k == key) return v;
    return std::nullopt;
}

WireRequest& WireRequest::set(std::string key, std::string value) {
    for (auto& [k, v] : params) {
        if (k == key) {
            v = std::move(value);
            return *this;
        }
    }
    params.emplace_back(std::move(key), std::move(value));
    return *this;
}

WireRequest parse_target(std::string_view target) {
    WireRequest req;
    const auto q = target.find('?');
    auto path = text::unescape(target.substr(0, q));
    if (!path) throw WireError("bad escape in path");
    req.path = std::move(*path);
    if (q == std::string_view::npos) return req;
    for (auto pair : text::split(target.substr(q + 1), '&')) {
        if (pair.empty()) continue;
        const auto eq = pair.find('=');
        auto key = text::unescape(pair.substr(0, eq));
        auto value = text::unescape(eq == std::string_view::npos ? std::string_view{} : pair.substr(eq + 1));
        if (!key || !value) throw WireError("bad escape in query");
        req.params.emplace_back(std::move(*key), std::move(*value));
    }
    return req;
}

std::string format_target(const WireRequest& req) {
    std::string out = req.path;
    char sep = '?';
    for (const auto& [k, v] : req.params) {
        out.push_back(sep);
        out += text::escape(k);
        out.push_back('=');
        out += text::escape(v);
        sep = '&';
    }
    return out;
}

std::string WireResponse::render() const {
    std::string out = ok ? "OK" : "ERR " + error;
    out.push_back('\n');
    for (const auto& line : lines) {
        out += line;
        out.push_back('\n');
    }
    return out;
}

WireResponse parse_response(std::string_view text) {
    if (text.empty() || text.back() != '\n') throw WireError("response must end with a newline");
    const auto lines = text::split(text.substr(0, text.size() - 1), '\n');
    WireResponse resp;
    const auto status = lines[0];
    if (status == "OK") {
        resp.ok = true;
    } else if (status.starts_with("ERR ")) {
        resp.ok = false;
        resp.error = std::string(status.substr(4));
        const auto parts = text::split(resp.error, ' ');
        if (parts.size() > 2 || !is_upper_code(parts[0]) || (parts.size() == 2 && !text::is_token(parts[1])))
            throw WireError("malformed error code");
    } else {
        throw WireError("status line must be OK or ERR <code>");
    }
    for (std::size_t i = 1; i < lines.size(); ++i) resp.lines.emplace_back(lines[i]);
    if (!resp.ok && !resp.lines.empty()) throw WireError("error responses carry no body");
    return resp;
}

std::optional<std::string> check_response(std::string_view path, std::string_view text) {
    WireResponse resp;
    try {
        resp = parse_response(text);
    } catch (const WireError& e) {
        return std::string(e.what());
    }
    if (!resp.ok) return std::nullopt;

    if (path == "/m/handshake") {
        if (resp.lines.size() != 1 || !auth::is_magic_hex(resp.lines[0])) return "handshake body must be one magic";
        return std::nullopt;
    }
    if (path == "/m/login" || path == "/m/command" || path == "/m/schedule_put" || path == "/m/schedule_enable" ||
        path == "/m/rule_put" || path == "/m/rule_enable") {
        if (!resp.lines.empty()) return "acknowledge carries no body";
        return std::nullopt;
    }
    if (path == "/m/devices") return check_lines(resp.lines, records::parse_device, "device");
    if (path == "/m/schedules") return check_lines(resp.lines, records::parse_schedule, "schedule");
    if (path == "/m/rules") return check_lines(resp.lines, records::parse_rule, "rule");
    if (path == "/m/state") {
        if (resp.lines.empty() || resp.lines[0] != "#STATES") return "state body must start with #STATES";
        std::size_t i = 1;
        for (; i < resp.lines.size() && resp.lines[i] != "#WALLS"; ++i) {
            try {
                records::parse_state(resp.lines[i]);
            } catch (const std::exception& e) {
                return "state line " + std::to_string(i + 2) + ": " + e.what();
            }
        }
        std::vector<std::string_view> scene(resp.lines.begin() + static_cast<std::ptrdiff_t>(i), resp.lines.end());
        try {
            map::decode_scene_lines(scene, static_cast<int>(i) + 2);
        } catch (const map::CodecError& e) {
            return std::string(e.what());
        }
        return std::nullopt;
    }
    return "OK for unknown path";
}

std::string sms_encode(const WireRequest& req) {
    const auto& ops = sms_ops();
    const auto it = std::find_if(ops.begin(), ops.end(), [&](const SmsOp& op) { return op.path == req.path; });
    if (it == ops.end()) throw SmsError(SmsErrc::not_mutating, "only mutating operations travel by SMS");
    std::string frame = "S";
    auto field = [&](std::string_view key) {
        frame.push_back('|');
        frame += text::escape(req.get(key).value_or(""));
    };
    field("c");
    field("u");
    field("h");
    frame.push_back('|');
    frame += it->op;
    for (auto key : it->args) field(key);
    if (frame.size() > kSmsMaxChars)
        throw SmsError(SmsErrc::too_large, "frame too large (" + std::to_string(frame.size()) + " > 160 chars)");
    return frame;
}

WireRequest sms_decode(std::string_view frame) {
    if (frame.size() > kSmsMaxChars) throw SmsError(SmsErrc::too_large, "frame too large");
    const auto fields = text::split(frame, '|');
    if (fields.size() < 5 || fields[0] != "S") throw SmsError(SmsErrc::malformed, "not an SMS frame");
    const auto& ops = sms_ops();
    const auto it = std::find_if(ops.begin(), ops.end(), [&](const SmsOp& op) { return op.op == fields[4]; });
    if (it == ops.end()) throw SmsError(SmsErrc::malformed, "unknown SMS op");
    if (fields.size() != 5 + it->args.size()) throw SmsError(SmsErrc::malformed, "wrong SMS field count");

    WireRequest req;
    req.path = std::string(it->path);
    auto put = [&](std::string_view key, std::string_view raw) {
        auto v = text::unescape(raw);
        if (!v) throw SmsError(SmsErrc::malformed, "bad escape in SMS field");
        req.params.emplace_back(std::string(key), std::move(*v));
    };
    put("c", fields[1]);
    put("u", fields[2]);
    put("h", fields[3]);
    for (std::size_t i = 0; i < it->args.size(); ++i) put(it->args[i], fields[5 + i]);
    return req;
}

}  // namespace smarthouse::wire
