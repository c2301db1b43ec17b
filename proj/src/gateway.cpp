#include "smarthouse/gateway.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>

#include "smarthouse/device_sim.hpp"
#include "smarthouse/records.hpp"
#include "smarthouse/text.hpp"

namespace smarthouse {
namespace {

using wire::WireRequest;
using wire::WireResponse;

struct ParamError {
    std::string name;
};

std::string required(const WireRequest& req, std::string_view name) {
    auto v = req.get(name);
    if (!v) throw ParamError{std::string(name)};
    return std::move(*v);
}

Oid oid_param(const WireRequest& req) {
    const auto v = text::parse_int(required(req, "oid"));
    if (!v || *v < 1) throw ParamError{"oid"};
    return *v;
}

bool enabled_param(const WireRequest& req) {
    const auto v = required(req, "enabled");
    if (v == "1") return true;
    if (v == "0") return false;
    throw ParamError{"enabled"};
}

template <typename Fn>
auto parsed(const char* name, Fn&& fn) {
    try {
        return fn();
    } catch (const records::RecordError&) {
        throw ParamError{name};
    }
}

WireResponse store_failure(const StoreError& e) {
    switch (e.code()) {
        case StoreErrc::unknown_oid: return WireResponse::failure("OID");
        case StoreErrc::unknown_id: return WireResponse::failure("ID");
        default: return WireResponse::failure("INVALID");
    }
}

}  // namespace

std::vector<std::string> devices_payload(const Snapshot& snap) {
    std::vector<std::string> lines;
    lines.reserve(snap.devices.size());
    for (const auto& [_, d] : snap.devices) lines.push_back(records::format_device(d));
    return lines;
}

map::MapScene live_scene(const Snapshot& snap) {
    auto scene = snap.scene;
    for (auto& icon : scene.icons) {
        if (icon.oid == 0) continue;
        const auto* device = snap.device(icon.oid);
        const auto* state = snap.state(icon.oid);
        if (!device || !state) continue;
        try {
            icon.icon_id = map::icon_for(device->schema, *state);
        } catch (const std::invalid_argument&) {
        }
    }
    return scene;
}

std::vector<std::string> state_and_map_payload(const Snapshot& snap) {
    std::vector<std::string> lines{"#STATES"};
    for (const auto& [_, s] : snap.states) lines.push_back(records::format_state(s));
    const auto block = map::encode_scene(live_scene(snap));
    for (auto line : text::split(std::string_view(block).substr(0, block.size() - 1), '\n'))
        lines.emplace_back(line);
    return lines;
}

Gateway::Gateway(Store& store, auth::AuthService& auth, CommandSink sink)
    : store_(store), auth_(auth), sink_(std::move(sink)) {}

WireResponse Gateway::handle(const WireRequest& request, SimTime now) {
    auto response = respond(request, now);
    if (observer_) observer_(wire::format_target(request), response.render());
    return response;
}

WireResponse Gateway::respond(const WireRequest& request, SimTime now) {
    try {
        return dispatch(request, now);
    } catch (const ParamError& e) {
        return WireResponse::failure("PARAM " + e.name);
    } catch (const StoreError& e) {
        return store_failure(e);
    } catch (const std::exception& e) {
        spdlog::error("request {} failed: {}", request.path, e.what());
        return WireResponse::failure("INTERNAL");
    }
}

std::string Gateway::handle_target(std::string_view target, SimTime now) {
    WireRequest request;
    try {
        request = wire::parse_target(target);
    } catch (const wire::WireError&) {
        return record(target, WireResponse::failure("PARAM query"));
    }
    return handle(request, now).render();
}

std::string Gateway::handle_sms(std::string_view frame, SimTime now) {
    WireRequest request;
    try {
        request = wire::sms_decode(frame);
    } catch (const wire::SmsError&) {
        return record(frame, WireResponse::failure("SMS"));
    }
    return record(frame, respond(request, now));
}

std::string Gateway::record(std::string_view request, const WireResponse& response) {
    auto text = response.render();
    if (observer_) observer_(request, text);
    return text;
}

WireResponse Gateway::dispatch(const WireRequest& req, SimTime now) {
    const auto& path = req.path;
    if (path == "/m/handshake") {
        const auto client = required(req, "c");
        const auto code = required(req, "k");
        auto sealed = auth_.issue_magic(client, code, now);
        if (!sealed) return WireResponse::failure("AUTH");
        return WireResponse::success({std::move(*sealed)});
    }

    static const std::vector<std::string_view> known{
        "/m/login", "/m/devices", "/m/state", "/m/command", "/m/schedules", "/m/schedule_put",
        "/m/schedule_enable", "/m/rules", "/m/rule_put", "/m/rule_enable"};
    if (std::find(known.begin(), known.end(), path) == known.end()) return WireResponse::failure("PATH");

    const auto client = required(req, "c");
    const auto username = required(req, "u");
    const auto hash = required(req, "h");
    if (auth_.verify(client, username, hash, now) != auth::Verdict::allow) return WireResponse::failure("AUTH");

    const auto snap = store_.snapshot();
    const auto user_it = snap->users.find(username);
    if (user_it == snap->users.end()) return WireResponse::failure("AUTH");
    const User& user = user_it->second;

    if (path == "/m/login") return WireResponse::success();
    if (path == "/m/devices") return WireResponse::success(devices_payload(*snap));
    if (path == "/m/state") return WireResponse::success(state_and_map_payload(*snap));

    if (path == "/m/command") {
        const Oid oid = oid_param(req);
        const auto action = required(req, "action");
        const auto arg = req.get("arg").value_or("");
        if (!user.may_control(oid)) return WireResponse::failure("FORBIDDEN");
        try {
            sink_(oid, action, arg);
        } catch (const sim::DispatchError& e) {
            switch (e.code()) {
                case sim::DispatchErrc::unknown_oid: return WireResponse::failure("OID");
                case sim::DispatchErrc::not_actuator: return WireResponse::failure("ACTUATOR");
                case sim::DispatchErrc::unknown_action: return WireResponse::failure("ACTION");
                case sim::DispatchErrc::bad_arg: return WireResponse::failure("ARG");
            }
        }
        return WireResponse::success();
    }

    if (path == "/m/schedules") {
        std::vector<std::string> lines;
        for (const auto& [_, t] : snap->schedules) lines.push_back(records::format_schedule(t));
        return WireResponse::success(std::move(lines));
    }
    if (path == "/m/rules") {
        std::vector<std::string> lines;
        for (const auto& [_, r] : snap->rules) lines.push_back(records::format_rule(r));
        return WireResponse::success(std::move(lines));
    }

    if (path == "/m/schedule_put") {
        ScheduledTask task;
        task.id = required(req, "id");
        if (!is_valid_record_id(task.id)) throw ParamError{"id"};
        task.name = required(req, "name");
        task.action.oid = oid_param(req);
        task.action.action = required(req, "action");
        task.action.arg = req.get("arg").value_or("");
        const auto when = required(req, "when");
        task.when = parsed("when", [&] { return records::parse_when(when); });
        const auto criteria = req.get("criteria").value_or("");
        task.criteria = parsed("criteria", [&] { return records::parse_conditions(criteria); });
        task.enabled = req.get("enabled") ? enabled_param(req) : true;
        if (!user.may_control(task.action.oid)) return WireResponse::failure("FORBIDDEN");
        store_.put_schedule(std::move(task));
        return WireResponse::success();
    }
    if (path == "/m/schedule_enable") {
        const auto id = required(req, "id");
        const bool enabled = enabled_param(req);
        if (const auto it = snap->schedules.find(id); it != snap->schedules.end() && !user.may_control(it->second.action.oid))
            return WireResponse::failure("FORBIDDEN");
        store_.set_schedule_enabled(id, enabled);
        return WireResponse::success();
    }

    if (path == "/m/rule_put") {
        Rule rule;
        rule.id = required(req, "id");
        if (!is_valid_record_id(rule.id)) throw ParamError{"id"};
        rule.name = required(req, "name");
        const auto conditions = required(req, "conditions");
        rule.conditions = parsed("conditions", [&] { return records::parse_conditions(conditions); });
        const auto actions = required(req, "actions");
        rule.actions = parsed("actions", [&] { return records::parse_action_calls(actions); });
        rule.enabled = req.get("enabled") ? enabled_param(req) : true;
        for (const auto& a : rule.actions)
            if (!user.may_control(a.oid)) return WireResponse::failure("FORBIDDEN");
        store_.put_rule(std::move(rule));
        return WireResponse::success();
    }
    // /m/rule_enable
    const auto id = required(req, "id");
    const bool enabled = enabled_param(req);
    if (const auto it = snap->rules.find(id); it != snap->rules.end()) {
        for (const auto& a : it->second.actions)
            if (!user.may_control(a.oid)) return WireResponse::failure("FORBIDDEN");
    }
    store_.set_rule_enabled(id, enabled);
    return WireResponse::success();
}

}  // namespace smarthouse
