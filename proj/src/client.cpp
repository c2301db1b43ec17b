#include "smarthouse/client.hpp"

#include <algorithm>
#include <cstdlib>

#include "smarthouse/auth.hpp"
#include "smarthouse/home_server.hpp"
#include "smarthouse/records.hpp"
#include "smarthouse/text.hpp"

namespace smarthouse::client {
namespace {

wire::WireResponse parse_or_throw(const std::string& text) {
    try {
        return wire::parse_response(text);
    } catch (const wire::WireError& e) {
        throw NetworkError(std::string("malformed response: ") + e.what());
    }
}

[[noreturn]] void reject(const wire::WireResponse& resp) {
    if (resp.error == "AUTH") throw AuthRefused("server refused authentication");
    throw ValidationError("server rejected request: ERR " + resp.error);
}

}  // namespace

std::string LoopbackTransport::get(const std::string& target) {
    auto response = server_.handle_target(target);
    if (log_) {
        log_->push_back(target);
        log_->push_back(response);
    }
    return response;
}

std::string LoopbackTransport::sms(const std::string& frame) {
    auto response = server_.handle_sms(frame);
    if (log_) {
        log_->push_back(frame);
        log_->push_back(response);
    }
    return response;
}

std::chrono::milliseconds steady_now() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now().time_since_epoch());
}

ClientSession::ClientSession(Transport& transport, ClientConfig config, std::string password, ClientClock clock)
    : transport_(&transport), config_(std::move(config)), password_(std::move(password)), clock_(std::move(clock)) {}

ClientSession ClientSession::login(Transport& transport, ClientConfig config, std::string password, ClientClock clock) {
    if (!text::is_token(config.client_id, 32)) throw ValidationError("client id must be a short token");
    if (config.username.empty()) throw ValidationError("username required");
    ClientSession session(transport, std::move(config), std::move(password), std::move(clock));
    session.refresh_magic();
    return session;
}

void ClientSession::refresh_magic() {
    wire::WireRequest hs{"/m/handshake", {}};
    hs.set("c", config_.client_id).set("k", config_.special_code);
    const auto resp = parse_or_throw(transport_->get(wire::format_target(hs)));
    if (!resp.ok) throw AuthRefused("handshake refused");
    if (resp.lines.size() != 1 || !auth::is_magic_hex(resp.lines[0])) throw NetworkError("malformed handshake reply");
    magic_ = auth::unseal_magic(resp.lines[0], config_.shared_secret, config_.client_id);
    magic_obtained_ = clock_();
    const auto ack = send_once(authed("/m/login"));
    if (!ack.ok) throw AuthRefused("login refused (credentials or shared secret)");
}

wire::WireRequest ClientSession::authed(std::string path) const { return wire::WireRequest{std::move(path), {}}; }

wire::WireResponse ClientSession::send_once(const wire::WireRequest& request) {
    auto req = request;
    req.set("c", config_.client_id);
    req.set("u", config_.username);
    req.set("h", auth::compute_credential_hash(config_.username, password_, magic_));
    return parse_or_throw(transport_->get(wire::format_target(req)));
}

wire::WireResponse ClientSession::call(const wire::WireRequest& request) {
    auto resp = send_once(request);
    if (!resp.ok && resp.error == "AUTH") {
        refresh_magic();
        resp = send_once(request);
    }
    if (!resp.ok) reject(resp);
    return resp;
}

void ClientSession::update_devices_data() {
    const auto resp = call(authed("/m/devices"));
    std::vector<Device> devices;
    try {
        for (const auto& line : resp.lines) devices.push_back(records::parse_device(line));
    } catch (const records::RecordError& e) {
        throw NetworkError(std::string("malformed device line: ") + e.what());
    }
    devices_ = std::move(devices);
    devices_fetched_ = clock_();
}

void ClientSession::update_information() {
    const auto resp = call(authed("/m/state"));
    if (resp.lines.empty() || resp.lines[0] != "#STATES") throw NetworkError("malformed state reply");
    std::vector<DeviceState> states;
    std::size_t i = 1;
    try {
        for (; i < resp.lines.size() && resp.lines[i] != "#WALLS"; ++i) states.push_back(records::parse_state(resp.lines[i]));
        std::vector<std::string_view> block(resp.lines.begin() + static_cast<std::ptrdiff_t>(i), resp.lines.end());
        scene_ = map::decode_scene_lines(block);
    } catch (const std::exception& e) {
        throw NetworkError(std::string("malformed state reply: ") + e.what());
    }
    states_ = std::move(states);
    state_fetched_ = clock_();
}

bool ClientSession::ensure_fresh() {
    if (state_fetched_ && clock_() - *state_fetched_ <= config_.staleness) return false;
    update_information();
    return true;
}

const Device* ClientSession::device(Oid oid) const {
    const auto it = std::find_if(devices_.begin(), devices_.end(), [oid](const Device& d) { return d.oid == oid; });
    return it == devices_.end() ? nullptr : &*it;
}

const DeviceState* ClientSession::state(Oid oid) const {
    const auto it = std::find_if(states_.begin(), states_.end(), [oid](const DeviceState& s) { return s.oid == oid; });
    return it == states_.end() ? nullptr : &*it;
}

std::optional<std::chrono::milliseconds> ClientSession::devices_age() const {
    if (!devices_fetched_) return std::nullopt;
    return clock_() - *devices_fetched_;
}

std::optional<std::chrono::milliseconds> ClientSession::state_age() const {
    if (!state_fetched_) return std::nullopt;
    return clock_() - *state_fetched_;
}

void ClientSession::check_action(const ActionCall& call) const {
    const auto* d = device(call.oid);
    if (!d) throw ValidationError("unknown device " + std::to_string(call.oid) + " (try updating device data)");
    if (d->kind == DeviceKind::sensor) throw ValidationError("device " + std::to_string(call.oid) + " is not an actuator");
    const auto* cap = d->find_action(call.action);
    if (!cap) throw ValidationError("device " + std::to_string(call.oid) + " has no action " + call.action);
    if (auto err = check_arg(cap->arg_kind, call.arg)) throw ValidationError(*err);
}

void ClientSession::check_condition(const Condition& cond) const {
    const auto* d = device(cond.oid);
    if (!d) throw ValidationError("condition on unknown device " + std::to_string(cond.oid));
    if (cond.field == ConditionField::level) {
        if (d->schema != StatusSchema::leveled) throw ValidationError("level condition on a non-leveled device");
    } else {
        const auto* status = std::get_if<std::string>(&cond.operand);
        if (!status || !is_valid_status(d->schema, *status)) throw ValidationError("status not valid for device");
    }
}

void ClientSession::command(Oid oid, std::string_view action, std::string_view arg) {
    if (!devices_fetched_) update_devices_data();
    const ActionCall c{oid, std::string(action), std::string(arg)};
    check_action(c);
    wire::WireRequest req = authed("/m/command");
    req.set("oid", std::to_string(oid)).set("action", c.action).set("arg", c.arg);
    call(req);
}

wire::WireRequest schedule_request(const ScheduledTask& task) {
    wire::WireRequest req{"/m/schedule_put", {}};
    req.set("id", task.id)
        .set("name", task.name)
        .set("oid", std::to_string(task.action.oid))
        .set("action", task.action.action)
        .set("arg", task.action.arg)
        .set("when", records::format_when(task.when))
        .set("criteria", records::format_conditions(task.criteria))
        .set("enabled", task.enabled ? "1" : "0");
    return req;
}

wire::WireRequest rule_request(const Rule& rule) {
    wire::WireRequest req{"/m/rule_put", {}};
    req.set("id", rule.id)
        .set("name", rule.name)
        .set("conditions", records::format_conditions(rule.conditions))
        .set("actions", records::format_action_calls(rule.actions))
        .set("enabled", rule.enabled ? "1" : "0");
    return req;
}

void ClientSession::define_schedule(const ScheduledTask& task) {
    if (!is_valid_record_id(task.id)) throw ValidationError("schedule id must be a short token");
    if (!devices_fetched_) update_devices_data();
    check_action(task.action);
    for (const auto& c : task.criteria) check_condition(c);
    call(schedule_request(task));
    const auto listed = list_schedules();
    const auto it = std::find_if(listed.begin(), listed.end(), [&](const ScheduledTask& t) { return t.id == task.id; });
    if (it == listed.end()) throw ValidationError("server did not confirm schedule " + task.id);
    auto confirmed = *it;
    confirmed.enabled = task.enabled;  // a "now" task may already have fired
    if (!(confirmed == task)) throw ValidationError("server holds a different schedule " + task.id);
}

std::vector<ScheduledTask> ClientSession::list_schedules() {
    const auto resp = call(authed("/m/schedules"));
    std::vector<ScheduledTask> out;
    try {
        for (const auto& line : resp.lines) out.push_back(records::parse_schedule(line));
    } catch (const records::RecordError& e) {
        throw NetworkError(std::string("malformed schedule line: ") + e.what());
    }
    return out;
}

void ClientSession::set_schedule_enabled(std::string_view id, bool enabled) {
    auto req = authed("/m/schedule_enable");
    req.set("id", std::string(id)).set("enabled", enabled ? "1" : "0");
    call(req);
}

void ClientSession::define_rule(const Rule& rule) {
    if (!is_valid_record_id(rule.id)) throw ValidationError("rule id must be a short token");
    if (rule.conditions.empty() || rule.actions.empty()) throw ValidationError("rule needs conditions and actions");
    if (!devices_fetched_) update_devices_data();
    for (const auto& c : rule.conditions) check_condition(c);
    for (const auto& a : rule.actions) check_action(a);
    call(rule_request(rule));
    const auto listed = list_rules();
    const auto it = std::find_if(listed.begin(), listed.end(), [&](const Rule& r) { return r.id == rule.id; });
    if (it == listed.end() || !(*it == rule)) throw ValidationError("server did not confirm rule " + rule.id);
}

std::vector<Rule> ClientSession::list_rules() {
    const auto resp = call(authed("/m/rules"));
    std::vector<Rule> out;
    try {
        for (const auto& line : resp.lines) out.push_back(records::parse_rule(line));
    } catch (const records::RecordError& e) {
        throw NetworkError(std::string("malformed rule line: ") + e.what());
    }
    return out;
}

void ClientSession::set_rule_enabled(std::string_view id, bool enabled) {
    auto req = authed("/m/rule_enable");
    req.set("id", std::string(id)).set("enabled", enabled ? "1" : "0");
    call(req);
}

void ClientSession::send_sms(const wire::WireRequest& request) {
    auto req = request;
    req.set("c", config_.client_id);
    req.set("u", config_.username);
    req.set("h", auth::compute_credential_hash(config_.username, password_, magic_));
    std::string frame;
    try {
        frame = wire::sms_encode(req);
    } catch (const wire::SmsError& e) {
        throw ValidationError(std::string(e.what()) + "; shorten the name or criteria");
    }
    const auto resp = parse_or_throw(transport_->sms(frame));
    if (!resp.ok) reject(resp);
}

void ClientSession::sms_command(Oid oid, std::string_view action, std::string_view arg) {
    if (!devices_fetched_) update_devices_data();
    const ActionCall c{oid, std::string(action), std::string(arg)};
    check_action(c);
    wire::WireRequest req{"/m/command", {}};
    req.set("oid", std::to_string(oid)).set("action", c.action).set("arg", c.arg);
    send_sms(req);
}

void ClientSession::sms_define_schedule(const ScheduledTask& task) {
    if (!is_valid_record_id(task.id)) throw ValidationError("schedule id must be a short token");
    if (!devices_fetched_) update_devices_data();
    check_action(task.action);
    for (const auto& c : task.criteria) check_condition(c);
    send_sms(schedule_request(task));
}

void ClientSession::sms_set_schedule_enabled(std::string_view id, bool enabled) {
    wire::WireRequest req{"/m/schedule_enable", {}};
    req.set("id", std::string(id)).set("enabled", enabled ? "1" : "0");
    send_sms(req);
}

void ClientSession::sms_define_rule(const Rule& rule) {
    if (!is_valid_record_id(rule.id)) throw ValidationError("rule id must be a short token");
    if (!devices_fetched_) update_devices_data();
    for (const auto& c : rule.conditions) check_condition(c);
    for (const auto& a : rule.actions) check_action(a);
    send_sms(rule_request(rule));
}

void ClientSession::sms_set_rule_enabled(std::string_view id, bool enabled) {
    wire::WireRequest req{"/m/rule_enable", {}};
    req.set("id", std::string(id)).set("enabled", enabled ? "1" : "0");
    send_sms(req);
}

std::string render_ascii(const map::MapScene& scene, int cols, int rows) {
    cols = std::max(cols, 2);
    rows = std::max(rows, 2);
    std::vector<std::string> grid(static_cast<std::size_t>(rows), std::string(static_cast<std::size_t>(cols), ' '));
    auto to_cell = [&](map::Point p) {
        const auto cx = std::clamp<std::int64_t>(static_cast<std::int64_t>(p.x) * (cols - 1) / map::kCanvasSize, 0, cols - 1);
        const auto cy = std::clamp<std::int64_t>(static_cast<std::int64_t>(p.y) * (rows - 1) / map::kCanvasSize, 0, rows - 1);
        return std::pair<int, int>{static_cast<int>(cx), static_cast<int>(cy)};
    };
    auto plot = [&](int x, int y, char c) { grid[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] = c; };

    for (const auto& wall : scene.walls) {
        for (std::size_t i = 0; i + 1 < wall.points.size(); ++i) {
            auto [x0, y0] = to_cell(wall.points[i]);
            const auto [x1, y1] = to_cell(wall.points[i + 1]);
            const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
            const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
            int err = dx + dy;
            while (true) {
                plot(x0, y0, '#');
                if (x0 == x1 && y0 == y1) break;
                const int e2 = 2 * err;
                if (e2 >= dy) { err += dy; x0 += sx; }
                if (e2 <= dx) { err += dx; y0 += sy; }
            }
        }
    }

    std::string legend;
    char next = 'A';
    for (const auto& icon : scene.icons) {
        const char mark = icon.oid == 0 ? '*' : next;
        if (icon.oid != 0) next = next == 'Z' ? 'a' : (next == 'z' ? 'A' : static_cast<char>(next + 1));
        const auto [x, y] = to_cell(icon.position);
        plot(x, y, mark);
        legend += std::string(1, mark) + " oid=" + std::to_string(icon.oid) + " " + icon.name + " (" +
                  std::to_string(icon.position.x) + "," + std::to_string(icon.position.y) + ") icon=" +
                  std::to_string(icon.icon_id) + "\n";
    }

    std::string out;
    for (const auto& row : grid) {
        auto trimmed = row;
        while (!trimmed.empty() && trimmed.back() == ' ') trimmed.pop_back();
        out += trimmed + "\n";
    }
    return out + legend;
}

}  // namespace smarthouse::client
