#include "smarthouse/device_sim.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "smarthouse/text.hpp"

namespace smarthouse::sim {
namespace {

// The two statuses of a binary schema as (false, true).
std::pair<std::string, std::string> binary_statuses(StatusSchema schema) {
    switch (schema) {
        case StatusSchema::on_off: return {"off", "on"};
        case StatusSchema::presence: return {"absent", "present"};
        case StatusSchema::open_closed: return {"closed", "open"};
        case StatusSchema::leveled: break;
    }
    throw DispatchError(DispatchErrc::unknown_action, "leveled devices have no binary status");
}

}  // namespace

StatusValue default_status(StatusSchema schema) {
    if (schema == StatusSchema::leveled) return {"level", 0};
    return {binary_statuses(schema).first, std::nullopt};
}

StatusValue apply_action(StatusSchema schema, const StatusValue& current, std::string_view action,
                         std::string_view arg) {
    const auto descriptor = resolve_action(schema, action);
    if (!descriptor) throw DispatchError(DispatchErrc::unknown_action, "unknown action " + std::string(action));
    if (auto err = check_arg(descriptor->arg_kind, arg)) throw DispatchError(DispatchErrc::bad_arg, *err);

    if (schema == StatusSchema::leveled) return {"level", static_cast<int>(*text::parse_int(arg))};

    const auto [off, on] = binary_statuses(schema);
    if (action == "set") return {arg == "1" ? on : off, std::nullopt};
    if (action == "toggle") return {current.status == on ? off : on, std::nullopt};
    if (action == "set_on" || action == "open" || action == "appear") return {on, std::nullopt};
    return {off, std::nullopt};
}

LevelRamp::LevelRamp(SimTime start, int from_level, SimTime end, int to_level)
    : start_(start), end_(end), from_(std::clamp(from_level, 0, 100)), to_(std::clamp(to_level, 0, 100)) {
    if (end_ <= start_) throw std::invalid_argument("ramp end must follow start");
}

void LevelRamp::step(SimTime now, StatusValue& value) {
    int level;
    if (now <= start_) {
        level = from_;
    } else if (now >= end_) {
        level = to_;
    } else {
        const double f = static_cast<double>((now - start_).count()) / static_cast<double>((end_ - start_).count());
        level = static_cast<int>(std::lround(from_ + f * (to_ - from_)));
    }
    value.status = "level";
    value.level = level;
}

PeriodicToggle::PeriodicToggle(SimTime period, std::string first, std::string second)
    : period_(period), first_(std::move(first)), second_(std::move(second)) {
    if (period_.count() <= 0) throw std::invalid_argument("toggle period must be positive");
}

void PeriodicToggle::step(SimTime now, StatusValue& value) {
    value.status = (now.count() / period_.count()) % 2 == 0 ? first_ : second_;
    value.level.reset();
}

ScenarioError::ScenarioError(int line, const std::string& what)
    : std::runtime_error("scenario line " + std::to_string(line) + ": " + what), line_(line) {}

std::vector<ScenarioEvent> parse_scenario(std::string_view text) {
    std::vector<ScenarioEvent> events;
    int line_no = 0;
    for (auto raw : text::split(text, '\n')) {
        ++line_no;
        auto line = raw;
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.remove_suffix(1);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        if (line.empty() || line.front() == '#') continue;

        ScenarioEvent ev;
        bool have_t = false, have_oid = false;
        for (auto tok : text::split(line, ' ')) {
            if (tok.empty()) continue;
            const auto eq = tok.find('=');
            if (eq == std::string_view::npos) throw ScenarioError(line_no, "expected key=value");
            const auto key = tok.substr(0, eq);
            const auto val = tok.substr(eq + 1);
            if (key == "t") {
                double seconds = 0;
                const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), seconds);
                if (ec != std::errc{} || ptr != val.data() + val.size() || !(seconds >= 0) || seconds > 1e9)
                    throw ScenarioError(line_no, "bad time");
                ev.at = SimTime{static_cast<std::int64_t>(std::llround(seconds * 1000.0))};
                have_t = true;
            } else if (key == "oid") {
                const auto v = text::parse_int(val);
                if (!v || *v < 1) throw ScenarioError(line_no, "bad oid");
                ev.oid = *v;
                have_oid = true;
            } else if (key == "level") {
                const auto v = text::parse_int(val);
                if (!v || *v < 0 || *v > 100) throw ScenarioError(line_no, "level must be 0..100");
                ev.level = static_cast<int>(*v);
            } else if (key == "status") {
                if (!text::is_token(val)) throw ScenarioError(line_no, "bad status");
                ev.status = std::string(val);
            } else {
                throw ScenarioError(line_no, "unknown key " + std::string(key));
            }
        }
        if (!have_t || !have_oid) throw ScenarioError(line_no, "t= and oid= are required");
        if (ev.level.has_value() == ev.status.has_value()) throw ScenarioError(line_no, "exactly one of level=, status=");
        events.push_back(std::move(ev));
    }
    std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.at < b.at; });
    return events;
}

SimTime TierPeriods::for_tier(Criticality c) const {
    switch (c) {
        case Criticality::vital: return vital;
        case Criticality::security: return security;
        case Criticality::ambient: return ambient;
    }
    return ambient;
}

Fleet::Fleet(Store& store, TierPeriods periods) : store_(store), periods_(periods) {}

void Fleet::set_behavior(Oid oid, std::unique_ptr<Behavior> behavior) {
    if (auto* d = find(oid))
        d->behavior = std::move(behavior);
    else
        pending_behaviors_[oid] = std::move(behavior);
}

void Fleet::set_initial(Oid oid, StatusValue value) {
    if (auto* d = find(oid))
        d->value = std::move(value);
    else
        pending_initial_[oid] = std::move(value);
}

void Fleet::load_scenario(std::vector<ScenarioEvent> events) {
    std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) { return a.at < b.at; });
    scenario_ = std::move(events);
    scenario_pos_ = 0;
}

void Fleet::dispatch(Oid oid, std::string_view action, std::string_view arg) {
    const auto snap = store_.snapshot();
    const auto* device = snap->device(oid);
    if (!device) throw DispatchError(DispatchErrc::unknown_oid, "unknown oid " + std::to_string(oid));
    if (device->kind == DeviceKind::sensor) throw DispatchError(DispatchErrc::not_actuator, "not an actuator");
    const auto* cap = device->find_action(action);
    if (!cap) throw DispatchError(DispatchErrc::unknown_action, "device has no action " + std::string(action));
    if (auto err = check_arg(cap->arg_kind, arg)) throw DispatchError(DispatchErrc::bad_arg, *err);
    std::lock_guard lock(queue_mutex_);
    queue_.push_back({oid, std::string(action), std::string(arg)});
}

void Fleet::sync_registry() {
    const auto snap = store_.snapshot();
    for (auto it = devices_.begin(); it != devices_.end();) {
        if (!snap->devices.contains(it->first))
            it = devices_.erase(it);
        else
            ++it;
    }
    for (const auto& [oid, device] : snap->devices) {
        if (devices_.contains(oid)) continue;
        SimDevice d;
        d.device = device;
        if (auto it = pending_initial_.find(oid); it != pending_initial_.end()) {
            d.value = std::move(it->second);
            pending_initial_.erase(it);
        } else if (const auto* st = snap->state(oid)) {
            d.value = {st->status, st->level};
        } else {
            d.value = default_status(device.schema);
        }
        if (auto it = pending_behaviors_.find(oid); it != pending_behaviors_.end()) {
            d.behavior = std::move(it->second);
            pending_behaviors_.erase(it);
        } else {
            d.behavior = std::make_unique<CommandDriven>();
        }
        devices_.emplace(oid, std::move(d));
    }
}

Fleet::SimDevice* Fleet::find(Oid oid) {
    const auto it = devices_.find(oid);
    return it == devices_.end() ? nullptr : &it->second;
}

DeviceState Fleet::stamp(const SimDevice& d, SimTime now) const {
    return DeviceState{d.device.oid, d.value.status, d.value.level, now};
}

std::vector<DeviceState> Fleet::tick(SimTime now) {
    sync_registry();

    std::deque<Command> commands;
    {
        std::lock_guard lock(queue_mutex_);
        commands.swap(queue_);
    }
    std::set<Oid> changed;
    for (const auto& cmd : commands) {
        auto* d = find(cmd.oid);
        if (!d) {
            spdlog::warn("dropping command {} for removed oid {}", cmd.action, cmd.oid);
            continue;
        }
        try {
            d->value = apply_action(d->device.schema, d->value, cmd.action, cmd.arg);
            changed.insert(cmd.oid);
        } catch (const DispatchError& e) {
            spdlog::warn("command {} on oid {} failed: {}", cmd.action, cmd.oid, e.what());
        }
    }

    for (; scenario_pos_ < scenario_.size() && scenario_[scenario_pos_].at <= now; ++scenario_pos_) {
        const auto& ev = scenario_[scenario_pos_];
        auto* d = find(ev.oid);
        if (!d) {
            spdlog::warn("scenario event for unknown oid {}", ev.oid);
            continue;
        }
        StatusValue v = ev.level ? StatusValue{"level", ev.level} : StatusValue{*ev.status, std::nullopt};
        DeviceState probe{ev.oid, v.status, v.level, now};
        if (!validate_state(d->device, probe).empty()) {
            spdlog::warn("scenario value does not fit oid {}", ev.oid);
            continue;
        }
        d->value = std::move(v);
    }

    for (auto& [_, d] : devices_) d.behavior->step(now, d.value);

    std::vector<DeviceState> published;
    for (auto& [oid, d] : devices_) {
        const auto period = periods_.for_tier(d.device.criticality);
        const bool due = !d.last_poll || now - *d.last_poll >= period;
        if (due) {
            d.last_poll = now;
            ++d.polls;
        }
        if (due || changed.contains(oid)) published.push_back(stamp(d, now));
    }
    if (!published.empty()) store_.upsert_states(published);
    return published;
}

std::vector<DeviceState> Fleet::poll_due(SimTime now) {
    sync_registry();
    std::vector<DeviceState> published;
    for (auto& [_, d] : devices_) {
        const auto period = periods_.for_tier(d.device.criticality);
        if (d.last_poll && now - *d.last_poll < period) continue;
        d.behavior->step(now, d.value);
        d.last_poll = now;
        ++d.polls;
        published.push_back(stamp(d, now));
    }
    if (!published.empty()) store_.upsert_states(published);
    return published;
}

std::size_t Fleet::poll_count(Oid oid) const {
    const auto it = devices_.find(oid);
    return it == devices_.end() ? 0 : it->second.polls;
}

std::size_t Fleet::pending_commands() const {
    std::lock_guard lock(queue_mutex_);
    return queue_.size();
}

std::optional<StatusValue> Fleet::value(Oid oid) const {
    const auto it = devices_.find(oid);
    if (it == devices_.end()) return std::nullopt;
    return it->second.value;
}

}  // namespace smarthouse::sim
