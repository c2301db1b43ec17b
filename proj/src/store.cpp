#include "smarthouse/store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "smarthouse/records.hpp"
#include "smarthouse/text.hpp"

namespace smarthouse {
namespace {

constexpr std::string_view kSections[] = {"#DEVICES", "#STATES", "#WALLS", "#ICONS", "#SCHEDULES", "#RULES", "#USERS"};

[[noreturn]] void fail(StoreErrc code, const std::string& msg, int line = 0) { throw StoreError(code, msg, line); }

void check_known(const Snapshot& snap, Oid oid) {
    if (!snap.device(oid)) fail(StoreErrc::unknown_oid, "unknown oid " + std::to_string(oid));
}

void check_schedule(const Snapshot& snap, const ScheduledTask& task) {
    if (!is_valid_record_id(task.id)) fail(StoreErrc::invalid, "bad schedule id");
    check_known(snap, task.action.oid);
    if (auto err = check_action_call(snap, task.action)) fail(StoreErrc::invalid, *err);
    for (const auto& c : task.criteria) {
        check_known(snap, c.oid);
        if (auto err = check_condition(snap, c)) fail(StoreErrc::invalid, *err);
    }
}

void check_rule(const Snapshot& snap, const Rule& rule) {
    if (!is_valid_record_id(rule.id)) fail(StoreErrc::invalid, "bad rule id");
    if (rule.conditions.empty()) fail(StoreErrc::invalid, "rule needs at least one condition");
    if (rule.actions.empty()) fail(StoreErrc::invalid, "rule needs at least one action");
    for (const auto& c : rule.conditions) {
        check_known(snap, c.oid);
        if (auto err = check_condition(snap, c)) fail(StoreErrc::invalid, *err);
    }
    for (const auto& a : rule.actions) {
        check_known(snap, a.oid);
        if (auto err = check_action_call(snap, a)) fail(StoreErrc::invalid, *err);
    }
}

void check_scene(const Snapshot& snap, const map::MapScene& scene) {
    for (const auto& wall : scene.walls) {
        if (wall.points.size() < 2) fail(StoreErrc::invalid, "wall needs two points");
        try {
            map::pack_header(wall.width, wall.color);
        } catch (const map::CodecError& e) {
            fail(StoreErrc::invalid, e.what());
        }
    }
    for (const auto& icon : scene.icons) {
        if (icon.oid < 0 || icon.icon_id < 0) fail(StoreErrc::invalid, "negative oid or icon id");
        if (icon.oid > 0 && !snap.device(icon.oid))
            fail(StoreErrc::unknown_oid, "icon references unknown oid " + std::to_string(icon.oid));
    }
}

void check_state(const Snapshot& snap, const DeviceState& state) {
    const auto* device = snap.device(state.oid);
    if (!device) fail(StoreErrc::unknown_oid, "unknown oid " + std::to_string(state.oid));
    if (auto v = validate_state(*device, state); !v.empty()) fail(StoreErrc::invalid, v.front());
    if (const auto* prev = snap.state(state.oid); prev && state.timestamp < prev->timestamp)
        fail(StoreErrc::stale_state, "state timestamp regresses for oid " + std::to_string(state.oid));
}

void check_device(const Snapshot& snap, const Device& device) {
    if (auto v = validate_device(device); !v.empty()) fail(StoreErrc::invalid, v.front());
    if (snap.devices.contains(device.oid)) fail(StoreErrc::duplicate_oid, "duplicate oid " + std::to_string(device.oid));
}

}  // namespace

StoreError::StoreError(StoreErrc code, const std::string& what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), code_(code), line_(line) {}

const Device* Snapshot::device(Oid oid) const {
    const auto it = devices.find(oid);
    return it == devices.end() ? nullptr : &it->second;
}

const DeviceState* Snapshot::state(Oid oid) const {
    const auto it = states.find(oid);
    return it == states.end() ? nullptr : &it->second;
}

bool Snapshot::same_tables(const Snapshot& o) const {
    return devices == o.devices && states == o.states && scene == o.scene && schedules == o.schedules &&
           rules == o.rules && users == o.users;
}

std::optional<std::string> check_condition(const Snapshot& snap, const Condition& cond) {
    const auto* device = snap.device(cond.oid);
    if (!device) return "condition references unknown oid " + std::to_string(cond.oid);
    if (cond.field == ConditionField::level) {
        if (device->schema != StatusSchema::leveled) return "level condition on a non-leveled device";
        if (!std::holds_alternative<std::int64_t>(cond.operand)) return "level condition needs an integer operand";
    } else {
        if (cond.comparator != Comparator::eq && cond.comparator != Comparator::ne)
            return "ordering comparator requires the level field";
        const auto* status = std::get_if<std::string>(&cond.operand);
        if (!status || !is_valid_status(device->schema, *status)) return "status operand not valid for device schema";
    }
    return std::nullopt;
}

std::optional<std::string> check_action_call(const Snapshot& snap, const ActionCall& call) {
    const auto* device = snap.device(call.oid);
    if (!device) return "action references unknown oid " + std::to_string(call.oid);
    const auto* cap = device->find_action(call.action);
    if (!cap) return "device " + std::to_string(call.oid) + " has no action " + call.action;
    return check_arg(cap->arg_kind, call.arg);
}

std::string serialize(const Snapshot& snap) {
    std::string out = "#DEVICES\n";
    for (const auto& [_, d] : snap.devices) out += records::format_device(d) + '\n';
    out += "#STATES\n";
    for (const auto& [_, s] : snap.states) out += records::format_state(s) + '\n';
    out += map::encode_scene(snap.scene);
    out += "#SCHEDULES\n";
    for (const auto& [_, t] : snap.schedules) out += records::format_schedule(t) + '\n';
    out += "#RULES\n";
    for (const auto& [_, r] : snap.rules) out += records::format_rule(r) + '\n';
    out += "#USERS\n";
    for (const auto& [_, u] : snap.users) out += records::format_user(u) + '\n';
    return out;
}

Snapshot deserialize(std::string_view text) {
    if (text.empty() || text.back() != '\n') fail(StoreErrc::parse, "store file must end with a newline",
                                                           static_cast<int>(std::count(text.begin(), text.end(), '\n')) + 1);
    const auto lines = text::split(text.substr(0, text.size() - 1), '\n');

    // Locate section headers in their fixed order.
    std::size_t header_at[std::size(kSections)];
    std::size_t next = 0;
    for (std::size_t s = 0; s < std::size(kSections); ++s) {
        // Content lines never start with '#', so every '#' line must be the next header.
        while (next < lines.size() && lines[next] != kSections[s]) {
            if (s == 0 || lines[next].starts_with('#'))
                fail(StoreErrc::parse, "expected " + std::string(kSections[s]), static_cast<int>(next) + 1);
            ++next;
        }
        if (next == lines.size()) fail(StoreErrc::parse, "missing section " + std::string(kSections[s]),
                                       static_cast<int>(lines.size()) + 1);
        header_at[s] = next++;
    }

    Snapshot snap;
    auto section = [&](std::size_t s, auto&& each) {
        const std::size_t end = s + 1 < std::size(kSections) ? header_at[s + 1] : lines.size();
        for (std::size_t i = header_at[s] + 1; i < end; ++i) {
            const int line_no = static_cast<int>(i) + 1;
            try {
                each(lines[i]);
            } catch (const records::RecordError& e) {
                fail(StoreErrc::parse, e.what(), line_no);
            } catch (const StoreError& e) {
                fail(e.code(), e.what(), line_no);
            }
        }
    };

    section(0, [&](std::string_view line) {
        auto d = records::parse_device(line);
        check_device(snap, d);
        snap.devices.emplace(d.oid, std::move(d));
    });
    section(1, [&](std::string_view line) {
        auto s = records::parse_state(line);
        if (snap.states.contains(s.oid)) fail(StoreErrc::invalid, "duplicate state for oid " + std::to_string(s.oid));
        check_state(snap, s);
        snap.states.emplace(s.oid, std::move(s));
    });
    {
        std::vector<std::string_view> scene_lines(lines.begin() + static_cast<std::ptrdiff_t>(header_at[2]),
                                                  lines.begin() + static_cast<std::ptrdiff_t>(header_at[4]));
        try {
            snap.scene = map::decode_scene_lines(scene_lines, static_cast<int>(header_at[2]) + 1);
        } catch (const map::CodecError& e) {
            fail(StoreErrc::parse, e.what(), e.line());
        }
        check_scene(snap, snap.scene);
    }
    section(4, [&](std::string_view line) {
        auto t = records::parse_schedule(line);
        check_schedule(snap, t);
        if (snap.schedules.contains(t.id)) fail(StoreErrc::invalid, "duplicate schedule id " + t.id);
        snap.schedules.emplace(t.id, std::move(t));
    });
    section(5, [&](std::string_view line) {
        auto r = records::parse_rule(line);
        check_rule(snap, r);
        if (snap.rules.contains(r.id)) fail(StoreErrc::invalid, "duplicate rule id " + r.id);
        snap.rules.emplace(r.id, std::move(r));
    });
    section(6, [&](std::string_view line) {
        auto u = records::parse_user(line);
        if (snap.users.contains(u.username)) fail(StoreErrc::invalid, "duplicate user " + u.username);
        snap.users.emplace(u.username, std::move(u));
    });
    return snap;
}

Store::Store() : current_(std::make_shared<const Snapshot>()) {}

Store::Store(Snapshot initial) {
    initial.revision = 0;
    current_ = std::make_shared<const Snapshot>(std::move(initial));
}

std::shared_ptr<const Snapshot> Store::snapshot() const {
    std::lock_guard lock(publish_mutex_);
    return current_;
}

template <typename Fn>
std::uint64_t Store::mutate(Fn&& fn) {
    std::lock_guard writer(write_mutex_);
    auto next = std::make_shared<Snapshot>(*snapshot());
    fn(*next);
    const auto revision = ++next->revision;
    std::lock_guard publish(publish_mutex_);
    current_ = std::move(next);
    return revision;
}

std::uint64_t Store::add_device(Device device) {
    return mutate([&](Snapshot& s) {
        check_device(s, device);
        s.devices.emplace(device.oid, std::move(device));
    });
}

std::uint64_t Store::remove_device(Oid oid) {
    return mutate([&](Snapshot& s) {
        if (!s.devices.contains(oid)) fail(StoreErrc::unknown_oid, "unknown oid " + std::to_string(oid));
        for (const auto& icon : s.scene.icons)
            if (icon.oid == oid) fail(StoreErrc::in_use, "device is placed on the map");
        auto refers = [oid](const std::vector<Condition>& cs) {
            for (const auto& c : cs)
                if (c.oid == oid) return true;
            return false;
        };
        for (const auto& [_, t] : s.schedules)
            if (t.action.oid == oid || refers(t.criteria)) fail(StoreErrc::in_use, "device used by schedule " + t.id);
        for (const auto& [_, r] : s.rules) {
            bool used = refers(r.conditions);
            for (const auto& a : r.actions) used = used || a.oid == oid;
            if (used) fail(StoreErrc::in_use, "device used by rule " + r.id);
        }
        s.states.erase(oid);
        s.devices.erase(oid);
    });
}

std::uint64_t Store::upsert_state(DeviceState state) {
    return mutate([&](Snapshot& s) {
        check_state(s, state);
        s.states.insert_or_assign(state.oid, std::move(state));
    });
}

std::uint64_t Store::upsert_states(const std::vector<DeviceState>& states) {
    return mutate([&](Snapshot& s) {
        for (const auto& state : states) {
            check_state(s, state);
            s.states.insert_or_assign(state.oid, state);
        }
    });
}

std::uint64_t Store::set_scene(map::MapScene scene) {
    return mutate([&](Snapshot& s) {
        check_scene(s, scene);
        s.scene = std::move(scene);
    });
}

std::uint64_t Store::put_schedule(ScheduledTask task) {
    return mutate([&](Snapshot& s) {
        check_schedule(s, task);
        s.schedules.insert_or_assign(task.id, std::move(task));
    });
}

std::uint64_t Store::set_schedule_enabled(std::string_view id, bool enabled) {
    return mutate([&](Snapshot& s) {
        const auto it = s.schedules.find(id);
        if (it == s.schedules.end()) fail(StoreErrc::unknown_id, "unknown schedule " + std::string(id));
        it->second.enabled = enabled;
    });
}

std::uint64_t Store::put_rule(Rule rule) {
    return mutate([&](Snapshot& s) {
        check_rule(s, rule);
        s.rules.insert_or_assign(rule.id, std::move(rule));
    });
}

std::uint64_t Store::set_rule_enabled(std::string_view id, bool enabled) {
    return mutate([&](Snapshot& s) {
        const auto it = s.rules.find(id);
        if (it == s.rules.end()) fail(StoreErrc::unknown_id, "unknown rule " + std::string(id));
        it->second.enabled = enabled;
    });
}

std::uint64_t Store::put_user(User user) {
    return mutate([&](Snapshot& s) {
        if (user.username.empty()) fail(StoreErrc::invalid, "empty username");
        s.users.insert_or_assign(user.username, std::move(user));
    });
}

void Store::persist(const std::filesystem::path& path) const {
    const auto text = serialize(*snapshot());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(StoreErrc::io, "cannot write " + tmp.string());
        out << text;
        if (!out.flush()) fail(StoreErrc::io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) fail(StoreErrc::io, "cannot rename into " + path.string() + ": " + ec.message());
}

Snapshot Store::restore(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(StoreErrc::io, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
}

}  // namespace smarthouse
