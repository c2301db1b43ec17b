#include "smarthouse/records.hpp"

#include <cstdio>

#include "smarthouse/text.hpp"

namespace smarthouse::records {
namespace {

[[noreturn]] void fail(const std::string& msg) { throw RecordError(msg); }

std::vector<std::string_view> fields(std::string_view line, std::size_t expected, const char* what) {
    auto parts = text::split(line, '|');
    if (parts.size() != expected)
        fail(std::string(what) + " line needs " + std::to_string(expected) + " fields, got " +
             std::to_string(parts.size()));
    return parts;
}

std::string unescaped(std::string_view s, const char* what) {
    auto v = text::unescape(s);
    if (!v) fail(std::string("bad escape in ") + what);
    return std::move(*v);
}

std::int64_t integer(std::string_view s, const char* what) {
    const auto v = text::parse_int(s);
    if (!v) fail(std::string("bad integer for ") + what + ": '" + std::string(s) + "'");
    return *v;
}

Oid oid_field(std::string_view s) {
    const auto v = integer(s, "oid");
    if (v < 1) fail("oid must be >= 1");
    return v;
}

bool flag(std::string_view s) {
    if (s == "1") return true;
    if (s == "0") return false;
    fail("enabled flag must be 0 or 1");
}

std::string record_id(std::string_view s) {
    if (!is_valid_record_id(s)) fail("bad record id '" + std::string(s) + "'");
    return std::string(s);
}

}  // namespace

std::string format_device(const Device& d) {
    std::string actions;
    for (const auto& cap : d.capabilities) {
        if (!actions.empty()) actions.push_back(',');
        actions += text::escape(cap.name);
    }
    return std::to_string(d.oid) + '|' + text::escape(d.name) + '|' + std::string(to_string(d.kind)) + '|' +
           std::string(to_string(d.criticality)) + '|' + std::string(to_string(d.schema)) + '|' + actions;
}

Device parse_device(std::string_view line) {
    const auto f = fields(line, 6, "device");
    Device d;
    d.oid = oid_field(f[0]);
    d.name = unescaped(f[1], "device name");
    const auto kind = parse_device_kind(f[2]);
    const auto crit = parse_criticality(f[3]);
    const auto schema = parse_status_schema(f[4]);
    if (!kind) fail("unknown device kind");
    if (!crit) fail("unknown criticality");
    if (!schema) fail("unknown status schema");
    d.kind = *kind;
    d.criticality = *crit;
    d.schema = *schema;
    if (!f[5].empty()) {
        for (auto name : text::split(f[5], ',')) {
            const auto action = resolve_action(d.schema, unescaped(name, "action"));
            if (!action) fail("action '" + std::string(name) + "' not applicable to schema");
            d.capabilities.push_back(*action);
        }
    }
    return d;
}

std::string format_state(const DeviceState& s) {
    return std::to_string(s.oid) + '|' + text::escape(s.status) + '|' + (s.level ? std::to_string(*s.level) : "") +
           '|' + std::to_string(s.timestamp.count());
}

DeviceState parse_state(std::string_view line) {
    const auto f = fields(line, 4, "state");
    DeviceState s;
    s.oid = oid_field(f[0]);
    s.status = unescaped(f[1], "status");
    if (!f[2].empty()) {
        const auto level = integer(f[2], "level");
        if (level < 0 || level > 100) fail("level out of 0..100");
        s.level = static_cast<int>(level);
    }
    const auto ts = integer(f[3], "timestamp");
    if (ts < 0) fail("negative timestamp");
    s.timestamp = SimTime{ts};
    return s;
}

std::string format_condition(const Condition& c) {
    std::string operand;
    if (const auto* s = std::get_if<std::string>(&c.operand))
        operand = text::escape(*s);
    else
        operand = std::to_string(std::get<std::int64_t>(c.operand));
    return std::to_string(c.oid) + ':' + std::string(to_string(c.field)) + ':' + std::string(to_string(c.comparator)) +
           ':' + operand;
}

std::string format_conditions(const std::vector<Condition>& cs) {
    std::string out;
    for (const auto& c : cs) {
        if (!out.empty()) out.push_back(',');
        out += format_condition(c);
    }
    return out;
}

std::vector<Condition> parse_conditions(std::string_view text) {
    std::vector<Condition> out;
    if (text.empty()) return out;
    for (auto item : text::split(text, ',')) {
        const auto parts = text::split(item, ':');
        if (parts.size() != 4) fail("condition needs oid:field:cmp:operand");
        Condition c;
        c.oid = oid_field(parts[0]);
        const auto field = parse_condition_field(parts[1]);
        const auto cmp = parse_comparator(parts[2]);
        if (!field) fail("unknown condition field");
        if (!cmp) fail("unknown comparator");
        c.field = *field;
        c.comparator = *cmp;
        if (c.field == ConditionField::level) {
            c.operand = integer(parts[3], "level operand");
        } else {
            if (c.comparator != Comparator::eq && c.comparator != Comparator::ne)
                fail("ordering comparator requires the level field");
            c.operand = unescaped(parts[3], "status operand");
        }
        out.push_back(std::move(c));
    }
    return out;
}

std::string format_action_calls(const std::vector<ActionCall>& calls) {
    std::string out;
    for (const auto& a : calls) {
        if (!out.empty()) out.push_back(',');
        out += std::to_string(a.oid) + ':' + text::escape(a.action) + ':' + text::escape(a.arg);
    }
    return out;
}

std::vector<ActionCall> parse_action_calls(std::string_view text) {
    std::vector<ActionCall> out;
    if (text.empty()) return out;
    for (auto item : text::split(text, ',')) {
        const auto parts = text::split(item, ':');
        if (parts.size() != 3) fail("action needs oid:action:arg");
        out.push_back({oid_field(parts[0]), unescaped(parts[1], "action"), unescaped(parts[2], "argument")});
    }
    return out;
}

std::string format_when(const When& w) {
    if (w.is_now()) return "now";
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02d:%02d", *w.minute_of_day / 60, *w.minute_of_day % 60);
    return buf;
}

When parse_when(std::string_view text) {
    if (text == "now") return When::now();
    if (text.size() != 5 || text[2] != ':') fail("when must be 'now' or hh:mm");
    const auto hh = text::parse_int(text.substr(0, 2));
    const auto mm = text::parse_int(text.substr(3, 2));
    if (!hh || !mm || *hh < 0 || *hh > 23 || *mm < 0 || *mm > 59 || text[0] == '-' || text[3] == '-')
        fail("when must be 'now' or hh:mm");
    return When::at(static_cast<int>(*hh), static_cast<int>(*mm));
}

std::string format_schedule(const ScheduledTask& t) {
    return t.id + '|' + text::escape(t.name) + '|' + std::to_string(t.action.oid) + '|' + text::escape(t.action.action) +
           '|' + text::escape(t.action.arg) + '|' + format_when(t.when) + '|' + format_conditions(t.criteria) + '|' +
           (t.enabled ? "1" : "0");
}

ScheduledTask parse_schedule(std::string_view line) {
    const auto f = fields(line, 8, "schedule");
    ScheduledTask t;
    t.id = record_id(f[0]);
    t.name = unescaped(f[1], "schedule name");
    t.action.oid = oid_field(f[2]);
    t.action.action = unescaped(f[3], "action");
    t.action.arg = unescaped(f[4], "argument");
    t.when = parse_when(f[5]);
    t.criteria = parse_conditions(f[6]);
    t.enabled = flag(f[7]);
    return t;
}

std::string format_rule(const Rule& r) {
    return r.id + '|' + text::escape(r.name) + '|' + format_conditions(r.conditions) + '|' +
           format_action_calls(r.actions) + '|' + (r.enabled ? "1" : "0");
}

Rule parse_rule(std::string_view line) {
    const auto f = fields(line, 5, "rule");
    Rule r;
    r.id = record_id(f[0]);
    r.name = unescaped(f[1], "rule name");
    r.conditions = parse_conditions(f[2]);
    r.actions = parse_action_calls(f[3]);
    r.enabled = flag(f[4]);
    if (r.conditions.empty()) fail("rule needs at least one condition");
    if (r.actions.empty()) fail("rule needs at least one action");
    return r;
}

std::string format_user(const User& u) {
    std::string allowed;
    if (!u.allowed_oids) {
        allowed = "*";
    } else {
        for (auto oid : *u.allowed_oids) {
            if (!allowed.empty()) allowed.push_back(',');
            allowed += std::to_string(oid);
        }
    }
    return text::escape(u.username) + '|' + std::string(to_string(u.role)) + '|' + allowed + '|' + u.verifier_salt +
           '|' + u.stored_verifier;
}

User parse_user(std::string_view line) {
    const auto f = fields(line, 5, "user");
    User u;
    u.username = unescaped(f[0], "username");
    if (u.username.empty()) fail("empty username");
    const auto role = parse_role(f[1]);
    if (!role) fail("unknown role");
    u.role = *role;
    if (f[2] != "*") {
        std::set<Oid> allowed;
        if (!f[2].empty())
            for (auto o : text::split(f[2], ',')) allowed.insert(oid_field(o));
        u.allowed_oids = std::move(allowed);
    }
    auto hex = [](std::string_view s) {
        for (char c : s)
            if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) fail("verifier fields must be lowercase hex");
        if (s.size() % 2 != 0) fail("verifier fields must be lowercase hex");
        return std::string(s);
    };
    u.verifier_salt = hex(f[3]);
    u.stored_verifier = hex(f[4]);
    return u;
}

}  // namespace smarthouse::records
