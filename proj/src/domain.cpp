#include "smarthouse/domain.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "smarthouse/text.hpp"

namespace smarthouse {
namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(std::string_view s, const std::array<std::pair<E, std::string_view>, N>& table) {
    for (const auto& [value, name] : table)
        if (name == s) return value;
    return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(E v, const std::array<std::pair<E, std::string_view>, N>& table) {
    for (const auto& [value, name] : table)
        if (value == v) return name;
    return "invalid";
}

constexpr std::array<std::pair<DeviceKind, std::string_view>, 3> kKinds{{
    {DeviceKind::actuator, "actuator"}, {DeviceKind::sensor, "sensor"}, {DeviceKind::hybrid, "hybrid"}}};
constexpr std::array<std::pair<Criticality, std::string_view>, 3> kCriticality{{
    {Criticality::vital, "vital"}, {Criticality::security, "security"}, {Criticality::ambient, "ambient"}}};
constexpr std::array<std::pair<StatusSchema, std::string_view>, 4> kSchemas{{
    {StatusSchema::on_off, "on_off"},
    {StatusSchema::leveled, "leveled"},
    {StatusSchema::presence, "presence"},
    {StatusSchema::open_closed, "open_closed"}}};
constexpr std::array<std::pair<ArgKind, std::string_view>, 3> kArgKinds{{
    {ArgKind::none, "none"}, {ArgKind::level_0_100, "level_0_100"}, {ArgKind::boolean, "boolean"}}};
constexpr std::array<std::pair<Role, std::string_view>, 2> kRoles{{{Role::admin, "admin"}, {Role::mobile, "mobile"}}};
constexpr std::array<std::pair<ConditionField, std::string_view>, 2> kFields{{
    {ConditionField::status, "status"}, {ConditionField::level, "level"}}};
// Comparator tokens avoid `<`, `>` and `=` so they survive query strings untouched.
constexpr std::array<std::pair<Comparator, std::string_view>, 6> kComparators{{
    {Comparator::eq, "eq"}, {Comparator::ne, "ne"}, {Comparator::lt, "lt"},
    {Comparator::le, "le"}, {Comparator::gt, "gt"}, {Comparator::ge, "ge"}}};

bool known_enum(DeviceKind v) { return name_of(v, kKinds) != "invalid"; }
bool known_enum(Criticality v) { return name_of(v, kCriticality) != "invalid"; }
bool known_enum(StatusSchema v) { return name_of(v, kSchemas) != "invalid"; }

}  // namespace

std::string_view to_string(DeviceKind v) { return name_of(v, kKinds); }
std::string_view to_string(Criticality v) { return name_of(v, kCriticality); }
std::string_view to_string(StatusSchema v) { return name_of(v, kSchemas); }
std::string_view to_string(ArgKind v) { return name_of(v, kArgKinds); }
std::string_view to_string(Role v) { return name_of(v, kRoles); }
std::string_view to_string(ConditionField v) { return name_of(v, kFields); }
std::string_view to_string(Comparator v) { return name_of(v, kComparators); }

std::optional<DeviceKind> parse_device_kind(std::string_view s) { return lookup(s, kKinds); }
std::optional<Criticality> parse_criticality(std::string_view s) { return lookup(s, kCriticality); }
std::optional<StatusSchema> parse_status_schema(std::string_view s) { return lookup(s, kSchemas); }
std::optional<Role> parse_role(std::string_view s) { return lookup(s, kRoles); }
std::optional<ConditionField> parse_condition_field(std::string_view s) { return lookup(s, kFields); }
std::optional<Comparator> parse_comparator(std::string_view s) { return lookup(s, kComparators); }

const ActionDescriptor* Device::find_action(std::string_view action) const {
    for (const auto& cap : capabilities)
        if (cap.name == action) return &cap;
    return nullptr;
}

const std::vector<std::string>& statuses_for(StatusSchema schema) {
    static const std::vector<std::string> on_off{"off", "on"};
    static const std::vector<std::string> leveled{"level"};
    static const std::vector<std::string> presence{"absent", "present"};
    static const std::vector<std::string> open_closed{"closed", "open"};
    static const std::vector<std::string> none;
    switch (schema) {
        case StatusSchema::on_off: return on_off;
        case StatusSchema::leveled: return leveled;
        case StatusSchema::presence: return presence;
        case StatusSchema::open_closed: return open_closed;
    }
    return none;
}

bool is_valid_status(StatusSchema schema, std::string_view status) {
    const auto& all = statuses_for(schema);
    return std::find(all.begin(), all.end(), status) != all.end();
}

const std::vector<ActionDescriptor>& actions_for(StatusSchema schema) {
    static const std::vector<ActionDescriptor> on_off{
        {"set_on", ArgKind::none}, {"set_off", ArgKind::none}, {"toggle", ArgKind::none}, {"set", ArgKind::boolean}};
    static const std::vector<ActionDescriptor> leveled{{"set_level", ArgKind::level_0_100}};
    static const std::vector<ActionDescriptor> presence{
        {"appear", ArgKind::none}, {"disappear", ArgKind::none}, {"set", ArgKind::boolean}};
    static const std::vector<ActionDescriptor> open_closed{
        {"open", ArgKind::none}, {"close", ArgKind::none}, {"toggle", ArgKind::none}, {"set", ArgKind::boolean}};
    static const std::vector<ActionDescriptor> none;
    switch (schema) {
        case StatusSchema::on_off: return on_off;
        case StatusSchema::leveled: return leveled;
        case StatusSchema::presence: return presence;
        case StatusSchema::open_closed: return open_closed;
    }
    return none;
}

std::optional<ActionDescriptor> resolve_action(StatusSchema schema, std::string_view name) {
    for (const auto& a : actions_for(schema))
        if (a.name == name) return a;
    return std::nullopt;
}

std::optional<std::string> check_arg(ArgKind kind, std::string_view arg) {
    switch (kind) {
        case ArgKind::none:
            if (!arg.empty()) return "action takes no argument";
            return std::nullopt;
        case ArgKind::boolean:
            if (arg != "0" && arg != "1") return "argument must be 0 or 1";
            return std::nullopt;
        case ArgKind::level_0_100: {
            const auto v = text::parse_int(arg);
            if (!v || *v < 0 || *v > 100) return "level must be an integer in 0..100";
            if (std::to_string(*v) != arg) return "level must be canonical decimal";
            return std::nullopt;
        }
    }
    return "invalid argument kind";
}

std::vector<std::string> validate_device(const Device& device) {
    std::vector<std::string> violations;
    if (device.oid < 1) violations.emplace_back("oid must be >= 1");
    if (device.name.empty()) violations.emplace_back("name must not be empty");
    if (device.name.size() > 128) violations.emplace_back("name longer than 128 bytes");
    if (!known_enum(device.kind)) violations.emplace_back("invalid kind");
    if (!known_enum(device.criticality)) violations.emplace_back("invalid criticality");
    const bool schema_ok = known_enum(device.schema);
    if (!schema_ok) violations.emplace_back("invalid status schema");

    if (device.kind == DeviceKind::sensor && !device.capabilities.empty())
        violations.emplace_back("sensor has capabilities");
    if ((device.kind == DeviceKind::actuator || device.kind == DeviceKind::hybrid) && device.capabilities.empty())
        violations.emplace_back(std::string(to_string(device.kind)) + " has no capabilities");

    std::set<std::string> seen;
    for (const auto& cap : device.capabilities) {
        if (!seen.insert(cap.name).second) violations.push_back("duplicate action " + cap.name);
        if (!schema_ok) continue;
        const auto known = resolve_action(device.schema, cap.name);
        if (!known)
            violations.push_back("action " + cap.name + " not applicable to " + std::string(to_string(device.schema)));
        else if (known->arg_kind != cap.arg_kind)
            violations.push_back("action " + cap.name + " has inconsistent argument kind");
    }
    return violations;
}

std::vector<std::string> validate_state(const Device& device, const DeviceState& state) {
    std::vector<std::string> violations;
    if (state.oid != device.oid) violations.emplace_back("state oid does not match device");
    if (!is_valid_status(device.schema, state.status)) violations.push_back("invalid status " + state.status);
    const bool leveled = device.schema == StatusSchema::leveled;
    if (leveled && !state.level) violations.emplace_back("leveled state requires a level");
    if (!leveled && state.level) violations.emplace_back("level present on non-leveled device");
    if (state.level && (*state.level < 0 || *state.level > 100)) violations.emplace_back("level out of 0..100");
    return violations;
}

bool is_valid_record_id(std::string_view id) { return text::is_token(id, 32); }

}  // namespace smarthouse
