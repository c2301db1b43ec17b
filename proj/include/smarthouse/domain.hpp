#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "smarthouse/clock.hpp"

namespace smarthouse {

using Oid = std::int64_t;

enum class DeviceKind { actuator, sensor, hybrid };
enum class Criticality { vital, security, ambient };
enum class StatusSchema { on_off, leveled, presence, open_closed };
enum class ArgKind { none, level_0_100, boolean };
enum class Role { admin, mobile };
enum class ConditionField { status, level };
enum class Comparator { eq, ne, lt, le, gt, ge };

std::string_view to_string(DeviceKind v);
std::string_view to_string(Criticality v);
std::string_view to_string(StatusSchema v);
std::string_view to_string(ArgKind v);
std::string_view to_string(Role v);
std::string_view to_string(ConditionField v);
std::string_view to_string(Comparator v);

std::optional<DeviceKind> parse_device_kind(std::string_view s);
std::optional<Criticality> parse_criticality(std::string_view s);
std::optional<StatusSchema> parse_status_schema(std::string_view s);
std::optional<Role> parse_role(std::string_view s);
std::optional<ConditionField> parse_condition_field(std::string_view s);
std::optional<Comparator> parse_comparator(std::string_view s);

struct ActionDescriptor {
    std::string name;
    ArgKind arg_kind = ArgKind::none;

    friend bool operator==(const ActionDescriptor&, const ActionDescriptor&) = default;
};

struct Device {
    Oid oid = 0;
    std::string name;
    DeviceKind kind = DeviceKind::sensor;
    Criticality criticality = Criticality::ambient;
    StatusSchema schema = StatusSchema::on_off;
    std::vector<ActionDescriptor> capabilities;

    const ActionDescriptor* find_action(std::string_view action) const;

    friend bool operator==(const Device&, const Device&) = default;
};

struct DeviceState {
    Oid oid = 0;
    std::string status;
    std::optional<int> level;  // present iff the schema is leveled
    SimTime timestamp{0};

    friend bool operator==(const DeviceState&, const DeviceState&) = default;
};

struct Condition {
    Oid oid = 0;
    ConditionField field = ConditionField::status;
    Comparator comparator = Comparator::eq;
    std::variant<std::string, std::int64_t> operand;

    friend bool operator==(const Condition&, const Condition&) = default;
};

/// One invocation of a device capability. `arg` is the textual argument,
/// empty for ArgKind::none.
struct ActionCall {
    Oid oid = 0;
    std::string action;
    std::string arg;

    friend bool operator==(const ActionCall&, const ActionCall&) = default;
};

/// Trigger time of a scheduled task: nullopt means "now".
struct When {
    std::optional<int> minute_of_day;

    static When now() { return {}; }
    static When at(int hh, int mm) { return When{hh * 60 + mm}; }
    bool is_now() const { return !minute_of_day.has_value(); }

    friend bool operator==(const When&, const When&) = default;
};

struct ScheduledTask {
    std::string id;
    std::string name;
    ActionCall action;
    When when;
    std::vector<Condition> criteria;
    bool enabled = true;

    friend bool operator==(const ScheduledTask&, const ScheduledTask&) = default;
};

struct Rule {
    std::string id;
    std::string name;
    std::vector<Condition> conditions;
    std::vector<ActionCall> actions;
    bool enabled = true;

    friend bool operator==(const Rule&, const Rule&) = default;
};

struct User {
    std::string username;
    Role role = Role::mobile;
    std::optional<std::set<Oid>> allowed_oids;  // nullopt = all devices
    std::string verifier_salt;                  // hex
    std::string stored_verifier;                // hex, password masked under the salt

    bool may_control(Oid oid) const { return !allowed_oids || allowed_oids->contains(oid); }
    bool may_author_map() const { return role == Role::admin; }

    friend bool operator==(const User&, const User&) = default;
};

/// Status codes a schema admits. Leveled devices report the single code
/// "level" and carry the value in DeviceState::level.
const std::vector<std::string>& statuses_for(StatusSchema schema);
bool is_valid_status(StatusSchema schema, std::string_view status);

/// Action vocabulary per schema; argument kind is a function of the name.
const std::vector<ActionDescriptor>& actions_for(StatusSchema schema);
std::optional<ActionDescriptor> resolve_action(StatusSchema schema, std::string_view name);

/// Returns an error message if `arg` does not fit `kind`.
std::optional<std::string> check_arg(ArgKind kind, std::string_view arg);

std::vector<std::string> validate_device(const Device& device);
std::vector<std::string> validate_state(const Device& device, const DeviceState& state);

bool is_valid_record_id(std::string_view id);

}  // namespace smarthouse
