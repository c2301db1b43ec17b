#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smarthouse/domain.hpp"

// Line grammars shared by gateway responses and the store file. Text fields
// are percent-escaped; fields are `|`-separated.
//
//   device    oid|name|kind|criticality|schema|action1,action2,...
//   state     oid|status|level|ts            (level empty unless leveled)
//   schedule  id|name|oid|action|arg|when|criteria|enabled
//   rule      id|name|conditions|actions|enabled
//   user      username|role|allowed|salt|verifier
//
//   condition oid:field:cmp:operand   (list joined by `,`)
//   action    oid:action:arg          (list joined by `,`)
//   when      now | hh:mm
namespace smarthouse::records {

class RecordError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string format_device(const Device& d);
Device parse_device(std::string_view line);

std::string format_state(const DeviceState& s);
DeviceState parse_state(std::string_view line);

std::string format_condition(const Condition& c);
std::string format_conditions(const std::vector<Condition>& cs);
std::vector<Condition> parse_conditions(std::string_view text);

std::string format_action_calls(const std::vector<ActionCall>& calls);
std::vector<ActionCall> parse_action_calls(std::string_view text);

std::string format_when(const When& w);
When parse_when(std::string_view text);

std::string format_schedule(const ScheduledTask& t);
ScheduledTask parse_schedule(std::string_view line);

std::string format_rule(const Rule& r);
Rule parse_rule(std::string_view line);

std::string format_user(const User& u);
User parse_user(std::string_view line);

}  // namespace smarthouse::records
