#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "smarthouse/clock.hpp"
#include "smarthouse/domain.hpp"
#include "smarthouse/store.hpp"

namespace smarthouse::sim {

struct StatusValue {
    std::string status;
    std::optional<int> level;

    friend bool operator==(const StatusValue&, const StatusValue&) = default;
};

StatusValue default_status(StatusSchema schema);

enum class DispatchErrc { unknown_oid, not_actuator, unknown_action, bad_arg };

class DispatchError : public std::runtime_error {
public:
    DispatchError(DispatchErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    DispatchErrc code() const noexcept { return code_; }

private:
    DispatchErrc code_;
};

/// Applies a capability to the current value. Throws DispatchError on a
/// bad action or argument.
StatusValue apply_action(StatusSchema schema, const StatusValue& current, std::string_view action,
                         std::string_view arg);

/// Scripted device behavior. step() runs once per tick, after queued
/// commands have been applied.
class Behavior {
public:
    virtual ~Behavior() = default;
    virtual void step(SimTime now, StatusValue& value) = 0;
};

/// Changes only through commands (lamps, doors).
class CommandDriven final : public Behavior {
public:
    void step(SimTime, StatusValue&) override {}
};

/// Linear level ramp between two instants, held constant outside them.
class LevelRamp final : public Behavior {
public:
    LevelRamp(SimTime start, int from_level, SimTime end, int to_level);
    void step(SimTime now, StatusValue& value) override;

private:
    SimTime start_, end_;
    int from_, to_;
};

/// Alternates between the two statuses of a binary schema every `period`,
/// starting with `first` at t = 0.
class PeriodicToggle final : public Behavior {
public:
    PeriodicToggle(SimTime period, std::string first, std::string second);
    void step(SimTime now, StatusValue& value) override;

private:
    SimTime period_;
    std::string first_, second_;
};

struct ScenarioEvent {
    SimTime at{0};
    Oid oid = 0;
    std::optional<int> level;
    std::optional<std::string> status;

    friend bool operator==(const ScenarioEvent&, const ScenarioEvent&) = default;
};

class ScenarioError : public std::runtime_error {
public:
    ScenarioError(int line, const std::string& what);
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Parses `t=<seconds> oid=<n> level=<v>` / `t=<s> oid=<n> status=<code>`
/// lines. Blank lines and `#` comments are skipped. Events come back sorted
/// by time, stable for equal times.
std::vector<ScenarioEvent> parse_scenario(std::string_view text);

struct TierPeriods {
    SimTime vital{1000};
    SimTime security{5000};
    SimTime ambient{60000};

    SimTime for_tier(Criticality c) const;
};

/// The device manager: mirrors the registry held in the store, simulates
/// each device, applies queued commands in FIFO order and publishes polled
/// states back to the store.
///
/// dispatch() may be called from any thread. Everything else runs on the
/// simulation thread.
class Fleet {
public:
    explicit Fleet(Store& store, TierPeriods periods = {});

    void set_behavior(Oid oid, std::unique_ptr<Behavior> behavior);
    void set_initial(Oid oid, StatusValue value);
    void load_scenario(std::vector<ScenarioEvent> events);

    /// Validates against the registry and enqueues. Throws DispatchError.
    void dispatch(Oid oid, std::string_view action, std::string_view arg);

    /// One simulation step: apply queued commands, run scripts, then publish
    /// every device whose tier period has elapsed plus every device a
    /// command changed. Returns the published states.
    std::vector<DeviceState> tick(SimTime now);

    /// Fresh states for devices whose tier period has elapsed, written to
    /// the store. tick() calls this; exposed for harnesses that drive
    /// polling alone.
    std::vector<DeviceState> poll_due(SimTime now);

    std::size_t poll_count(Oid oid) const;
    std::size_t pending_commands() const;
    std::optional<StatusValue> value(Oid oid) const;

private:
    struct Command {
        Oid oid;
        std::string action;
        std::string arg;
    };
    struct SimDevice {
        Device device;
        StatusValue value;
        std::unique_ptr<Behavior> behavior;
        std::optional<SimTime> last_poll;
        std::size_t polls = 0;
    };

    void sync_registry();
    SimDevice* find(Oid oid);
    DeviceState stamp(const SimDevice& d, SimTime now) const;

    Store& store_;
    TierPeriods periods_;
    std::map<Oid, SimDevice> devices_;
    std::map<Oid, std::unique_ptr<Behavior>> pending_behaviors_;
    std::map<Oid, StatusValue> pending_initial_;
    std::vector<ScenarioEvent> scenario_;
    std::size_t scenario_pos_ = 0;

    mutable std::mutex queue_mutex_;
    std::deque<Command> queue_;
};

}  // namespace smarthouse::sim
