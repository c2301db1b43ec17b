#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smarthouse/clock.hpp"
#include "smarthouse/domain.hpp"
#include "smarthouse/store.hpp"

namespace smarthouse::automation {

/// False when the oid is unknown or has no state yet.
bool eval_condition(const Condition& cond, const Snapshot& snap);

/// Conjunction; an empty list holds.
bool eval_all(const std::vector<Condition>& conds, const Snapshot& snap);

/// Fire on a false->true edge. `previous` is nullopt when the rule has not
/// been evaluated in its current form, which counts as an edge.
constexpr bool edge_fire(std::optional<bool> previous, bool current) { return current && previous != true; }

bool edge_policy(const Rule& rule, const Snapshot* previous, const Snapshot& current);

/// True when hh:mm of some day falls in (after, upto].
bool crosses_time_of_day(SimTime after, SimTime upto, int minute_of_day);

struct FiredAction {
    enum class Source { schedule, rule };
    Source source;
    std::string source_id;
    ActionCall call;
    bool dispatched = true;
    std::string error;

    friend bool operator==(const FiredAction&, const FiredAction&) = default;
};

using Dispatcher = std::function<void(const ActionCall&)>;

/// Runs schedules and rules against store snapshots. Schedules fire once
/// and are disabled; rules fire on each false->true edge of their
/// conditions. Only the simulation thread calls tick().
class Engine {
public:
    static constexpr std::chrono::minutes kDefaultGrace{5};

    Engine(Store& store, Dispatcher dispatcher, SimTime restart_grace = kDefaultGrace);

    /// Fired actions in order: schedules by id, then rules by id.
    std::vector<FiredAction> tick(SimTime now);

private:
    Store& store_;
    Dispatcher dispatcher_;
    SimTime grace_;
    std::optional<SimTime> last_tick_;
    struct RuleMemo {
        Rule definition;
        bool truth;
    };
    std::map<std::string, RuleMemo, std::less<>> memo_;
};

}  // namespace smarthouse::automation
