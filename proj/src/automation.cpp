#include "smarthouse/automation.hpp"

#include <spdlog/spdlog.h>

namespace smarthouse::automation {
namespace {

template <typename T>
bool compare(Comparator cmp, const T& lhs, const T& rhs) {
    switch (cmp) {
        case Comparator::eq: return lhs == rhs;
        case Comparator::ne: return lhs != rhs;
        case Comparator::lt: return lhs < rhs;
        case Comparator::le: return lhs <= rhs;
        case Comparator::gt: return lhs > rhs;
        case Comparator::ge: return lhs >= rhs;
    }
    return false;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    auto q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

bool eval_condition(const Condition& cond, const Snapshot& snap) {
    if (!snap.device(cond.oid)) {
        spdlog::warn("condition references unknown oid {}", cond.oid);
        return false;
    }
    const auto* state = snap.state(cond.oid);
    if (!state) return false;
    if (cond.field == ConditionField::level) {
        const auto* operand = std::get_if<std::int64_t>(&cond.operand);
        if (!operand || !state->level) return false;
        return compare<std::int64_t>(cond.comparator, *state->level, *operand);
    }
    const auto* operand = std::get_if<std::string>(&cond.operand);
    if (!operand) return false;
    if (cond.comparator != Comparator::eq && cond.comparator != Comparator::ne) return false;
    return compare(cond.comparator, state->status, *operand);
}

bool eval_all(const std::vector<Condition>& conds, const Snapshot& snap) {
    for (const auto& c : conds)
        if (!eval_condition(c, snap)) return false;
    return true;
}

bool edge_policy(const Rule& rule, const Snapshot* previous, const Snapshot& current) {
    std::optional<bool> prev;
    if (previous) prev = eval_all(rule.conditions, *previous);
    return edge_fire(prev, eval_all(rule.conditions, current));
}

bool crosses_time_of_day(SimTime after, SimTime upto, int minute_of_day) {
    if (upto <= after) return false;
    const std::int64_t offset = static_cast<std::int64_t>(minute_of_day) * 60'000;
    const auto day = kDay.count();
    for (auto d = floor_div(after.count(), day); d <= floor_div(upto.count(), day); ++d) {
        const auto candidate = d * day + offset;
        if (candidate > after.count() && candidate <= upto.count()) return true;
    }
    return false;
}

Engine::Engine(Store& store, Dispatcher dispatcher, SimTime restart_grace)
    : store_(store), dispatcher_(std::move(dispatcher)), grace_(restart_grace) {}

std::vector<FiredAction> Engine::tick(SimTime now) {
    const auto snap = store_.snapshot();
    // A fresh engine looks back over the grace window so a time missed
    // while the server was down still fires once.
    const SimTime after = last_tick_ ? *last_tick_ : now - grace_;
    std::vector<FiredAction> fired;

    auto run = [&](FiredAction::Source source, const std::string& id, const ActionCall& call) {
        FiredAction f{source, id, call, true, {}};
        try {
            dispatcher_(call);
        } catch (const std::exception& e) {
            f.dispatched = false;
            f.error = e.what();
            spdlog::warn("dispatch of {} on oid {} failed: {}", call.action, call.oid, e.what());
        }
        fired.push_back(std::move(f));
    };

    for (const auto& [id, task] : snap->schedules) {
        if (!task.enabled) continue;
        const bool due = task.when.is_now() || crosses_time_of_day(after, now, *task.when.minute_of_day);
        if (!due || !eval_all(task.criteria, *snap)) continue;
        run(FiredAction::Source::schedule, id, task.action);
        try {
            store_.set_schedule_enabled(id, false);
        } catch (const StoreError& e) {
            spdlog::warn("could not disable schedule {}: {}", id, e.what());
        }
    }

    for (auto it = memo_.begin(); it != memo_.end();) {
        const auto rule = snap->rules.find(it->first);
        if (rule == snap->rules.end() || !rule->second.enabled)
            it = memo_.erase(it);
        else
            ++it;
    }
    for (const auto& [id, rule] : snap->rules) {
        if (!rule.enabled) continue;
        const bool truth = eval_all(rule.conditions, *snap);
        std::optional<bool> previous;
        if (auto m = memo_.find(id); m != memo_.end() && m->second.definition == rule) previous = m->second.truth;
        memo_.insert_or_assign(id, RuleMemo{rule, truth});
        if (!edge_fire(previous, truth)) continue;
        for (const auto& call : rule.actions) run(FiredAction::Source::rule, id, call);
    }

    last_tick_ = now;
    return fired;
}

}  // namespace smarthouse::automation
