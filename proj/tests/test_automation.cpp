#include <gtest/gtest.h>

#include "rule_oracle.hpp"
#include "smarthouse/automation.hpp"
#include "smarthouse/home_server.hpp"

using namespace smarthouse;
using namespace smarthouse::automation;
using namespace std::chrono_literals;

namespace {

constexpr SimTime at(int hh, int mm, int ss = 0, int day = 0) {
    return SimTime{((static_cast<std::int64_t>(day) * 24 + hh) * 60 + mm) * 60'000LL + ss * 1000LL};
}

Device lamp() {
    return {1, "lamp", DeviceKind::actuator, Criticality::ambient, StatusSchema::on_off, actions_for(StatusSchema::on_off)};
}
Device gas() { return {2, "gas", DeviceKind::sensor, Criticality::vital, StatusSchema::leveled, {}}; }
Device window() {
    return {3, "window", DeviceKind::actuator, Criticality::ambient, StatusSchema::open_closed,
            actions_for(StatusSchema::open_closed)};
}

struct Rig {
    Store store;
    std::vector<ActionCall> calls;
    bool fail_dispatch = false;
    Engine engine{store, [this](const ActionCall& c) {
                      if (fail_dispatch) throw std::runtime_error("offline");
                      calls.push_back(c);
                  }};
    Rig() {
        store.add_device(lamp());
        store.add_device(gas());
        store.add_device(window());
        store.upsert_state({1, "off", std::nullopt, SimTime{0}});
        store.upsert_state({2, "level", 10, SimTime{0}});
    }
    void set_gas(int level, SimTime t) { store.upsert_state({2, "level", level, t}); }
    std::size_t run(SimTime from, SimTime to) {
        std::size_t n = 0;
        for (auto t = from; t < to; t += kTick) n += engine.tick(t).size();
        return n;
    }
};

Condition gas_above(int v) { return {2, ConditionField::level, Comparator::gt, std::int64_t{v}}; }

}  // namespace

TEST(EvalCondition, Examples) {
    Rig rig;
    rig.set_gas(70, SimTime{1});
    EXPECT_TRUE(eval_condition(gas_above(50), *rig.store.snapshot()));
    const Condition door_open{3, ConditionField::status, Comparator::eq, std::string("open")};
    rig.store.upsert_state({3, "closed", std::nullopt, SimTime{1}});
    EXPECT_FALSE(eval_condition(door_open, *rig.store.snapshot()));
    const Condition unknown{9, ConditionField::status, Comparator::ne, std::string("open")};
    EXPECT_FALSE(eval_condition(unknown, *rig.store.snapshot()));
    EXPECT_TRUE(eval_all({}, *rig.store.snapshot()));
}

TEST(EvalCondition, SampledTruthTableOracle) {
    const auto t = oracle::check_conjunctions(29);
    EXPECT_GT(t.checked, 50'000u);
    EXPECT_EQ(t.mismatches, 0u);
}

TEST(EdgeFire, Truth) {
    EXPECT_TRUE(edge_fire(std::nullopt, true));
    EXPECT_TRUE(edge_fire(false, true));
    EXPECT_FALSE(edge_fire(true, true));
    EXPECT_FALSE(edge_fire(true, false));
    EXPECT_FALSE(edge_fire(std::nullopt, false));
}

TEST(EdgePolicy, StaysTrueFiresOnce) {
    Rig rig;
    rig.store.put_rule({"r1", "vent", {gas_above(50)}, {{3, "open", ""}}, true});
    rig.set_gas(60, SimTime{1});
    for (int i = 0; i < 10; ++i) rig.engine.tick(SimTime{100 * (i + 1)});
    EXPECT_EQ(rig.calls.size(), 1u);
}

TEST(EdgePolicy, TrueFalseTrueFiresTwice) {
    Rig rig;
    rig.store.put_rule({"r1", "vent", {gas_above(50)}, {{3, "open", ""}}, true});
    int levels[] = {60, 60, 20, 20, 70, 70, 70};
    SimTime t{100};
    for (int lvl : levels) {
        rig.set_gas(lvl, t);
        rig.engine.tick(t);
        t += kTick;
    }
    EXPECT_EQ(rig.calls.size(), 2u);
}

TEST(EdgePolicy, FreshRuleAlreadyTrueFiresImmediately) {
    Rig rig;
    rig.set_gas(90, SimTime{1});
    rig.engine.tick(SimTime{100});
    rig.store.put_rule({"r1", "vent", {gas_above(50)}, {{3, "open", ""}}, true});
    const auto fired = rig.engine.tick(SimTime{200});
    ASSERT_EQ(fired.size(), 1u);
    EXPECT_EQ(fired[0].source, FiredAction::Source::rule);
}

TEST(EdgePolicy, ReenableOrRedefineResetsMemo) {
    Rig rig;
    rig.set_gas(90, SimTime{1});
    rig.store.put_rule({"r1", "vent", {gas_above(50)}, {{3, "open", ""}}, true});
    rig.engine.tick(SimTime{100});
    rig.store.set_rule_enabled("r1", false);
    rig.engine.tick(SimTime{200});
    rig.store.set_rule_enabled("r1", true);
    rig.engine.tick(SimTime{300});
    rig.store.put_rule({"r1", "vent", {gas_above(40)}, {{3, "open", ""}}, true});
    rig.engine.tick(SimTime{400});
    EXPECT_EQ(rig.calls.size(), 3u);
}

TEST(EdgePolicy, SnapshotHelper) {
    Rig rig;
    const Rule r{"r", "x", {gas_above(50)}, {{3, "open", ""}}, true};
    const auto low = rig.store.snapshot();
    rig.set_gas(80, SimTime{1});
    const auto high = rig.store.snapshot();
    EXPECT_TRUE(edge_policy(r, nullptr, *high));
    EXPECT_TRUE(edge_policy(r, low.get(), *high));
    EXPECT_FALSE(edge_policy(r, high.get(), *high));
    EXPECT_FALSE(edge_policy(r, high.get(), *low));
}

TEST(Schedule, NowFiresOnceAndDisables) {
    Rig rig;
    rig.store.put_schedule({"s1", "lamp on", {1, "set_on", ""}, When::now(), {}, true});
    const auto fired = rig.engine.tick(SimTime{100});
    ASSERT_EQ(fired.size(), 1u);
    EXPECT_EQ(fired[0].call, (ActionCall{1, "set_on", ""}));
    EXPECT_FALSE(rig.store.snapshot()->schedules.at("s1").enabled);
    EXPECT_EQ(rig.run(SimTime{200}, SimTime{5000}), 0u);
}

TEST(Schedule, NowWaitsForCriteria) {
    Rig rig;
    rig.store.put_schedule({"s1", "vent", {3, "open", ""}, When::now(), {gas_above(50)}, true});
    EXPECT_EQ(rig.run(SimTime{0}, SimTime{1000}), 0u);
    EXPECT_TRUE(rig.store.snapshot()->schedules.at("s1").enabled);
    rig.set_gas(55, SimTime{1000});
    EXPECT_EQ(rig.engine.tick(SimTime{1000}).size(), 1u);
    EXPECT_FALSE(rig.store.snapshot()->schedules.at("s1").enabled);
}

TEST(Schedule, TimeOfDayFiresExactlyOnceWhenSteppedPast) {
    Rig rig;
    rig.store.put_schedule({"s1", "evening", {1, "set_on", ""}, When::at(21, 30), {}, true});
    std::vector<SimTime> fire_times;
    for (auto t = at(21, 28); t < at(21, 33); t += kTick)
        if (!rig.engine.tick(t).empty()) fire_times.push_back(t);
    ASSERT_EQ(fire_times.size(), 1u);
    EXPECT_EQ(fire_times[0], at(21, 30));
}

TEST(Schedule, CoarseClockStepStillFires) {
    Rig rig;
    rig.store.put_schedule({"s1", "evening", {1, "set_on", ""}, When::at(21, 30), {}, true});
    rig.engine.tick(at(21, 0));
    EXPECT_EQ(rig.engine.tick(at(22, 0)).size(), 1u);
}

TEST(Schedule, OncePerDayAcrossDays) {
    Rig rig;
    rig.store.put_schedule({"s1", "morning", {1, "set_on", ""}, When::at(7, 0), {}, true});
    std::size_t fired = 0;
    for (int day = 0; day < 3; ++day) {
        for (auto t = at(6, 59, 0, day); t < at(7, 1, 0, day); t += kTick) fired += rig.engine.tick(t).size();
        rig.store.set_schedule_enabled("s1", true);
        EXPECT_EQ(fired, static_cast<std::size_t>(day + 1));
    }
}

TEST(Schedule, TimeOfDayWithFailedCriteriaIsSkipped) {
    Rig rig;
    rig.store.put_schedule({"s1", "vent", {3, "open", ""}, When::at(12, 0), {gas_above(50)}, true});
    EXPECT_EQ(rig.run(at(11, 59), at(12, 1)), 0u);
    EXPECT_TRUE(rig.store.snapshot()->schedules.at("s1").enabled);
    rig.set_gas(90, at(12, 2));
    EXPECT_EQ(rig.run(at(12, 2), at(12, 3)), 0u);
}

TEST(Schedule, DisabledNeverFires) {
    Rig rig;
    rig.store.put_schedule({"s1", "x", {1, "set_on", ""}, When::now(), {}, false});
    rig.store.put_rule({"r1", "vent", {gas_above(0)}, {{3, "open", ""}}, false});
    EXPECT_EQ(rig.run(SimTime{0}, SimTime{10'000}), 0u);
    EXPECT_TRUE(rig.calls.empty());
}

TEST(Schedule, DispatchFailureStillDisables) {
    Rig rig;
    rig.fail_dispatch = true;
    rig.store.put_schedule({"s1", "x", {1, "set_on", ""}, When::now(), {}, true});
    const auto fired = rig.engine.tick(SimTime{0});
    ASSERT_EQ(fired.size(), 1u);
    EXPECT_FALSE(fired[0].dispatched);
    EXPECT_EQ(fired[0].error, "offline");
    EXPECT_FALSE(rig.store.snapshot()->schedules.at("s1").enabled);
}

TEST(Schedule, RestartGraceWindow) {
    {
        Rig rig;
        rig.store.put_schedule({"s1", "x", {1, "set_on", ""}, When::at(21, 30), {}, true});
        EXPECT_EQ(rig.engine.tick(at(21, 34)).size(), 1u);
    }
    {
        Rig rig;
        rig.store.put_schedule({"s1", "x", {1, "set_on", ""}, When::at(21, 30), {}, true});
        EXPECT_EQ(rig.engine.tick(at(21, 36)).size(), 0u);
    }
}

TEST(Engine, DeterministicOrder) {
    Rig rig;
    rig.set_gas(90, SimTime{1});
    rig.store.put_rule({"rb", "b", {gas_above(50)}, {{3, "open", ""}}, true});
    rig.store.put_rule({"ra", "a", {gas_above(50)}, {{1, "set_on", ""}, {3, "close", ""}}, true});
    rig.store.put_schedule({"s2", "y", {1, "set_off", ""}, When::now(), {}, true});
    rig.store.put_schedule({"s1", "x", {1, "set_on", ""}, When::now(), {}, true});
    const auto fired = rig.engine.tick(SimTime{100});
    std::vector<std::string> order;
    for (const auto& f : fired) order.push_back(f.source_id + ":" + f.call.action);
    EXPECT_EQ(order, (std::vector<std::string>{"s1:set_on", "s2:set_off", "ra:set_on", "ra:close", "rb:open"}));
}

TEST(CrossesTimeOfDay, Windows) {
    EXPECT_TRUE(crosses_time_of_day(at(21, 29, 59), at(21, 30), 21 * 60 + 30));
    EXPECT_FALSE(crosses_time_of_day(at(21, 30), at(21, 31), 21 * 60 + 30));
    EXPECT_TRUE(crosses_time_of_day(at(23, 59), at(0, 1, 0, 1), 0));
    EXPECT_FALSE(crosses_time_of_day(at(1, 0), at(1, 0), 60));
    EXPECT_TRUE(crosses_time_of_day(at(22, 0), at(22, 0, 0, 2), 60));
}

TEST(Engine, GasRampOpensWindowWithinOneTick) {
    ServerConfig cfg;
    cfg.auth = {"code", "secret", 300s};
    Snapshot init;
    init.devices[2] = gas();
    init.devices[3] = window();
    init.rules["r1"] = Rule{"r1", "vent", {gas_above(80)}, {{3, "open", ""}}, true};
    HomeServer server(cfg, init);
    server.fleet().set_behavior(2, std::make_unique<sim::LevelRamp>(SimTime{0}, 0, 100s, 100));
    std::optional<SimTime> crossed, opened;
    server.tick_now();
    while (server.clock().now() < 120s && !opened) {
        server.step();
        const auto snap = server.store().snapshot();
        if (!crossed && snap->state(2)->level > 80) crossed = snap->state(2)->timestamp;
        if (!opened && snap->state(3)->status == "open") opened = snap->state(3)->timestamp;
    }
    ASSERT_TRUE(crossed && opened);
    EXPECT_LE(*opened - *crossed, kTick);
}
