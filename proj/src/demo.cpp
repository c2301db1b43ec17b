#include "smarthouse/demo.hpp"

#include "smarthouse/auth.hpp"

namespace smarthouse::demo {
namespace {

Device make(Oid oid, std::string name, DeviceKind kind, Criticality crit, StatusSchema schema,
            std::vector<std::string> actions) {
    Device d{oid, std::move(name), kind, crit, schema, {}};
    for (const auto& a : actions) d.capabilities.push_back(*resolve_action(schema, a));
    return d;
}

map::Polyline wall(int width, map::Rgb color, std::vector<map::Point> pts) { return {width, color, std::move(pts)}; }

}  // namespace

Snapshot house(std::string_view admin_password, std::string_view admin_salt_hex) {
    Snapshot s;
    for (auto d : {
             make(kLamp, "lamp", DeviceKind::actuator, Criticality::ambient, StatusSchema::on_off,
                  {"set_on", "set_off", "toggle"}),
             make(kGasSensor, "gas sensor", DeviceKind::sensor, Criticality::vital, StatusSchema::leveled, {}),
             make(kFrontDoor, "front door", DeviceKind::actuator, Criticality::security, StatusSchema::open_closed,
                  {"open", "close"}),
             make(kWindow, "window", DeviceKind::actuator, Criticality::ambient, StatusSchema::open_closed,
                  {"open", "close"}),
             make(kDriveway, "driveway car", DeviceKind::sensor, Criticality::security, StatusSchema::presence, {}),
             make(kHeartMonitor, "heart monitor", DeviceKind::sensor, Criticality::vital, StatusSchema::leveled, {}),
             make(kThermometer, "thermometer", DeviceKind::sensor, Criticality::ambient, StatusSchema::leveled, {}),
             make(kAirConditioner, "air conditioner", DeviceKind::hybrid, Criticality::ambient, StatusSchema::leveled,
                  {"set_level"}),
         }) {
        s.devices.emplace(d.oid, d);
    }

    const map::Rgb black{0, 0, 0};
    const map::Rgb grey{128, 128, 128};
    s.scene.walls = {
        wall(4, black, {{100, 100}, {900, 100}, {900, 800}, {100, 800}, {100, 100}}),
        wall(2, grey, {{500, 100}, {500, 350}}),
        wall(2, grey, {{500, 550}, {500, 800}}),
    };
    s.scene.icons = {
        {kLamp, "lamp", {300, 250}, map::icons::kOff},
        {kGasSensor, "gas", {750, 200}, map::icons::kLevelLow},
        {kFrontDoor, "front door", {100, 450}, map::icons::kClosed},
        {kWindow, "window", {900, 450}, map::icons::kClosed},
        {kDriveway, "car", {500, 900}, map::icons::kAbsent},
        {kHeartMonitor, "heart", {700, 650}, map::icons::kLevelLow},
        {kThermometer, "temp", {250, 700}, map::icons::kLevelLow},
        {kAirConditioner, "a/c", {800, 300}, map::icons::kLevelLow},
        {0, "sofa", {300, 600}, 90},
        {0, "bed", {700, 500}, 91},
    };

    auto admin = auth::make_user("admin", admin_password, Role::admin, std::nullopt,
                                 admin_salt_hex.empty() ? std::nullopt : std::optional<std::string>(admin_salt_hex));
    s.users.emplace(admin.username, std::move(admin));
    return s;
}

void attach_behaviors(sim::Fleet& fleet) {
    using std::chrono::hours;
    using std::chrono::minutes;
    fleet.set_behavior(kGasSensor, std::make_unique<sim::LevelRamp>(SimTime{0}, 5, hours{1}, 12));
    fleet.set_behavior(kDriveway, std::make_unique<sim::PeriodicToggle>(minutes{10}, "absent", "present"));
    fleet.set_behavior(kHeartMonitor, std::make_unique<sim::LevelRamp>(SimTime{0}, 60, minutes{30}, 72));
    fleet.set_behavior(kThermometer, std::make_unique<sim::LevelRamp>(SimTime{0}, 20, hours{6}, 26));
    fleet.set_initial(kAirConditioner, {"level", 0});
}

}  // namespace smarthouse::demo
