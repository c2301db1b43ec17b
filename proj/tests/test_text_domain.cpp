#include <gtest/gtest.h>

#include <random>

#include "smarthouse/domain.hpp"
#include "smarthouse/text.hpp"

using namespace smarthouse;

TEST(Text, EscapeSeparatorsAndSpace) {
    EXPECT_EQ(text::escape("a|b;c,d e"), "a%7Cb%3Bc%2Cd%20e");
    EXPECT_EQ(text::escape("x\ny"), "x%0Ay");
    EXPECT_EQ(text::escape("100%"), "100%25");
    EXPECT_EQ(text::escape("plain_name-1.2"), "plain_name-1.2");
}

TEST(Text, UnescapeRejectsDanglingPercent) {
    EXPECT_EQ(text::unescape("a%2"), std::nullopt);
    EXPECT_EQ(text::unescape("%zz"), std::nullopt);
    EXPECT_EQ(text::unescape("%"), std::nullopt);
    EXPECT_EQ(text::unescape("a%20b"), "a b");
}

TEST(Text, EscapeRoundTripsArbitraryBytes) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> byte(0, 255), len(0, 40);
    for (int i = 0; i < 2000; ++i) {
        std::string raw(len(rng), '\0');
        for (auto& c : raw) c = static_cast<char>(byte(rng));
        const auto esc = text::escape(raw);
        for (char c : esc) {
            ASSERT_TRUE(c >= 0x21 && c <= 0x7e) << "unprintable byte in escape output";
            ASSERT_EQ(std::string_view("|;,:&=?+# \n").find(c), std::string_view::npos);
        }
        ASSERT_EQ(text::unescape(esc), raw);
    }
}

TEST(Text, SplitKeepsEmptyFields) {
    const auto parts = text::split("a||b|", '|');
    ASSERT_EQ(parts.size(), 4u);
    EXPECT_EQ(parts[1], "");
    EXPECT_EQ(parts[3], "");
    EXPECT_EQ(text::split("", ',').size(), 1u);
}

TEST(Text, ParseInt) {
    EXPECT_EQ(text::parse_int("42"), 42);
    EXPECT_EQ(text::parse_int("-7"), -7);
    EXPECT_EQ(text::parse_int(""), std::nullopt);
    EXPECT_EQ(text::parse_int("4x"), std::nullopt);
    EXPECT_EQ(text::parse_int(" 4"), std::nullopt);
    EXPECT_EQ(text::parse_int("99999999999999999999"), std::nullopt);
}

TEST(Text, Token) {
    EXPECT_TRUE(text::is_token("ph-1.a_b"));
    EXPECT_FALSE(text::is_token(""));
    EXPECT_FALSE(text::is_token("a b"));
    EXPECT_FALSE(text::is_token(std::string(33, 'a')));
}

namespace {

Device lamp() {
    return Device{1, "lamp", DeviceKind::actuator, Criticality::ambient, StatusSchema::on_off, {{"set_on", ArgKind::none}}};
}

bool has(const std::vector<std::string>& v, std::string_view s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

TEST(Domain, ValidLampHasNoViolations) { EXPECT_TRUE(validate_device(lamp()).empty()); }

TEST(Domain, SensorWithCapabilities) {
    auto d = lamp();
    d.kind = DeviceKind::sensor;
    EXPECT_TRUE(has(validate_device(d), "sensor has capabilities"));
}

TEST(Domain, OidZeroIsReserved) {
    auto d = lamp();
    d.oid = 0;
    EXPECT_TRUE(has(validate_device(d), "oid must be >= 1"));
}

TEST(Domain, ActuatorNeedsCapabilities) {
    auto d = lamp();
    d.capabilities.clear();
    EXPECT_TRUE(has(validate_device(d), "actuator has no capabilities"));
    d.kind = DeviceKind::hybrid;
    EXPECT_TRUE(has(validate_device(d), "hybrid has no capabilities"));
}

TEST(Domain, CapabilityChecks) {
    auto d = lamp();
    d.capabilities.push_back({"set_on", ArgKind::none});
    d.capabilities.push_back({"open", ArgKind::none});
    d.capabilities.push_back({"set", ArgKind::level_0_100});
    const auto v = validate_device(d);
    EXPECT_TRUE(has(v, "duplicate action set_on"));
    EXPECT_TRUE(has(v, "action open not applicable to on_off"));
    EXPECT_TRUE(has(v, "action set has inconsistent argument kind"));
}

TEST(Domain, ValidateIsTotalOnGarbage) {
    std::mt19937 rng(11);
    for (int i = 0; i < 500; ++i) {
        Device d;
        d.oid = static_cast<Oid>(rng()) - (1LL << 31);
        d.name = std::string(rng() % 200, 'x');
        d.kind = static_cast<DeviceKind>(rng() % 5);
        d.criticality = static_cast<Criticality>(rng() % 5);
        d.schema = static_cast<StatusSchema>(rng() % 6);
        for (unsigned k = rng() % 4; k > 0; --k)
            d.capabilities.push_back({std::string(1, static_cast<char>('a' + rng() % 26)), static_cast<ArgKind>(rng() % 4)});
        (void)validate_device(d);
    }
}

TEST(Domain, StatusesPerSchema) {
    EXPECT_EQ(statuses_for(StatusSchema::on_off), (std::vector<std::string>{"off", "on"}));
    EXPECT_EQ(statuses_for(StatusSchema::leveled), (std::vector<std::string>{"level"}));
    EXPECT_TRUE(is_valid_status(StatusSchema::presence, "present"));
    EXPECT_FALSE(is_valid_status(StatusSchema::open_closed, "on"));
}

TEST(Domain, ActionArgKindFollowsName) {
    EXPECT_EQ(resolve_action(StatusSchema::leveled, "set_level")->arg_kind, ArgKind::level_0_100);
    EXPECT_EQ(resolve_action(StatusSchema::on_off, "set")->arg_kind, ArgKind::boolean);
    EXPECT_EQ(resolve_action(StatusSchema::open_closed, "toggle")->arg_kind, ArgKind::none);
    EXPECT_FALSE(resolve_action(StatusSchema::presence, "set_level"));
}

TEST(Domain, CheckArg) {
    EXPECT_FALSE(check_arg(ArgKind::level_0_100, "0"));
    EXPECT_FALSE(check_arg(ArgKind::level_0_100, "100"));
    EXPECT_TRUE(check_arg(ArgKind::level_0_100, "101"));
    EXPECT_TRUE(check_arg(ArgKind::level_0_100, "-1"));
    EXPECT_TRUE(check_arg(ArgKind::level_0_100, "050"));
    EXPECT_FALSE(check_arg(ArgKind::boolean, "1"));
    EXPECT_TRUE(check_arg(ArgKind::boolean, "true"));
    EXPECT_FALSE(check_arg(ArgKind::none, ""));
    EXPECT_TRUE(check_arg(ArgKind::none, "x"));
}

TEST(Domain, ValidateState) {
    const Device gas{2, "gas", DeviceKind::sensor, Criticality::vital, StatusSchema::leveled, {}};
    EXPECT_TRUE(validate_state(gas, {2, "level", 40, SimTime{0}}).empty());
    EXPECT_FALSE(validate_state(gas, {2, "level", std::nullopt, SimTime{0}}).empty());
    EXPECT_FALSE(validate_state(gas, {2, "level", 101, SimTime{0}}).empty());
    EXPECT_FALSE(validate_state(lamp(), {1, "on", 3, SimTime{0}}).empty());
    EXPECT_FALSE(validate_state(lamp(), {1, "open", std::nullopt, SimTime{0}}).empty());
}

TEST(Domain, UserPermissions) {
    User u{"bob", Role::mobile, std::set<Oid>{1, 2}, "", ""};
    EXPECT_TRUE(u.may_control(2));
    EXPECT_FALSE(u.may_control(3));
    EXPECT_FALSE(u.may_author_map());
    u.allowed_oids.reset();
    EXPECT_TRUE(u.may_control(99));
}

TEST(Domain, EnumRoundTrip) {
    for (auto c : {Comparator::eq, Comparator::ne, Comparator::lt, Comparator::le, Comparator::gt, Comparator::ge})
        EXPECT_EQ(parse_comparator(to_string(c)), c);
    for (auto k : {DeviceKind::actuator, DeviceKind::sensor, DeviceKind::hybrid}) EXPECT_EQ(parse_device_kind(to_string(k)), k);
    EXPECT_FALSE(parse_criticality("urgent"));
}
