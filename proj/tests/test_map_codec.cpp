#include <gtest/gtest.h>

#include "smarthouse/map_codec.hpp"
#include "scene_gen.hpp"

using namespace smarthouse;
using namespace smarthouse::map;

TEST(Header, PackExamples) {
    EXPECT_EQ(pack_header(3, {255, 128, 0}), std::make_pair(Point{3, 255}, Point{128, 0}));
    EXPECT_EQ(pack_header(1, {0, 0, 0}), std::make_pair(Point{1, 0}, Point{0, 0}));
}

TEST(Header, UnpackExamples) {
    EXPECT_EQ(unpack_header({3, 255}, {128, 0}), std::make_pair(3, Rgb{255, 128, 0}));
    EXPECT_EQ(unpack_header({1, 0}, {0, 0}), std::make_pair(1, Rgb{0, 0, 0}));
}

TEST(Header, ZeroWidthIsMalformed) {
    try {
        unpack_header({0, 5}, {5, 5});
        FAIL();
    } catch (const CodecError& e) {
        EXPECT_EQ(e.code(), CodecErrc::malformed_header);
    }
    EXPECT_THROW(unpack_header({1, 256}, {0, 0}), CodecError);
    EXPECT_THROW(unpack_header({1, 0}, {-1, 0}), CodecError);
}

TEST(Header, PackRangeErrors) {
    EXPECT_THROW(pack_header(0, {0, 0, 0}), CodecError);
    EXPECT_THROW(pack_header(kMaxWidth + 1, {0, 0, 0}), CodecError);
    EXPECT_THROW(pack_header(1, {0, 300, 0}), CodecError);
}

TEST(Header, RandomRoundTrip) {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> w(1, kMaxWidth), ch(0, 255);
    for (int i = 0; i < 1000; ++i) {
        const int width = w(rng);
        const Rgb c{ch(rng), ch(rng), ch(rng)};
        const auto [p1, p2] = pack_header(width, c);
        ASSERT_EQ(unpack_header(p1, p2), std::make_pair(width, c));
    }
}

TEST(Scene, EmptyScene) {
    EXPECT_EQ(encode_scene({}), "#WALLS\n#ICONS\n");
    EXPECT_EQ(decode_scene("#WALLS\n#ICONS\n"), MapScene{});
}

TEST(Scene, OneRedWall) {
    MapScene s;
    s.walls.push_back({2, {255, 0, 0}, {{0, 0}, {10, 0}}});
    EXPECT_EQ(encode_scene(s), "#WALLS\n2,255;0,0;0,0;10,0\n#ICONS\n");
    EXPECT_EQ(decode_scene(encode_scene(s)), s);
}

TEST(Scene, HeaderOnlyWallIsTruncated) {
    try {
        decode_scene("#WALLS\n2,255;0,0\n#ICONS\n");
        FAIL();
    } catch (const CodecError& e) {
        EXPECT_EQ(e.code(), CodecErrc::truncated_polyline);
        EXPECT_EQ(e.line(), 2);
    }
    EXPECT_THROW(decode_scene("#WALLS\n2,255;0,0;5,5\n#ICONS\n"), CodecError);
}

TEST(Scene, DecorativeIcon) {
    const auto s = decode_scene("#WALLS\n#ICONS\n0|sofa|40|60|17\n");
    ASSERT_EQ(s.icons.size(), 1u);
    EXPECT_EQ(s.icons[0], (IconRecord{0, "sofa", {40, 60}, 17}));
}

TEST(Scene, EscapedIconName) {
    MapScene s;
    s.icons.push_back({4, "door|main; left,1\n", {1, 2}, 40});
    const auto text = encode_scene(s);
    EXPECT_EQ(text, "#WALLS\n#ICONS\n4|door%7Cmain%3B%20left%2C1%0A|1|2|40\n");
    EXPECT_EQ(decode_scene(text), s);
}

TEST(Scene, SyntaxErrorsCarryLineNumbers) {
    auto line_of = [](std::string_view text) {
        try {
            decode_scene(text);
        } catch (const CodecError& e) {
            return e.line();
        }
        return -1;
    };
    EXPECT_EQ(line_of("#ICONS\n"), 1);
    EXPECT_EQ(line_of("#WALLS\n1,0;0,0;1,1;x,2\n#ICONS\n"), 2);
    EXPECT_EQ(line_of("#WALLS\n#ICONS\n1|a|1|2\n"), 3);
    EXPECT_EQ(line_of("#WALLS\n#ICONS\n-1|a|1|2|3\n"), 3);
    EXPECT_EQ(line_of("#WALLS\n#ICONS"), 2);
    EXPECT_EQ(line_of("#WALLS\n#ICONS\n1|a|1|2|-3\n"), 3);
}

TEST(Scene, RandomRoundTrip) {
    std::mt19937 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const auto s = testgen::random_scene(rng);
        const auto text = encode_scene(s);
        for (char c : text) ASSERT_TRUE(c == '\n' || (c >= 0x20 && c <= 0x7e));
        ASSERT_EQ(decode_scene(text), s);
    }
}

TEST(Scene, EmittedPointCount) {
    MapScene s;
    s.walls.push_back({1, {1, 2, 3}, {{0, 0}, {1, 1}, {2, 2}}});
    const auto line = encode_wall(s.walls[0]);
    EXPECT_EQ(std::count(line.begin(), line.end(), ';') + 1, 5);
}

TEST(HitTest, Examples) {
    MapScene s;
    s.icons.push_back({5, "lamp", {10, 10}, 10});
    ASSERT_TRUE(hit_test(s, {12, 11}, 8));
    EXPECT_EQ(hit_test(s, {12, 11}, 8)->oid, 5);
    EXPECT_FALSE(hit_test(s, {30, 30}, 8));

    MapScene deco;
    deco.icons.push_back({0, "sofa", {10, 10}, 90});
    EXPECT_FALSE(hit_test(deco, {10, 10}, 8));

    MapScene tie;
    tie.icons.push_back({7, "b", {10, 10}, 1});
    tie.icons.push_back({3, "a", {10, 10}, 1});
    EXPECT_EQ(hit_test(tie, {10, 10}, 8)->oid, 3);
}

TEST(HitTest, NearestWinsAndRadiusIsInclusive) {
    MapScene s;
    s.icons.push_back({1, "far", {0, 0}, 1});
    s.icons.push_back({9, "near", {6, 8}, 1});
    EXPECT_EQ(hit_test(s, {6, 7}, 20)->oid, 9);
    EXPECT_EQ(hit_test(s, {3, 4}, 5)->oid, 1);  // distance 5 to both, tie on lowest oid
    EXPECT_FALSE(hit_test(s, {0, 6}, 5));
}

TEST(HitTest, NeverReturnsDecorative) {
    std::mt19937 rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto s = testgen::random_scene(rng);
        const Point click{static_cast<int>(rng() % 1000), static_cast<int>(rng() % 1000)};
        if (auto hit = hit_test(s, click, 200)) ASSERT_NE(hit->oid, 0);
    }
}

TEST(IconFor, DistinctPerStatus) {
    const DeviceState closed{1, "closed", std::nullopt, SimTime{0}};
    const DeviceState open{1, "open", std::nullopt, SimTime{0}};
    EXPECT_NE(icon_for(StatusSchema::open_closed, closed), icon_for(StatusSchema::open_closed, open));
    const DeviceState l0{1, "level", 0, SimTime{0}}, l33{1, "level", 33, SimTime{0}}, l34{1, "level", 34, SimTime{0}},
        l100{1, "level", 100, SimTime{0}};
    EXPECT_EQ(icon_for(StatusSchema::leveled, l0), icons::kLevelLow);
    EXPECT_EQ(icon_for(StatusSchema::leveled, l33), icons::kLevelLow);
    EXPECT_EQ(icon_for(StatusSchema::leveled, l34), icons::kLevelMid);
    EXPECT_EQ(icon_for(StatusSchema::leveled, l100), icons::kLevelHigh);
    const DeviceState on{1, "on", std::nullopt, SimTime{0}};
    EXPECT_EQ(icon_for(StatusSchema::on_off, on), icon_for(StatusSchema::on_off, on));
    EXPECT_THROW(icon_for(StatusSchema::on_off, open), std::invalid_argument);
}
