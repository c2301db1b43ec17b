#include "smarthouse/map_codec.hpp"

#include <algorithm>
#include <limits>

#include "smarthouse/text.hpp"

namespace smarthouse::map {
namespace {

constexpr std::string_view kWallsHeader = "#WALLS";
constexpr std::string_view kIconsHeader = "#ICONS";

bool channel_ok(int c) { return c >= 0 && c <= 255; }

[[noreturn]] void fail(CodecErrc code, int line, const std::string& msg) { throw CodecError(code, line, msg); }

std::int32_t parse_coord(std::string_view s, int line) {
    const auto v = text::parse_int(s);
    if (!v || *v < std::numeric_limits<std::int32_t>::min() || *v > std::numeric_limits<std::int32_t>::max())
        fail(CodecErrc::syntax, line, "bad integer '" + std::string(s) + "'");
    return static_cast<std::int32_t>(*v);
}

Polyline decode_wall(std::string_view line_text, int line) {
    std::vector<Point> pts;
    for (auto pair : text::split(line_text, ';')) {
        const auto xy = text::split(pair, ',');
        if (xy.size() != 2) fail(CodecErrc::syntax, line, "expected x,y pair");
        pts.push_back({parse_coord(xy[0], line), parse_coord(xy[1], line)});
    }
    if (pts.size() < 4) fail(CodecErrc::truncated_polyline, line, "truncated polyline");
    Polyline wall;
    try {
        auto [width, color] = unpack_header(pts[0], pts[1]);
        wall.width = width;
        wall.color = color;
    } catch (const CodecError& e) {
        fail(CodecErrc::malformed_header, line, e.what());
    }
    wall.points.assign(pts.begin() + 2, pts.end());
    return wall;
}

IconRecord decode_icon(std::string_view line_text, int line) {
    const auto fields = text::split(line_text, '|');
    if (fields.size() != 5) fail(CodecErrc::syntax, line, "icon line needs 5 fields");
    IconRecord icon;
    const auto oid = text::parse_int(fields[0]);
    if (!oid || *oid < 0) fail(CodecErrc::syntax, line, "bad oid");
    icon.oid = *oid;
    auto name = text::unescape(fields[1]);
    if (!name) fail(CodecErrc::syntax, line, "bad escape in name");
    icon.name = std::move(*name);
    icon.position = {parse_coord(fields[2], line), parse_coord(fields[3], line)};
    const auto icon_id = text::parse_int(fields[4]);
    if (!icon_id || *icon_id < 0 || *icon_id > std::numeric_limits<int>::max())
        fail(CodecErrc::syntax, line, "bad icon id");
    icon.icon_id = static_cast<int>(*icon_id);
    return icon;
}

}  // namespace

CodecError::CodecError(CodecErrc code, int line, const std::string& what)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), code_(code), line_(line) {}

std::pair<Point, Point> pack_header(int width, Rgb color) {
    if (width < 1 || width > kMaxWidth) throw CodecError(CodecErrc::range, 0, "width out of range");
    if (!channel_ok(color.r) || !channel_ok(color.g) || !channel_ok(color.b))
        throw CodecError(CodecErrc::range, 0, "color channel out of 0..255");
    return {Point{width, color.r}, Point{color.g, color.b}};
}

std::pair<int, Rgb> unpack_header(Point first, Point second) {
    if (first.x < 1 || first.x > kMaxWidth) throw CodecError(CodecErrc::malformed_header, 0, "malformed header: width");
    if (!channel_ok(first.y) || !channel_ok(second.x) || !channel_ok(second.y))
        throw CodecError(CodecErrc::malformed_header, 0, "malformed header: color channel");
    return {first.x, Rgb{first.y, second.x, second.y}};
}

std::string encode_wall(const Polyline& wall) {
    if (wall.points.size() < 2) throw CodecError(CodecErrc::truncated_polyline, 0, "wall needs two points");
    const auto [h1, h2] = pack_header(wall.width, wall.color);
    std::string out;
    auto put = [&out](Point p) {
        if (!out.empty()) out.push_back(';');
        out += std::to_string(p.x);
        out.push_back(',');
        out += std::to_string(p.y);
    };
    put(h1);
    put(h2);
    for (const auto& p : wall.points) put(p);
    return out;
}

std::string encode_icon(const IconRecord& icon) {
    if (icon.oid < 0 || icon.icon_id < 0) throw CodecError(CodecErrc::range, 0, "negative oid or icon id");
    return std::to_string(icon.oid) + '|' + text::escape(icon.name) + '|' + std::to_string(icon.position.x) + '|' +
           std::to_string(icon.position.y) + '|' + std::to_string(icon.icon_id);
}

std::string encode_scene(const MapScene& scene) {
    std::string out(kWallsHeader);
    out.push_back('\n');
    for (const auto& wall : scene.walls) {
        out += encode_wall(wall);
        out.push_back('\n');
    }
    out += kIconsHeader;
    out.push_back('\n');
    for (const auto& icon : scene.icons) {
        out += encode_icon(icon);
        out.push_back('\n');
    }
    return out;
}

MapScene decode_scene_lines(const std::vector<std::string_view>& lines, int first_line) {
    if (lines.empty() || lines[0] != kWallsHeader) fail(CodecErrc::syntax, first_line, "expected #WALLS");
    MapScene scene;
    bool in_icons = false;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const int line_no = first_line + static_cast<int>(i);
        const auto line = lines[i];
        if (!in_icons && line == kIconsHeader) {
            in_icons = true;
            continue;
        }
        if (line.empty()) fail(CodecErrc::syntax, line_no, "empty line");
        if (line.front() == '#') fail(CodecErrc::syntax, line_no, "unexpected section " + std::string(line));
        if (in_icons)
            scene.icons.push_back(decode_icon(line, line_no));
        else
            scene.walls.push_back(decode_wall(line, line_no));
    }
    if (!in_icons) fail(CodecErrc::syntax, first_line + static_cast<int>(lines.size()), "missing #ICONS");
    return scene;
}

MapScene decode_scene(std::string_view text) {
    if (text.empty() || text.back() != '\n') fail(CodecErrc::syntax, static_cast<int>(std::count(text.begin(), text.end(), '\n')) + 1,
                                                      "scene must end with a newline");
    auto lines = text::split(text.substr(0, text.size() - 1), '\n');
    return decode_scene_lines(lines, 1);
}

std::optional<IconRecord> hit_test(const MapScene& scene, Point click, int radius) {
    if (radius < 0) return std::nullopt;
    const std::int64_t r2 = static_cast<std::int64_t>(radius) * radius;
    const IconRecord* best = nullptr;
    std::int64_t best_d2 = 0;
    for (const auto& icon : scene.icons) {
        if (icon.oid == 0) continue;
        const std::int64_t dx = static_cast<std::int64_t>(icon.position.x) - click.x;
        const std::int64_t dy = static_cast<std::int64_t>(icon.position.y) - click.y;
        const std::int64_t d2 = dx * dx + dy * dy;
        if (d2 > r2) continue;
        if (!best || d2 < best_d2 || (d2 == best_d2 && icon.oid < best->oid)) {
            best = &icon;
            best_d2 = d2;
        }
    }
    if (!best) return std::nullopt;
    return *best;
}

int icon_for(StatusSchema schema, const DeviceState& state) {
    const bool leveled = schema == StatusSchema::leveled;
    if (leveled != state.level.has_value() || !is_valid_status(schema, state.status))
        throw std::invalid_argument("state does not match schema " + std::string(to_string(schema)));
    switch (schema) {
        case StatusSchema::on_off:
            return state.status == "on" ? icons::kOn : icons::kOff;
        case StatusSchema::presence:
            return state.status == "present" ? icons::kPresent : icons::kAbsent;
        case StatusSchema::open_closed:
            return state.status == "open" ? icons::kOpen : icons::kClosed;
        case StatusSchema::leveled: {
            const int level = *state.level;
            if (level < 0 || level > 100) throw std::invalid_argument("level out of 0..100");
            if (level <= 33) return icons::kLevelLow;
            if (level <= 66) return icons::kLevelMid;
            return icons::kLevelHigh;
        }
    }
    throw std::invalid_argument("unknown schema");
}

}  // namespace smarthouse::map
