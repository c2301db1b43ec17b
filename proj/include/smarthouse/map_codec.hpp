#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smarthouse/domain.hpp"

namespace smarthouse::map {

struct Point {
    std::int32_t x = 0;
    std::int32_t y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

struct Rgb {
    int r = 0;
    int g = 0;
    int b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// An open wall polyline; the last point is never joined back to the first.
struct Polyline {
    int width = 1;
    Rgb color;
    std::vector<Point> points;  // drawing points, at least two

    friend bool operator==(const Polyline&, const Polyline&) = default;
};

/// Icon placed on the plan. oid 0 marks furniture and other decorative items.
struct IconRecord {
    Oid oid = 0;
    std::string name;
    Point position;
    int icon_id = 0;

    friend bool operator==(const IconRecord&, const IconRecord&) = default;
};

struct MapScene {
    std::vector<Polyline> walls;
    std::vector<IconRecord> icons;

    friend bool operator==(const MapScene&, const MapScene&) = default;
};

inline constexpr int kMaxWidth = 65535;
inline constexpr int kCanvasSize = 1000;

enum class CodecErrc { syntax, malformed_header, truncated_polyline, range };

class CodecError : public std::runtime_error {
public:
    CodecError(CodecErrc code, int line, const std::string& what);

    CodecErrc code() const noexcept { return code_; }
    /// 1-based line number, 0 when not tied to a line.
    int line() const noexcept { return line_; }

private:
    CodecErrc code_;
    int line_;
};

/// Packs width and color into two points as ((width, R), (G, B)).
std::pair<Point, Point> pack_header(int width, Rgb color);
std::pair<int, Rgb> unpack_header(Point first, Point second);

std::string encode_scene(const MapScene& scene);
MapScene decode_scene(std::string_view text);

/// Decodes a scene from pre-split lines starting at `#WALLS`. Used when the
/// scene block is embedded in a larger document. `first_line` numbers errors.
MapScene decode_scene_lines(const std::vector<std::string_view>& lines, int first_line = 1);

std::string encode_wall(const Polyline& wall);
std::string encode_icon(const IconRecord& icon);

/// Nearest selectable icon (oid != 0) within `radius`; ties go to the lowest oid.
std::optional<IconRecord> hit_test(const MapScene& scene, Point click, int radius);

namespace icons {
inline constexpr int kOff = 10;
inline constexpr int kOn = 11;
inline constexpr int kLevelLow = 20;
inline constexpr int kLevelMid = 21;
inline constexpr int kLevelHigh = 22;
inline constexpr int kAbsent = 30;
inline constexpr int kPresent = 31;
inline constexpr int kClosed = 40;
inline constexpr int kOpen = 41;
}  // namespace icons

/// Icon for a device's current state. Throws std::invalid_argument when the
/// state does not fit the schema.
int icon_for(StatusSchema schema, const DeviceState& state);

}  // namespace smarthouse::map
