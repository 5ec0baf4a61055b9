#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dynplan {

// Palette values of a rendered frame: FREE, obstacle classes 1..5, GOAL.
inline constexpr std::uint8_t kFreeCell = 0;
inline constexpr std::uint8_t kGoalCell = 6;
inline constexpr int kNumObstacleClasses = 5;

inline constexpr bool is_obstacle_cell(std::uint8_t v) { return v >= 1 && v <= kNumObstacleClasses; }

struct Pixel {
    int x = 0;  // column
    int y = 0;  // row
    friend bool operator==(const Pixel&, const Pixel&) = default;
    friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

// Row-major palette raster. The agent is never part of a frame.
class Frame {
public:
    Frame() = default;
    Frame(int height, int width, std::uint8_t fill = kFreeCell)
        : height_(height), width_(width), cells_(static_cast<std::size_t>(height) * width, fill) {}

    int height() const { return height_; }
    int width() const { return width_; }
    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }

    std::uint8_t at(int x, int y) const { return cells_[index(x, y)]; }
    std::uint8_t& at(int x, int y) { return cells_[index(x, y)]; }

    const std::vector<std::uint8_t>& cells() const { return cells_; }

    // Centroid of GOAL cells in pixel coordinates; false if the frame has none.
    bool goal_center(double& cx, double& cy) const;

    friend bool operator==(const Frame&, const Frame&) = default;

private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int height_ = 0;
    int width_ = 0;
    std::vector<std::uint8_t> cells_;
};

// Row-major run-length encoding "value:count,value:count,...".
std::string encode_rle(const Frame& frame);
Frame decode_rle(std::string_view text, int height, int width);

}  // namespace dynplan
