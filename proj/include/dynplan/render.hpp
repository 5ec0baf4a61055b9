#pragma once

// Binary PPM (P6) rasters, one pixel per cell.
//
// Frame palette:
//   FREE     (68, 1, 84)     violet
//   class 1  (0, 255, 255)   cyan
//   class 2  (0, 200, 200)
//   class 3  (64, 224, 208)
//   class 4  (0, 160, 255)
//   class 5  (30, 120, 220)
//   GOAL     (253, 231, 37)  yellow
//   agent    (255, 255, 255) white overlay
//
// Error map palette: background (24, 24, 24), false negative red,
// false positive blue, true goal yellow, predicted goal orange (255, 165, 0)
// drawn last, so a perfect goal prediction shows orange only.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "dynplan/env.hpp"
#include "dynplan/forward_models.hpp"
#include "dynplan/frame.hpp"

namespace dynplan {

using Rgb = std::array<std::uint8_t, 3>;

inline constexpr Rgb kFreeRgb{68, 1, 84};
inline constexpr std::array<Rgb, 5> kClassRgb{{{0, 255, 255}, {0, 200, 200}, {64, 224, 208}, {0, 160, 255}, {30, 120, 220}}};
inline constexpr Rgb kGoalRgb{253, 231, 37};
inline constexpr Rgb kAgentRgb{255, 255, 255};
inline constexpr Rgb kErrorBackgroundRgb{24, 24, 24};
inline constexpr Rgb kFalseNegativeRgb{255, 0, 0};
inline constexpr Rgb kFalsePositiveRgb{0, 0, 255};
inline constexpr Rgb kPredictedGoalRgb{255, 165, 0};

Rgb palette_color(std::uint8_t value);

// "P6\n<w> <h>\n255\n" followed by w*h RGB triplets.
std::string encode_ppm(const Frame& frame, std::optional<Pixel> agent = std::nullopt);
std::string encode_error_map(const ErrorMap& err, const Frame& truth, int goal_size);

// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

void render_ppm(const Frame& frame, std::optional<Pixel> agent, const std::filesystem::path& path);
void render_error_map(const ErrorMap& err, const Frame& truth, int goal_size, const std::filesystem::path& path);

}  // namespace dynplan
