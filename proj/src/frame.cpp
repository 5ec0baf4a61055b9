#include "dynplan/frame.hpp"

#include <charconv>
#include <stdexcept>

namespace dynplan {

bool Frame::goal_center(double& cx, double& cy) const {
    long sx = 0;
    long sy = 0;
    long n = 0;
    for (int y = 0; y < height_; ++y) {
        for (int x = 0; x < width_; ++x) {
            if (at(x, y) == kGoalCell) {
                sx += x;
                sy += y;
                ++n;
            }
        }
    }
    if (n == 0) {
        return false;
    }
    cx = static_cast<double>(sx) / static_cast<double>(n);
    cy = static_cast<double>(sy) / static_cast<double>(n);
    return true;
}

std::string encode_rle(const Frame& frame) {
    std::string out;
    const auto& cells = frame.cells();
    std::size_t i = 0;
    while (i < cells.size()) {
        std::size_t j = i;
        while (j < cells.size() && cells[j] == cells[i]) {
            ++j;
        }
        if (!out.empty()) {
            out.push_back(',');
        }
        out += std::to_string(static_cast<int>(cells[i]));
        out.push_back(':');
        out += std::to_string(j - i);
        i = j;
    }
    return out;
}

Frame decode_rle(std::string_view text, int height, int width) {
    Frame frame(height, width);
    std::size_t pos = 0;
    std::size_t written = 0;
    const std::size_t total = static_cast<std::size_t>(height) * width;
    while (pos < text.size()) {
        const std::size_t comma = std::min(text.find(',', pos), text.size());
        const std::string_view run = text.substr(pos, comma - pos);
        const std::size_t colon = run.find(':');
        if (colon == std::string_view::npos) {
            throw std::invalid_argument("rle: run without ':'");
        }
        int value = 0;
        std::size_t count = 0;
        const auto r1 = std::from_chars(run.data(), run.data() + colon, value);
        const auto r2 = std::from_chars(run.data() + colon + 1, run.data() + run.size(), count);
        if (r1.ec != std::errc{} || r2.ec != std::errc{} || value < 0 || value > 255) {
            throw std::invalid_argument("rle: malformed run '" + std::string(run) + "'");
        }
        if (written + count > total) {
            throw std::invalid_argument("rle: runs exceed frame size");
        }
        for (std::size_t k = 0; k < count; ++k, ++written) {
            frame.at(static_cast<int>(written % width), static_cast<int>(written / width)) =
                static_cast<std::uint8_t>(value);
        }
        pos = comma + 1;
    }
    if (written != total) {
        throw std::invalid_argument("rle: runs do not cover the frame");
    }
    return frame;
}

}  // namespace dynplan
