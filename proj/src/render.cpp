#include "dynplan/render.hpp"

#include <fstream>
#include <stdexcept>
#include <system_error>
#include <vector>

namespace dynplan {
namespace {

class Canvas {
public:
    Canvas(int w, int h, Rgb fill) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h, fill) {}

    void put(int x, int y, Rgb c) {
        if (x >= 0 && y >= 0 && x < w_ && y < h_) {
            px_[static_cast<std::size_t>(y) * w_ + x] = c;
        }
    }

    std::string ppm() const {
        std::string out = "P6\n" + std::to_string(w_) + " " + std::to_string(h_) + "\n255\n";
        out.reserve(out.size() + px_.size() * 3);
        for (const auto& c : px_) {
            out.push_back(static_cast<char>(c[0]));
            out.push_back(static_cast<char>(c[1]));
            out.push_back(static_cast<char>(c[2]));
        }
        return out;
    }

private:
    int w_;
    int h_;
    std::vector<Rgb> px_;
};

void paint_footprint(Canvas& canvas, Vec2 center, int goal_size, Rgb color) {
    const Pixel o = goal_footprint_origin(center, goal_size);
    for (int dy = 0; dy < goal_size; ++dy) {
        for (int dx = 0; dx < goal_size; ++dx) {
            canvas.put(o.x + dx, o.y + dy, color);
        }
    }
}

}  // namespace

Rgb palette_color(std::uint8_t value) {
    if (value == kFreeCell) {
        return kFreeRgb;
    }
    if (value == kGoalCell) {
        return kGoalRgb;
    }
    if (is_obstacle_cell(value)) {
        return kClassRgb[static_cast<std::size_t>(value - 1)];
    }
    throw std::invalid_argument("palette value " + std::to_string(value) + " out of range");
}

std::string encode_ppm(const Frame& frame, std::optional<Pixel> agent) {
    Canvas canvas(frame.width(), frame.height(), kFreeRgb);
    for (int y = 0; y < frame.height(); ++y) {
        for (int x = 0; x < frame.width(); ++x) {
            canvas.put(x, y, palette_color(frame.at(x, y)));
        }
    }
    if (agent) {
        canvas.put(agent->x, agent->y, kAgentRgb);
    }
    return canvas.ppm();
}

std::string encode_error_map(const ErrorMap& err, const Frame& truth, int goal_size) {
    Canvas canvas(truth.width(), truth.height(), kErrorBackgroundRgb);
    for (const auto& p : err.fn_cells) {
        canvas.put(p.x, p.y, kFalseNegativeRgb);
    }
    for (const auto& p : err.fp_cells) {
        canvas.put(p.x, p.y, kFalsePositiveRgb);
    }
    for (int y = 0; y < truth.height(); ++y) {
        for (int x = 0; x < truth.width(); ++x) {
            if (truth.at(x, y) == kGoalCell) {
                canvas.put(x, y, kGoalRgb);
            }
        }
    }
    if (err.predicted_goal) {
        paint_footprint(canvas, *err.predicted_goal, goal_size, kPredictedGoalRgb);
    }
    return canvas.ppm();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
    }
}

void render_ppm(const Frame& frame, std::optional<Pixel> agent, const std::filesystem::path& path) {
    write_file_atomic(path, encode_ppm(frame, agent));
}

void render_error_map(const ErrorMap& err, const Frame& truth, int goal_size, const std::filesystem::path& path) {
    write_file_atomic(path, encode_error_map(err, truth, goal_size));
}

}  // namespace dynplan
