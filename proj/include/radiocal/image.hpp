#pragma once

#include <array>
#include <cassert>
#include <cstddef>
#include <vector>

namespace radiocal {

using Rgb = std::array<double, 3>;

/// RGB raster with channel values in [0,1], row-major storage.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<Rgb> pixels;

    Image() = default;
    Image(int w, int h, Rgb fill = {0.0, 0.0, 0.0})
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    const Rgb& at(int row, int col) const {
        assert(row >= 0 && row < height && col >= 0 && col < width);
        return pixels[static_cast<std::size_t>(row) * width + col];
    }
    Rgb& at(int row, int col) {
        assert(row >= 0 && row < height && col >= 0 && col < width);
        return pixels[static_cast<std::size_t>(row) * width + col];
    }

    bool empty() const { return pixels.empty(); }
};

} // namespace radiocal
