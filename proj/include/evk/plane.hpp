#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "evk/error.hpp"
#include "evk/event.hpp"

namespace evk {

/// Row-major single-channel raster.
template <typename T>
class Plane {
public:
    Plane() = default;
    Plane(int width, int height, T fill = T{})
        : width_(width), height_(height),
          data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
        require(width >= 0 && height >= 0, "plane dimensions must be non-negative");
    }
    explicit Plane(Geometry g, T fill = T{}) : Plane(g.width, g.height, fill) {}

    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] Geometry geometry() const { return {width_, height_}; }
    [[nodiscard]] std::size_t size() const { return data_.size(); }

    T& operator()(int x, int y) { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    const T& operator()(int x, int y) const { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    [[nodiscard]] std::vector<T>& data() { return data_; }
    [[nodiscard]] const std::vector<T>& data() const { return data_; }

    friend bool operator==(const Plane&, const Plane&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// Grayscale intensity image, values nominally in [0, 1].
using Image = Plane<double>;

struct Frame {
    double t = 0.0;
    Image image;
};

/// Dense optic flow in pixels per second.
struct FlowField {
    Plane<float> u;
    Plane<float> v;

    FlowField() = default;
    explicit FlowField(Geometry g) : u(g), v(g) {}

    [[nodiscard]] Geometry geometry() const { return u.geometry(); }
    friend bool operator==(const FlowField&, const FlowField&) = default;
};

/// Bilinear sample with clamp-to-edge addressing.
[[nodiscard]] inline double sample_bilinear(const Image& img, double x, double y) {
    const double cx = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
    const double cy = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
    const int x0 = static_cast<int>(cx);
    const int y0 = static_cast<int>(cy);
    const int x1 = std::min(x0 + 1, img.width() - 1);
    const int y1 = std::min(y0 + 1, img.height() - 1);
    const double fx = cx - x0;
    const double fy = cy - y0;
    const double top = img(x0, y0) * (1.0 - fx) + img(x1, y0) * fx;
    const double bottom = img(x0, y1) * (1.0 - fx) + img(x1, y1) * fx;
    return top * (1.0 - fy) + bottom * fy;
}

/// Bilinear resize mapping pixel centres onto each other.
[[nodiscard]] inline Image resample(const Image& src, int width, int height) {
    require(src.width() > 0 && src.height() > 0, "cannot resample an empty image");
    Image out(width, height);
    const double sx = static_cast<double>(src.width()) / width;
    const double sy = static_cast<double>(src.height()) / height;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            out(x, y) = sample_bilinear(src, (x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5);
        }
    }
    return out;
}

} // namespace evk
