#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "evk/error.hpp"
#include "evk/event.hpp"
#include "evk/plane.hpp"

namespace evk {

/// Placement of a texture's centre on the sensor plane.
struct Pose {
    double tx = 0.0; // pixels
    double ty = 0.0;
    double rotation = 0.0; // radians
    double scale = 1.0;

    friend bool operator==(const Pose&, const Pose&) = default;
};

/// Linear interpolation between two poses over `duration` seconds.
struct Trajectory {
    Pose start;
    Pose end;
    double duration = 1.0;

    [[nodiscard]] Pose at(double t) const {
        const double f = t / duration;
        return {start.tx + f * (end.tx - start.tx), start.ty + f * (end.ty - start.ty),
                start.rotation + f * (end.rotation - start.rotation), start.scale + f * (end.scale - start.scale)};
    }
    /// Time derivative of the pose (constant along the trajectory).
    [[nodiscard]] Pose rate() const {
        return {(end.tx - start.tx) / duration, (end.ty - start.ty) / duration,
                (end.rotation - start.rotation) / duration, (end.scale - start.scale) / duration};
    }
};

/// Grayscale texture with a per-texel opacity mask, both in [0, 1].
struct Texture {
    Image value;
    Image alpha;

    static Texture opaque(Image value) {
        Image alpha(value.width(), value.height(), 1.0);
        return {std::move(value), std::move(alpha)};
    }
};

struct SceneObject {
    Texture texture;
    Trajectory trajectory;
};

/// Static background plus objects listed back to front.
struct Scene {
    Geometry geometry;
    Image background;
    std::vector<SceneObject> objects;
    double duration = 1.0;
};

inline void validate_scene(const Scene& scene) {
    require(scene.geometry.width > 0 && scene.geometry.height > 0, "scene geometry must be non-empty");
    require(scene.duration > 0.0 && std::isfinite(scene.duration), "scene duration must be > 0");
    require(scene.background.width() >= scene.geometry.width && scene.background.height() >= scene.geometry.height,
            "background must cover the sensor geometry");
    auto in_unit = [](const Image& img) {
        return std::all_of(img.data().begin(), img.data().end(), [](double v) { return v >= 0.0 && v <= 1.0; });
    };
    require(in_unit(scene.background), "background values must lie in [0, 1]");
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        const auto& obj = scene.objects[i];
        const std::string which = "object " + std::to_string(i);
        require(obj.texture.value.width() > 0 && obj.texture.value.height() > 0, which + ": empty texture");
        require(obj.texture.alpha.geometry() == obj.texture.value.geometry(), which + ": alpha mask size mismatch");
        require(in_unit(obj.texture.value) && in_unit(obj.texture.alpha), which + ": texture values outside [0, 1]");
        require(obj.trajectory.duration > 0.0, which + ": trajectory duration must be > 0");
        require(obj.trajectory.start.scale > 0.0 && obj.trajectory.end.scale > 0.0, which + ": scale must be > 0");
    }
}

namespace detail {

/// Maps sensor pixels into texture coordinates for one pose. The texture occupies
/// [-0.5, w-0.5) x [-0.5, h-0.5) in its own frame, pivoting about its centre.
struct TextureMapping {
    double tx, ty, cos_r, sin_r, inv_scale, cx, cy, half_w, half_h;
    int w, h;

    TextureMapping(const Texture& tex, const Pose& pose)
        : tx(pose.tx), ty(pose.ty), cos_r(std::cos(pose.rotation)), sin_r(std::sin(pose.rotation)),
          inv_scale(1.0 / pose.scale), cx((tex.value.width() - 1) * 0.5), cy((tex.value.height() - 1) * 0.5),
          half_w(tex.value.width() * 0.5), half_h(tex.value.height() * 0.5), w(tex.value.width()),
          h(tex.value.height()) {}

    /// Returns false when the pixel falls outside the texture rectangle.
    bool map(double px, double py, double& qx, double& qy) const {
        const double dx = px - tx;
        const double dy = py - ty;
        qx = cx + (cos_r * dx + sin_r * dy) * inv_scale;
        qy = cy + (-sin_r * dx + cos_r * dy) * inv_scale;
        return qx >= -0.5 && qx < w - 0.5 && qy >= -0.5 && qy < h - 0.5;
    }

    /// Sensor-space bounding box of the texture rectangle, clipped to the geometry.
    void bounds(Geometry g, int& x0, int& y0, int& x1, int& y1) const {
        const double scale = 1.0 / inv_scale;
        double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
        for (double sx : {-half_w, half_w}) {
            for (double sy : {-half_h, half_h}) {
                const double px = tx + scale * (cos_r * sx - sin_r * sy);
                const double py = ty + scale * (sin_r * sx + cos_r * sy);
                min_x = std::min(min_x, px);
                max_x = std::max(max_x, px);
                min_y = std::min(min_y, py);
                max_y = std::max(max_y, py);
            }
        }
        x0 = static_cast<int>(std::max(0.0, std::floor(min_x) - 1));
        y0 = static_cast<int>(std::max(0.0, std::floor(min_y) - 1));
        x1 = static_cast<int>(std::min<double>(g.width - 1, std::ceil(max_x) + 1));
        y1 = static_cast<int>(std::min<double>(g.height - 1, std::ceil(max_y) + 1));
    }
};

} // namespace detail

/// Composites the scene at time t: each object's texture is bilinearly sampled through
/// the inverse of its interpolated pose and alpha-blended over what lies beneath.
[[nodiscard]] inline Image render_frame(const Scene& scene, double t) {
    require(t >= 0.0 && t <= scene.duration, "render time outside [0, duration]");
    const Geometry g = scene.geometry;
    Image out(g);
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) out(x, y) = scene.background(x, y);
    }
    for (const auto& obj : scene.objects) {
        const detail::TextureMapping map(obj.texture, obj.trajectory.at(t));
        int x0, y0, x1, y1;
        map.bounds(g, x0, y0, x1, y1);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                double qx, qy;
                if (!map.map(x, y, qx, qy)) continue;
                const double a = sample_bilinear(obj.texture.alpha, qx, qy);
                if (a <= 0.0) continue;
                const double v = sample_bilinear(obj.texture.value, qx, qy);
                out(x, y) = a * v + (1.0 - a) * out(x, y);
            }
        }
    }
    return out;
}

/// Analytic optic flow at time t: the pose derivative of the topmost object with
/// non-zero coverage at each pixel; the static background contributes zero.
[[nodiscard]] inline FlowField analytic_flow(const Scene& scene, double t) {
    require(t >= 0.0 && t <= scene.duration, "flow time outside [0, duration]");
    const Geometry g = scene.geometry;
    FlowField flow(g);
    for (const auto& obj : scene.objects) {
        const Pose pose = obj.trajectory.at(t);
        const Pose rate = obj.trajectory.rate();
        const detail::TextureMapping map(obj.texture, pose);
        const double dilation = rate.scale / pose.scale;
        int x0, y0, x1, y1;
        map.bounds(g, x0, y0, x1, y1);
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                double qx, qy;
                if (!map.map(x, y, qx, qy)) continue;
                if (sample_bilinear(obj.texture.alpha, qx, qy) <= 0.0) continue;
                const double dx = x - pose.tx;
                const double dy = y - pose.ty;
                flow.u(x, y) = static_cast<float>(rate.tx + dilation * dx - rate.rotation * dy);
                flow.v(x, y) = static_cast<float>(rate.ty + dilation * dy + rate.rotation * dx);
            }
        }
    }
    return flow;
}

} // namespace evk
