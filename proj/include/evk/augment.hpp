#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <unordered_set>
#include <vector>

#include "evk/error.hpp"
#include "evk/random.hpp"
#include "evk/voxel.hpp"

namespace evk {

struct NoiseConfig {
    double gaussian_sigma = 0.1;
    double hot_pixel_fraction_max = 1e-4;
    double hot_value_sigma = 0.1;
    std::uint64_t seed = 0;

    void validate() const {
        require(gaussian_sigma >= 0.0 && hot_value_sigma >= 0.0, "noise sigmas must be >= 0");
        require(hot_pixel_fraction_max >= 0.0 && hot_pixel_fraction_max <= 1.0,
                "hot_pixel_fraction_max must lie in [0, 1]");
    }
};

/// Two-state running/paused Markov chain parameters.
struct PauseConfig {
    double p_pause_given_run = 0.05;
    double p_pause_given_pause = 0.9;
    std::uint64_t seed = 0;

    void validate() const {
        require(p_pause_given_run >= 0.0 && p_pause_given_run <= 1.0, "p_pause_given_run must lie in [0, 1]");
        require(p_pause_given_pause >= 0.0 && p_pause_given_pause <= 1.0, "p_pause_given_pause must lie in [0, 1]");
    }
};

/// Adds i.i.d. N(0, gaussian_sigma) to every cell. The draw for cell i of grid g in
/// sequence s depends only on (seed, s, g, i).
[[nodiscard]] inline VoxelGrid add_gaussian_noise(VoxelGrid grid, const NoiseConfig& cfg, std::uint64_t grid_index,
                                                  std::uint64_t sequence_index = 0) {
    cfg.validate();
    if (cfg.gaussian_sigma == 0.0) return grid;
    const CounterRng rng(cfg.seed, RngRole::GaussianNoise, {sequence_index, grid_index});
    for (std::size_t i = 0; i < grid.values.size(); ++i) {
        grid.values[i] = static_cast<float>(grid.values[i] + cfg.gaussian_sigma * rng.normal_at(i));
    }
    return grid;
}

struct HotPixel {
    int x;
    int y;
    double value;
};

/// floor(u * H * W) distinct pixels, u ~ U(0, hot_pixel_fraction_max), each with one
/// offset drawn from N(0, hot_value_sigma). Sorted by pixel index.
[[nodiscard]] inline std::vector<HotPixel> sample_hot_pixels(Geometry geometry, const NoiseConfig& cfg,
                                                             std::uint64_t sequence_index = 0) {
    cfg.validate();
    CounterRng rng(cfg.seed, RngRole::HotPixels, {sequence_index});
    const std::size_t n_pixels = geometry.pixels();
    const double u = rng.uniform() * cfg.hot_pixel_fraction_max;
    const auto count = static_cast<std::size_t>(std::floor(u * static_cast<double>(n_pixels)));

    // Floyd's sampling without replacement.
    std::unordered_set<std::size_t> taken;
    for (std::size_t j = n_pixels - count; j < n_pixels; ++j) {
        const auto t = static_cast<std::size_t>(rng.below(j + 1));
        taken.insert(taken.contains(t) ? j : t);
    }
    std::vector<std::size_t> chosen(taken.begin(), taken.end());
    std::sort(chosen.begin(), chosen.end());

    std::vector<HotPixel> out;
    out.reserve(count);
    for (std::size_t idx : chosen) {
        out.push_back({static_cast<int>(idx % geometry.width), static_cast<int>(idx / geometry.width),
                       cfg.hot_value_sigma * rng.normal()});
    }
    return out;
}

/// Adds the same per-pixel hot value to every bin of every grid in the sequence.
[[nodiscard]] inline std::vector<VoxelGrid> add_hot_pixels(std::vector<VoxelGrid> sequence, const NoiseConfig& cfg,
                                                           std::uint64_t sequence_index = 0) {
    if (sequence.empty()) return sequence;
    const Geometry geometry = sequence.front().geometry;
    for (const auto& grid : sequence) {
        require(grid.geometry == geometry, "hot pixels need grids of identical geometry");
    }
    const auto hot = sample_hot_pixels(geometry, cfg, sequence_index);
    for (auto& grid : sequence) {
        for (const auto& h : hot) {
            for (int b = 0; b < grid.bins; ++b) {
                grid.at(b, h.x, h.y) = static_cast<float>(grid.at(b, h.x, h.y) + h.value);
            }
        }
    }
    return sequence;
}

/// mask[i] is true when step i is paused. The chain starts in the running state and
/// transitions once before each step.
[[nodiscard]] inline std::vector<bool> pause_schedule(std::size_t length, const PauseConfig& cfg,
                                                      std::uint64_t sequence_index = 0) {
    require(length >= 1, "pause schedule length must be >= 1");
    cfg.validate();
    const CounterRng rng(cfg.seed, RngRole::Pause, {sequence_index});
    std::vector<bool> mask(length, false);
    bool paused = false;
    for (std::size_t i = 0; i < length; ++i) {
        const double p = paused ? cfg.p_pause_given_pause : cfg.p_pause_given_run;
        paused = rng.uniform_at(i) < p;
        mask[i] = paused;
    }
    return mask;
}

} // namespace evk
