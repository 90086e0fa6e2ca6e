#pragma once

#include <cstdint>
#include <vector>

#include "evk/augment.hpp"
#include "evk/event.hpp"
#include "evk/voxel.hpp"

namespace evk {

/// Default number of temporal bins.
inline constexpr int kDefaultBins = 5;

/// Slices a stream and voxelizes every slice; empty slices give all-zero grids.
[[nodiscard]] inline std::vector<VoxelGrid> voxelize_stream(const EventStream& stream, const SliceStrategy& strategy,
                                                            int bins = kDefaultBins) {
    std::vector<VoxelGrid> grids;
    for (const auto& s : slice(stream, strategy)) grids.push_back(voxelize(s.events, stream.geometry, s.window, bins));
    return grids;
}

struct AugmentConfig {
    bool gaussian_noise = true;
    bool hot_pixels = true;
    bool pause = true;
    NoiseConfig noise;
    PauseConfig pause_params;
};

struct AugmentedSequence {
    std::vector<VoxelGrid> grids;
    std::vector<bool> pause_mask;
};

/// Train-time augmentation of one sequence of grids: per-grid Gaussian noise, then
/// sequence-persistent hot pixels, then paused steps are zeroed entirely.
[[nodiscard]] inline AugmentedSequence augment_sequence(std::vector<VoxelGrid> grids, const AugmentConfig& cfg,
                                                        std::uint64_t sequence_index = 0) {
    AugmentedSequence out;
    if (grids.empty()) return out;
    if (cfg.gaussian_noise) {
        for (std::size_t g = 0; g < grids.size(); ++g) {
            grids[g] = add_gaussian_noise(std::move(grids[g]), cfg.noise, g, sequence_index);
        }
    }
    if (cfg.hot_pixels) grids = add_hot_pixels(std::move(grids), cfg.noise, sequence_index);
    out.pause_mask.assign(grids.size(), false);
    if (cfg.pause) {
        out.pause_mask = pause_schedule(grids.size(), cfg.pause_params, sequence_index);
        for (std::size_t g = 0; g < grids.size(); ++g) {
            if (out.pause_mask[g]) std::fill(grids[g].values.begin(), grids[g].values.end(), 0.0f);
        }
    }
    out.grids = std::move(grids);
    return out;
}

} // namespace evk
