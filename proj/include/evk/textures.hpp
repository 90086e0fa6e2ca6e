#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "evk/plane.hpp"
#include "evk/random.hpp"

namespace evk {

[[nodiscard]] inline Image checkerboard(int width, int height, int square, double dark = 0.1, double light = 0.9) {
    require(square > 0, "checkerboard square size must be > 0");
    Image img(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) img(x, y) = ((x / square + y / square) % 2 == 0) ? dark : light;
    }
    return img;
}

/// Multi-octave value noise rescaled to [lo, hi]. Deterministic in the generator key.
[[nodiscard]] inline Image value_noise(int width, int height, const CounterRng& rng, int octaves = 4,
                                       int base_cells = 4, double lo = 0.05, double hi = 0.95) {
    Image acc(width, height, 0.0);
    double amplitude = 1.0;
    int cells = base_cells;
    std::uint64_t counter = 0;
    for (int o = 0; o < octaves; ++o) {
        Image lattice(cells + 1, cells + 1);
        for (std::size_t i = 0; i < lattice.size(); ++i) lattice[i] = rng.uniform_at(counter++);
        const Image up = resample(lattice, width, height);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += amplitude * up[i];
        amplitude *= 0.5;
        cells *= 2;
    }
    const auto [mn, mx] = std::minmax_element(acc.data().begin(), acc.data().end());
    const double range = std::max(*mx - *mn, 1e-12);
    const double low = *mn;
    for (auto& v : acc.data()) v = lo + (hi - lo) * (v - low) / range;
    return acc;
}

/// Seeded stand-in for a photo collection: textured noise images with varied scales.
[[nodiscard]] inline std::vector<Image> procedural_assets(std::size_t count, int size, std::uint64_t seed) {
    std::vector<Image> pool;
    pool.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const CounterRng rng(seed, RngRole::Assets, {i});
        const int base = 2 + static_cast<int>(rng.at(1u << 30) % 6);
        pool.push_back(value_noise(size, size, rng, 5, base));
    }
    return pool;
}

} // namespace evk
