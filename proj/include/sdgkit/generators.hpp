#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "random.hpp"

namespace sdgkit {

// Seeded point-set generators used by the demo driver and the test fixtures.
// Every generator is deterministic in (parameters, seed).

inline std::vector<point> gen_uniform(int n, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
    if (n < 0) throw invalid_input("point count must be nonnegative");
    if (!(lo < hi)) throw invalid_input("box bounds must satisfy lo < hi");
    prng gen(seed);
    std::vector<point> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = gen.uniform(lo, hi);
        double y = gen.uniform(lo, hi);
        pts.push_back({x, y});
    }
    return pts;
}

// Two horizontal rows of widely spaced columns. Each column's vertical pair
// stays a stable Delaunay edge while the along-row edges become weak, which
// pins the stable-edge count near the column count. Jitter of 1e-6 breaks
// the exact cocircular quadruples of the unperturbed grid.
inline std::vector<point> gen_grid_rows(int columns, std::uint64_t seed, double spacing = 5.0) {
    if (columns < 2) throw invalid_input("grid needs at least 2 columns");
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw invalid_input("column spacing must be positive");
    prng gen(seed);
    std::vector<point> pts;
    pts.reserve(2 * static_cast<std::size_t>(columns));
    for (int i = 0; i < columns; ++i) {
        double x = spacing * i;
        pts.push_back({x + 1e-6 * gen.uniform(-1.0, 1.0), 1e-6 * gen.uniform(-1.0, 1.0)});
        pts.push_back({x + 1e-6 * gen.uniform(-1.0, 1.0), 1.0 + 1e-6 * gen.uniform(-1.0, 1.0)});
    }
    return pts;
}

// Points spread around the unit circle with radial jitter of 1e-6: almost
// every quadruple is nearly cocircular, so hull edges are strong and
// interior edges are near zero stability.
inline std::vector<point> gen_near_cocircular(int n, std::uint64_t seed) {
    if (n < 3) throw invalid_input("near-cocircular set needs at least 3 points");
    prng gen(seed);
    std::vector<point> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double ang = 2.0 * pi * i / n + 1e-3 * gen.uniform(-1.0, 1.0);
        double r = 1.0 + 1e-6 * gen.uniform(-1.0, 1.0);
        pts.push_back({r * std::cos(ang), r * std::sin(ang)});
    }
    return pts;
}

// Four points whose long horizontal edge is in the relative neighborhood
// graph yet has stability under 0.05: the flanking pair sits just outside
// the lune but almost on a common circle with the endpoints.
inline std::vector<point> gen_rng_gadget() {
    return {{0.0, 0.0}, {4.0, 0.0}, {-5e-4, 0.04}, {-5e-4, -0.04}};
}

// A center point inside a jittered ring. Every spoke has stability about
// 2*pi/ring, so any threshold above that isolates the center while the ring
// edges stay stable: stable graphs need not be connected.
inline std::vector<point> gen_isolated_vertex(int ring, std::uint64_t seed) {
    if (ring < 8) throw invalid_input("isolated-vertex ring needs at least 8 points");
    prng gen(seed);
    std::vector<point> pts;
    pts.reserve(static_cast<std::size_t>(ring) + 1);
    pts.push_back({0.0, 0.0});
    for (int i = 0; i < ring; ++i) {
        double ang = 2.0 * pi * i / ring + 1e-3 * gen.uniform(-1.0, 1.0);
        double r = 1.0 + 1e-4 * gen.uniform(-1.0, 1.0);
        pts.push_back({r * std::cos(ang), r * std::sin(ang)});
    }
    return pts;
}

} // namespace sdgkit
