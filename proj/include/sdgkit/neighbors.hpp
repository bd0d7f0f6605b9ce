#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace sdgkit {

// Directional nearest-neighbor table on an even grid of k directions
// u_j = offset - 2*pi*j/k (clockwise indexing). For a candidate q, phi is
// the radius of the disk centered on the ray u_j from p, passing through
// both p and q; its center is the crossing of the ray with the bisector of
// pq. N_j(p) picks the candidate of smallest phi, and that disk is then
// empty of other points, which places its center on the Voronoi edge of pq.

// Radius |pq| / (2 cos theta) with theta the angle between u and pq;
// absent when theta >= pi/2 (the ray never reaches the bisector).
inline std::optional<double> phi_euclid(point p, point q, direction u) {
    if (p == q) throw invalid_input("phi_euclid requires distinct points");
    vec2 d = q - p;
    double proj = dot(u.unit(), d);
    if (proj <= 0.0) return std::nullopt;
    return norm2(d) / (2.0 * proj);
}

class euclid_neighbor_table {
public:
    struct entry {
        int neighbor;
        double radius;
    };

    euclid_neighbor_table(const std::vector<point>& pts, int k, double offset = 0.0)
        : points_(pts), k_(k), offset_(offset) {
        if (k < 8 || k % 2 != 0) throw invalid_input("direction grid needs even k >= 8");
        const int n = static_cast<int>(pts.size());
        if (n < 2) throw invalid_input("neighbor table needs at least 2 points");
        entries_.resize(static_cast<std::size_t>(n) * k_);

        // Candidates sorted by distance once per point; the scan for each
        // direction stops as soon as |pq|/2, a lower bound on phi, exceeds
        // the best radius found so far.
        std::vector<std::vector<int>> by_dist(n);
        for (int p = 0; p < n; ++p) {
            auto& cand = by_dist[p];
            cand.reserve(n - 1);
            for (int q = 0; q < n; ++q)
                if (q != p) cand.push_back(q);
            std::sort(cand.begin(), cand.end(), [&](int a, int b) {
                return norm2(pts[a] - pts[p]) < norm2(pts[b] - pts[p]);
            });
        }

        for (int p = 0; p < n; ++p) {
            for (int j = 0; j < k_; ++j) {
                vec2 uv = u(j).unit();
                std::optional<entry> best;
                double runner_up = std::numeric_limits<double>::infinity();
                for (int q : by_dist[p]) {
                    vec2 d = pts[q] - pts[p];
                    double half = 0.5 * norm(d);
                    if (best && half > best->radius * (1.0 + 1e-9)) break;
                    double proj = dot(uv, d);
                    if (proj <= 0.0) continue;
                    double phi = norm2(d) / (2.0 * proj);
                    if (!best || phi < best->radius) {
                        if (best) runner_up = best->radius;
                        best = entry{q, phi};
                    } else {
                        runner_up = std::min(runner_up, phi);
                    }
                }
                if (best && runner_up - best->radius <= 1e-12 * best->radius)
                    throw general_position_violation(
                        "directional neighbor tie at point " + std::to_string(p) +
                        ", direction " + std::to_string(j));
                entries_[static_cast<std::size_t>(p) * k_ + j] = best;
            }
        }
    }

    int k() const { return k_; }
    double offset() const { return offset_; }
    int size() const { return static_cast<int>(points_.size()); }
    const std::vector<point>& points() const { return points_; }

    direction u(int j) const {
        if (j < 0 || j >= k_) throw invalid_input("direction index out of range");
        return direction(offset_ - 2.0 * pi * j / k_);
    }

    const std::optional<entry>& at(int p, int j) const {
        if (p < 0 || p >= size() || j < 0 || j >= k_)
            throw invalid_input("neighbor table index out of range");
        return entries_[static_cast<std::size_t>(p) * k_ + j];
    }

private:
    std::vector<point> points_;
    int k_;
    double offset_;
    std::vector<std::optional<entry>> entries_;
};

} // namespace sdgkit
