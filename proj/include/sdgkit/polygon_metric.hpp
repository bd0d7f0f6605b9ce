#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "geometry.hpp"

namespace sdgkit {

// Regular k-gon with circumradius exactly 1, vertices v_0..v_{k-1} clockwise,
// and inward vertex directions u_j pointing from v_j to the center. u_j sits
// at angle offset - 2*pi*j/k, matching the direction grid of the Euclidean
// neighbor table, so v_j = -u_j.
class regular_kgon {
public:
    explicit regular_kgon(int k, double offset = 0.0) : k_(k), offset_(offset) {
        if (k < 8 || k % 2 != 0) throw invalid_input("regular_kgon needs even k >= 8");
        if (!std::isfinite(offset)) throw invalid_input("rotation offset must be finite");
    }

    int k() const { return k_; }
    double offset() const { return offset_; }
    double inradius() const { return std::cos(pi / k_); }

    direction u(int j) const { return direction(offset_ - 2.0 * pi * wrap(j) / k_); }
    vec2 vertex(int j) const { return -1.0 * u(j).unit(); }

    // Outward unit normal of the edge from vertex j to vertex j+1.
    vec2 edge_normal(int j) const {
        return direction(offset_ + pi - (2.0 * wrap(j) + 1.0) * pi / k_).unit();
    }

    // True when the segment direction is parallel to some edge or diagonal,
    // within an angular tolerance. All chords of a regular k-gon point along
    // offset + pi/2 + (pi/k) * integer, modulo pi.
    bool chord_parallel(vec2 seg, double tol = 1e-12) const {
        double psi = direction::of(seg).angle();
        double val = (psi - offset_ - pi / 2) * (k_ / pi);
        double frac = std::fabs(val - std::round(val));
        // frac is in units of pi/k; convert the angular tolerance.
        return frac <= tol * (k_ / pi);
    }

private:
    int wrap(int j) const {
        int m = j % k_;
        return m < 0 ? m + k_ : m;
    }
    int k_;
    double offset_;
};

// Smallest lambda with y in x + lambda*Q. Row of outward edge normals n_i
// against the inradius: lambda = max_i <n_i, y-x> / inradius.
inline double dq_distance(const regular_kgon& q, point x, point y) {
    vec2 z = y - x;
    if (z.x == 0.0 && z.y == 0.0) return 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < q.k(); ++i) best = std::max(best, dot(q.edge_normal(i), z));
    return best / q.inradius();
}

// Scale of the v_j-placement of Q pinned at p that has q on its boundary:
// the unique lambda > 0 with q - p = lambda * (u_j + w), w on the boundary
// of Q. Equivalently (q-p)/lambda is the second boundary crossing of the ray
// from the origin, a vertex of Q - v_j, in direction q - p. Absent when the
// ray leaves the vertex cone, i.e. angle(pq, u_j) > pi/2 - pi/k.
inline std::optional<double> phi_diamond(point p, point q, int j, const regular_kgon& Q) {
    if (p == q) throw invalid_input("phi_diamond requires distinct points");
    if (!is_finite(p) || !is_finite(q)) throw invalid_input("phi_diamond requires finite points");

    vec2 pq = q - p;
    double theta = angle_between(direction::of(pq), Q.u(j));
    double bound = pi / 2 - pi / Q.k();
    if (std::fabs(theta - bound) <= 1e-12)
        throw general_position_violation("segment parallel to an edge of the polygon at vertex " +
                                         std::to_string(j));
    if (theta > bound) return std::nullopt;

    vec2 d = normalized(pq);
    vec2 vj = Q.vertex(j);
    double t_exit = -1.0;
    for (int i = 0; i < Q.k(); ++i) {
        int nx = (i + 1) % Q.k();
        if (i == j || nx == j) continue; // edges incident to the pinned vertex pass through the origin
        vec2 a = Q.vertex(i) - vj;
        vec2 b = Q.vertex(nx) - vj;
        vec2 ab = b - a;
        double denom = cross(d, ab);
        if (denom == 0.0) continue; // ray parallel to this edge; a hit would be on a neighbor edge
        double t = cross(a, ab) / denom;
        double s = cross(a, d) / denom;
        if (t <= 1e-9 || s < -1e-9 || s > 1.0 + 1e-9) continue;
        if (t_exit > 0.0 && std::fabs(t - t_exit) > 1e-9 * std::max(t, t_exit))
            throw internal_inconsistency("two distinct boundary exits for a convex polygon ray");
        t_exit = std::max(t_exit, t);
    }
    if (t_exit <= 0.0)
        throw internal_inconsistency("ray inside the vertex cone found no boundary exit");
    return norm(pq) / t_exit;
}

// General-position screen from the polygon side: no two input points may lie
// on a line parallel to an edge or diagonal of Q.
inline void require_no_chord_parallel(const std::vector<point>& pts, const regular_kgon& Q) {
    const int n = static_cast<int>(pts.size());
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            if (pts[a] == pts[b]) throw invalid_input("coincident points " + std::to_string(a) +
                                                      " and " + std::to_string(b));
            if (Q.chord_parallel(pts[b] - pts[a]))
                throw general_position_violation("points " + std::to_string(a) + " and " +
                                                 std::to_string(b) +
                                                 " lie on a line parallel to a chord of the polygon");
        }
}

// Directional nearest neighbors under the polygonal distance: N_j picks the
// candidate with the smallest pinned-placement scale phi_diamond.
class diamond_neighbor_table {
public:
    struct entry {
        int neighbor;
        double radius;
    };

    diamond_neighbor_table(const std::vector<point>& pts, const regular_kgon& Q)
        : points_(pts), gon_(Q) {
        const int n = static_cast<int>(pts.size());
        if (n < 2) throw invalid_input("neighbor table needs at least 2 points");
        require_no_chord_parallel(pts, Q);
        entries_.resize(static_cast<std::size_t>(n) * Q.k());

        std::vector<std::vector<int>> by_dist(n);
        for (int p = 0; p < n; ++p) {
            auto& cand = by_dist[p];
            for (int q = 0; q < n; ++q)
                if (q != p) cand.push_back(q);
            std::sort(cand.begin(), cand.end(), [&](int a, int b) {
                return norm2(pts[a] - pts[p]) < norm2(pts[b] - pts[p]);
            });
        }

        // The placement of scale lambda fits inside a disk of radius lambda
        // around its center with p on the boundary, so |pq| <= 2*lambda and
        // the distance-sorted scan can stop once |pq|/2 passes the best.
        for (int p = 0; p < n; ++p) {
            for (int j = 0; j < Q.k(); ++j) {
                std::optional<entry> best;
                double runner_up = std::numeric_limits<double>::infinity();
                for (int q : by_dist[p]) {
                    double half = 0.5 * norm(pts[q] - pts[p]);
                    if (best && half > best->radius * (1.0 + 1e-9)) break;
                    auto phi = phi_diamond(pts[p], pts[q], j, Q);
                    if (!phi) continue;
                    if (!best || *phi < best->radius) {
                        if (best) runner_up = best->radius;
                        best = entry{q, *phi};
                    } else {
                        runner_up = std::min(runner_up, *phi);
                    }
                }
                if (best && runner_up - best->radius <= 1e-12 * best->radius)
                    throw general_position_violation(
                        "polygonal neighbor tie at point " + std::to_string(p) + ", direction " +
                        std::to_string(j));
                entries_[static_cast<std::size_t>(p) * Q.k() + j] = best;
            }
        }
    }

    const regular_kgon& gon() const { return gon_; }
    int k() const { return gon_.k(); }
    int size() const { return static_cast<int>(points_.size()); }
    const std::vector<point>& points() const { return points_; }

    const std::optional<entry>& at(int p, int j) const {
        if (p < 0 || p >= size() || j < 0 || j >= k())
            throw invalid_input("neighbor table index out of range");
        return entries_[static_cast<std::size_t>(p) * k() + j];
    }

private:
    std::vector<point> points_;
    regular_kgon gon_;
    std::vector<std::optional<entry>> entries_;
};

// Number of directions in which q is p's polygonal neighbor and vice versa.
// Each such direction contributes one corner placement centered on the
// Q-Voronoi edge of pq, i.e. one breakpoint.
inline std::pair<int, int> breakpoint_count(const diamond_neighbor_table& tab, int p, int q) {
    if (p < 0 || q < 0 || p >= tab.size() || q >= tab.size() || p == q)
        throw invalid_input("breakpoint_count needs two distinct point indices");
    int at_p = 0, at_q = 0;
    for (int j = 0; j < tab.k(); ++j) {
        if (tab.at(p, j) && tab.at(p, j)->neighbor == q) ++at_p;
        if (tab.at(q, j) && tab.at(q, j)->neighbor == p) ++at_q;
    }
    return {at_p, at_q};
}

inline std::pair<int, int> breakpoint_count(const std::vector<point>& pts, int p, int q,
                                            const regular_kgon& Q) {
    return breakpoint_count(diamond_neighbor_table(pts, Q), p, q);
}

// One corner contact of the two-point bisector: the placement of scale
// d_Q(center, p) = d_Q(center, q) whose pinned vertex sits on the owner.
struct bisector_breakpoint {
    point center;
    int owner;  // index of the point carrying the corner contact (p or q)
    int vertex; // pinned vertex index j of the contact
};

struct bisector_chain {
    std::vector<bisector_breakpoint> breakpoints; // ordered along the chain
};

// Full two-point bisector chain under the polygonal distance. Breakpoints
// are the finite pinned placements at p touching q and at q touching p.
// The chain is monotone in the direction orthogonal to pq, so sorting the
// centers by that component recovers the chain order, along which owners
// must alternate.
inline bisector_chain bisector_diamond(point p, point q, const regular_kgon& Q) {
    if (p == q) throw invalid_input("bisector of coincident points");
    if (Q.chord_parallel(q - p))
        throw general_position_violation("segment parallel to a chord of the polygon");

    bisector_chain chain;
    vec2 n = perp_ccw(normalized(q - p));
    struct keyed {
        double key;
        bisector_breakpoint bp;
    };
    std::vector<keyed> all;
    for (int owner = 0; owner < 2; ++owner) {
        point from = owner == 0 ? p : q;
        point to = owner == 0 ? q : p;
        for (int j = 0; j < Q.k(); ++j) {
            auto phi = phi_diamond(from, to, j, Q);
            if (!phi) continue;
            point c = from + *phi * Q.u(j).unit();
            double key = dot(c - p, n);
            all.push_back({key, {c, owner, j}});
        }
    }
    std::sort(all.begin(), all.end(), [](const keyed& a, const keyed& b) { return a.key < b.key; });
    chain.breakpoints.reserve(all.size());
    for (const auto& e : all) chain.breakpoints.push_back(e.bp);

    if (static_cast<int>(chain.breakpoints.size()) != Q.k() - 2)
        throw internal_inconsistency("bisector breakpoint count is not k - 2");
    for (std::size_t i = 1; i < chain.breakpoints.size(); ++i)
        if (chain.breakpoints[i].owner == chain.breakpoints[i - 1].owner)
            throw internal_inconsistency("bisector corner contacts do not alternate");
    return chain;
}

} // namespace sdgkit
