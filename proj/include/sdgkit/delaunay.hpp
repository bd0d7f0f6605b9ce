#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "predicates.hpp"
#include "random.hpp"

namespace sdgkit {

// Delaunay triangulation with a symbolic ghost vertex: every hull edge is
// shared with a "ghost" triangle whose third vertex is the constant
// `ghost_vertex`. Ghost triangles make hull insertions and hull flips follow
// the same code path as interior ones. For a ghost triangle the stored
// vertex cycle (s, t, ghost) encodes the directed hull edge t->s with the
// interior on its left.
//
// All structural decisions go through the exact predicates, so the result
// is the Delaunay triangulation of the input whenever the input is in
// general position; an exactly cocircular conflict is reported instead of
// being resolved arbitrarily.
class triangulation {
public:
    static constexpr int ghost_vertex = -1;

    struct tri {
        std::array<int, 3> v{};   // counterclockwise for finite triangles
        std::array<int, 3> nbr{}; // nbr[i] faces the edge opposite v[i]
        bool alive = false;
    };

    struct opposite_pair {
        int r_plus = ghost_vertex;        // third vertex left of p->q (or the only one)
        std::optional<int> r_minus;       // third vertex right of p->q; absent on the hull
    };

    static triangulation build(std::vector<point> pts) {
        triangulation t;
        t.points_ = std::move(pts);
        t.construct();
        return t;
    }

    const std::vector<point>& points() const { return points_; }

    // Finite triangles, each rotated so the smallest index leads, sorted.
    std::vector<std::array<int, 3>> triangles() const {
        std::vector<std::array<int, 3>> out;
        for (const tri& t : tris_) {
            if (!t.alive || is_ghost_tri(t)) continue;
            out.push_back(canonical(t.v));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    // All edges as index pairs with p < q, sorted.
    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        for (const tri& t : tris_) {
            if (!t.alive || is_ghost_tri(t)) continue;
            for (int i = 0; i < 3; ++i) {
                int a = t.v[(i + 1) % 3], b = t.v[(i + 2) % 3];
                if (a < b) out.emplace_back(a, b);
                else out.emplace_back(b, a);
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    // Hull vertices in counterclockwise order, starting from an arbitrary one.
    // Vertices lying in the interior of a hull segment are included.
    std::vector<int> hull() const {
        std::vector<int> out;
        int g0 = any_ghost();
        int g = g0;
        do {
            int gi = index_of(tris_[g], ghost_vertex);
            out.push_back(tris_[g].v[(gi + 2) % 3]); // source of the hull edge
            g = tris_[g].nbr[(gi + 2) % 3];          // ghost across {source, ghost}
        } while (g != g0);
        return out;
    }

    bool has_edge(int p, int q) const { return find_edge(p, q).first >= 0; }

    // The third vertices of the one or two triangles on edge pq.
    opposite_pair opposite(int p, int q) const {
        auto [t, i] = find_edge(p, q);
        if (t < 0) throw not_an_edge("pair is not an edge of the triangulation");
        // (t, i) has directed edge (v[i+1], v[i+2]); establish p->q orientation.
        const tri& a = tris_[t];
        int left = a.v[i];
        bool pq_order = a.v[(i + 1) % 3] == p;
        int other = a.nbr[i];
        int right = tris_[other].v[index_of_nbr(tris_[other], t)];
        if (!pq_order) std::swap(left, right);
        opposite_pair out;
        if (left != ghost_vertex && right != ghost_vertex) {
            out.r_plus = left;
            out.r_minus = right;
        } else {
            out.r_plus = left != ghost_vertex ? left : right;
        }
        return out;
    }

    // Internal store, exposed read-only for the kinetic layer and the audits.
    const std::vector<tri>& store() const { return tris_; }
    bool is_ghost_tri(const tri& t) const {
        return t.v[0] == ghost_vertex || t.v[1] == ghost_vertex || t.v[2] == ghost_vertex;
    }

    // Replaces coordinates without touching the structure. The caller owns
    // the claim that the structure is still (or is about to be made) valid;
    // the kinetic simulator uses this between certificate events.
    void displace_points(const std::vector<point>& pts) {
        if (pts.size() != points_.size())
            throw invalid_input("displace_points: size mismatch");
        points_ = pts;
    }

    // Replaces the diagonal of the quadrilateral formed by triangle t and
    // its neighbor across the edge opposite t's vertex i. Works for ghost
    // pairs too; that is how hull vertices enter and leave.
    void flip(int t1, int i1) {
        tri& a = tris_[t1];
        int x = a.v[i1], u = a.v[(i1 + 1) % 3], vv = a.v[(i1 + 2) % 3];
        int t2 = a.nbr[i1];
        tri& b = tris_[t2];
        int j = index_of_nbr(b, t1);
        int w = b.v[j];

        int A = a.nbr[(i1 + 2) % 3]; // across {x, u}
        int B = a.nbr[(i1 + 1) % 3]; // across {vv, x}
        int C = b.nbr[index_of(b, vv)]; // across {u, w}
        int D = b.nbr[index_of(b, u)];  // across {w, vv}

        a.v = {x, u, w};
        a.nbr = {C, t2, A};
        b.v = {x, w, vv};
        b.nbr = {D, B, t1};

        repoint(B, t1, t2);
        repoint(C, t2, t1);
        for (int v : {x, u, w, vv})
            if (v != ghost_vertex) vert2tri_[v] = (v == vv) ? t2 : t1;
        if (!is_ghost_tri(a)) last_finite_ = t1;
        else if (!is_ghost_tri(b)) last_finite_ = t2;
        if (is_ghost_tri(a)) ghost_hint_ = t1;
        else if (is_ghost_tri(b)) ghost_hint_ = t2;
    }

    // Locates the pair of triangles on edge {p, q}: returns (triangle, i)
    // such that the edge opposite vertex i is {p, q}, or (-1, -1).
    std::pair<int, int> find_edge(int p, int q) const {
        if (p == q || p < 0 || q < 0 || p >= static_cast<int>(points_.size()) ||
            q >= static_cast<int>(points_.size()))
            return {-1, -1};
        int start = vert2tri_[p];
        int t = start;
        // Orbit around p; ghosts participate, so the orbit always closes.
        do {
            const tri& a = tris_[t];
            int i = index_of(a, p);
            int n1 = a.v[(i + 1) % 3], n2 = a.v[(i + 2) % 3];
            if (n1 == q) return {t, (i + 2) % 3};
            if (n2 == q) return {t, (i + 1) % 3};
            t = a.nbr[(i + 1) % 3];
        } while (t != start);
        return {-1, -1};
    }

    // Structural and Delaunay self-check; throws internal_inconsistency.
    void audit() const {
        for (std::size_t ti = 0; ti < tris_.size(); ++ti) {
            const tri& t = tris_[ti];
            if (!t.alive) continue;
            for (int i = 0; i < 3; ++i) {
                int n = t.nbr[i];
                if (!tris_[n].alive) throw internal_inconsistency("dead neighbor");
                if (index_of_nbr(tris_[n], static_cast<int>(ti)) < 0)
                    throw internal_inconsistency("neighbor link not reciprocal");
            }
            if (!is_ghost_tri(t)) {
                if (orientation(points_[t.v[0]], points_[t.v[1]], points_[t.v[2]]) != sign_t::positive)
                    throw internal_inconsistency("finite triangle not counterclockwise");
            }
        }
        // Local Delaunay condition across every finite-finite edge.
        for (std::size_t ti = 0; ti < tris_.size(); ++ti) {
            const tri& t = tris_[ti];
            if (!t.alive || is_ghost_tri(t)) continue;
            for (int i = 0; i < 3; ++i) {
                const tri& n = tris_[t.nbr[i]];
                if (is_ghost_tri(n)) continue;
                int w = n.v[index_of_nbr(n, static_cast<int>(ti))];
                if (incircle(points_[t.v[0]], points_[t.v[1]], points_[t.v[2]], points_[w]) ==
                    sign_t::positive)
                    throw internal_inconsistency("local Delaunay condition violated");
            }
        }
    }

private:
    static std::array<int, 3> canonical(std::array<int, 3> v) {
        int m = std::min({v[0], v[1], v[2]});
        while (v[0] != m) v = {v[1], v[2], v[0]};
        return v;
    }

    static int index_of(const tri& t, int v) {
        for (int i = 0; i < 3; ++i)
            if (t.v[i] == v) return i;
        return -1;
    }

    static int index_of_nbr(const tri& t, int n) {
        for (int i = 0; i < 3; ++i)
            if (t.nbr[i] == n) return i;
        return -1;
    }

    void repoint(int t, int from, int to) {
        if (t == from) return;
        for (int i = 0; i < 3; ++i)
            if (tris_[t].nbr[i] == from) tris_[t].nbr[i] = to;
    }

    int any_ghost() const {
        if (tris_[ghost_hint_].alive && is_ghost_tri(tris_[ghost_hint_])) return ghost_hint_;
        for (std::size_t i = 0; i < tris_.size(); ++i)
            if (tris_[i].alive && is_ghost_tri(tris_[i])) return static_cast<int>(i);
        throw internal_inconsistency("no ghost triangle present");
    }

    int alloc() {
        if (!free_.empty()) {
            int id = free_.back();
            free_.pop_back();
            tris_[id].alive = true;
            return id;
        }
        tris_.push_back(tri{});
        tris_.back().alive = true;
        return static_cast<int>(tris_.size()) - 1;
    }

    void make_tri(int id, int a, int b, int c) {
        tris_[id].v = {a, b, c};
        for (int v : {a, b, c})
            if (v != ghost_vertex) vert2tri_[v] = id;
        if (a != ghost_vertex && b != ghost_vertex && c != ghost_vertex) last_finite_ = id;
        else ghost_hint_ = id;
    }

    bool strictly_between_collinear(point a, point b, point p) const {
        if (a.x != b.x) return (a.x < p.x && p.x < b.x) || (b.x < p.x && p.x < a.x);
        return (a.y < p.y && p.y < b.y) || (b.y < p.y && p.y < a.y);
    }

    bool in_conflict(int t, point p, int pidx) const {
        const tri& a = tris_[t];
        if (!is_ghost_tri(a)) {
            sign_t s = incircle(points_[a.v[0]], points_[a.v[1]], points_[a.v[2]], p);
            if (s == sign_t::zero)
                throw general_position_violation(
                    "exactly cocircular quadruple: points " + std::to_string(a.v[0]) + ", " +
                    std::to_string(a.v[1]) + ", " + std::to_string(a.v[2]) + ", " +
                    std::to_string(pidx));
            return s == sign_t::positive;
        }
        int gi = index_of(a, ghost_vertex);
        point u = points_[a.v[(gi + 2) % 3]]; // hull edge source
        point w = points_[a.v[(gi + 1) % 3]]; // hull edge target
        sign_t s = orientation(u, w, p);
        if (s == sign_t::negative) return true;          // strictly outside this hull edge
        if (s == sign_t::zero) return strictly_between_collinear(u, w, p);
        return false;
    }

    int locate(point p) const {
        int t = last_finite_;
        if (!tris_[t].alive || is_ghost_tri(tris_[t])) {
            for (std::size_t i = 0; i < tris_.size(); ++i)
                if (tris_[i].alive && !is_ghost_tri(tris_[i])) { t = static_cast<int>(i); break; }
        }
        int guard = 8 * static_cast<int>(tris_.size()) + 64;
        while (guard-- > 0) {
            const tri& a = tris_[t];
            if (is_ghost_tri(a)) return t;
            bool crossed = false;
            for (int i = 0; i < 3; ++i) {
                point e1 = points_[a.v[(i + 1) % 3]], e2 = points_[a.v[(i + 2) % 3]];
                if (orientation(e1, e2, p) == sign_t::negative) {
                    t = a.nbr[i];
                    crossed = true;
                    break;
                }
            }
            if (!crossed) return t;
        }
        throw internal_inconsistency("point location did not terminate");
    }

    void insert(int pidx) {
        point p = points_[pidx];
        int seed = locate(p);
        if (!in_conflict(seed, p, pidx)) {
            // A collinear-outside point can land on a ghost whose edge it
            // does not see; one of the neighboring ghosts must conflict.
            int found = -1;
            for (std::size_t i = 0; i < tris_.size() && found < 0; ++i)
                if (tris_[i].alive && in_conflict(static_cast<int>(i), p, pidx))
                    found = static_cast<int>(i);
            if (found < 0) throw internal_inconsistency("inserted point conflicts with nothing");
            seed = found;
        }

        // Grow the conflict cavity.
        std::vector<int> cavity{seed};
        std::vector<char> in_cavity(tris_.size(), 0);
        in_cavity[seed] = 1;
        for (std::size_t k = 0; k < cavity.size(); ++k) {
            const tri a = tris_[cavity[k]];
            for (int i = 0; i < 3; ++i) {
                int n = a.nbr[i];
                if (in_cavity[n]) continue;
                if (in_conflict(n, p, pidx)) {
                    in_cavity[n] = 1;
                    cavity.push_back(n);
                }
            }
        }

        // Directed boundary edges, chained into the single cycle that the
        // star-shaped conflict region guarantees.
        struct bedge { int u, w, outer; };
        std::vector<bedge> boundary;
        for (int ct : cavity) {
            const tri& a = tris_[ct];
            for (int i = 0; i < 3; ++i)
                if (!in_cavity[a.nbr[i]])
                    boundary.push_back({a.v[(i + 1) % 3], a.v[(i + 2) % 3], a.nbr[i]});
        }
        std::vector<bedge> cycle;
        cycle.reserve(boundary.size());
        std::vector<char> used(boundary.size(), 0);
        cycle.push_back(boundary.front());
        used[0] = 1;
        for (std::size_t step = 1; step < boundary.size(); ++step) {
            int want = cycle.back().w;
            std::size_t pick = boundary.size();
            for (std::size_t e = 0; e < boundary.size(); ++e)
                if (!used[e] && boundary[e].u == want) {
                    pick = e;
                    break;
                }
            if (pick == boundary.size()) break;
            used[pick] = 1;
            cycle.push_back(boundary[pick]);
        }
        if (cycle.size() != boundary.size() || cycle.back().w != cycle.front().u)
            throw internal_inconsistency("conflict cavity boundary is not a single cycle");

        for (int ct : cavity) {
            tris_[ct].alive = false;
            free_.push_back(ct);
        }

        std::vector<int> ids(cycle.size());
        for (std::size_t i = 0; i < cycle.size(); ++i) ids[i] = alloc();
        for (std::size_t i = 0; i < cycle.size(); ++i) {
            const bedge& e = cycle[i];
            make_tri(ids[i], e.u, e.w, pidx);
            int next = ids[(i + 1) % ids.size()];
            int prev = ids[(i + ids.size() - 1) % ids.size()];
            tris_[ids[i]].nbr = {next, prev, e.outer};
            // The outer triangle pointed at a carved one across this edge.
            for (int m = 0; m < 3; ++m) {
                const tri& o = tris_[e.outer];
                int a = o.v[(m + 1) % 3], b = o.v[(m + 2) % 3];
                if ((a == e.u && b == e.w) || (a == e.w && b == e.u)) {
                    tris_[e.outer].nbr[m] = ids[i];
                    break;
                }
            }
        }
    }

    void construct() {
        const int n = static_cast<int>(points_.size());
        if (n < 3) throw degenerate_input("triangulation requires at least 3 points");
        for (const point& p : points_)
            if (!is_finite(p)) throw invalid_input("triangulation requires finite coordinates");
        {
            std::vector<int> ord(n);
            for (int i = 0; i < n; ++i) ord[i] = i;
            std::sort(ord.begin(), ord.end(), [&](int a, int b) {
                if (points_[a].x != points_[b].x) return points_[a].x < points_[b].x;
                return points_[a].y < points_[b].y;
            });
            for (int i = 0; i + 1 < n; ++i)
                if (points_[ord[i]] == points_[ord[i + 1]])
                    throw invalid_input("coincident points " + std::to_string(ord[i]) + " and " +
                                        std::to_string(ord[i + 1]));
        }

        // Insertion order is a fixed-seed shuffle: deterministic for a given
        // input, independent of input pathologies like sortedness.
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        prng shuffle_rng(0x5d6a11c3u);
        shuffle_rng.shuffle(order);

        int a = order[0], b = order[1];
        int c = -1;
        std::size_t ci = 2;
        for (; ci < order.size(); ++ci) {
            if (orientation(points_[a], points_[b], points_[order[ci]]) != sign_t::zero) {
                c = order[ci];
                break;
            }
        }
        if (c < 0) throw degenerate_input("all points are collinear");
        if (orientation(points_[a], points_[b], points_[c]) == sign_t::negative) std::swap(a, b);

        vert2tri_.assign(n, -1);
        int t0 = alloc(), g_ab = alloc(), g_bc = alloc(), g_ca = alloc();
        make_tri(t0, a, b, c);
        make_tri(g_ab, b, a, ghost_vertex);
        make_tri(g_bc, c, b, ghost_vertex);
        make_tri(g_ca, a, c, ghost_vertex);
        tris_[t0].nbr = {g_bc, g_ca, g_ab};
        tris_[g_ab].nbr = {g_ca, g_bc, t0};
        tris_[g_bc].nbr = {g_ab, g_ca, t0};
        tris_[g_ca].nbr = {g_bc, g_ab, t0};

        for (std::size_t i = 2; i < order.size(); ++i) {
            if (i == ci) continue;
            insert(order[i]);
        }
    }

    std::vector<point> points_;
    std::vector<tri> tris_;
    std::vector<int> free_;
    std::vector<int> vert2tri_;
    int last_finite_ = 0;
    int ghost_hint_ = 0;
};

// Randomized-incremental Delaunay triangulation of a point set in general
// position (no exact duplicates, not all collinear, no empty-circle
// cocircular quadruple).
inline triangulation build_delaunay(std::vector<point> pts) {
    return triangulation::build(std::move(pts));
}

inline point circumcenter(point a, point b, point c) {
    vec2 u = b - a, w = c - a;
    double d = 2.0 * cross(u, w);
    if (d == 0.0) throw degenerate_triangle("circumcenter of collinear points");
    double nu = norm2(u), nw = norm2(w);
    return a + vec2{(nu * w.y - nw * u.y) / d, (nw * u.x - nu * w.x) / d};
}

// Geometry of the dual (Voronoi) edge of a Delaunay edge: a segment between
// the two adjacent circumcenters, or for a hull edge a ray from the single
// circumcenter along the perpendicular bisector, away from the triangle.
struct voronoi_edge {
    point a{};                 // circumcenter of the triangle on one side
    std::optional<point> b;    // the other circumcenter; absent for hull edges
    std::optional<vec2> ray;   // unit ray direction; present iff b is absent
};

inline voronoi_edge voronoi_edge_of(const triangulation& dt, int p, int q) {
    auto opp = dt.opposite(p, q);
    const auto& pts = dt.points();
    voronoi_edge out;
    out.a = circumcenter(pts[p], pts[q], pts[opp.r_plus]);
    if (opp.r_minus) {
        out.b = circumcenter(pts[p], pts[q], pts[*opp.r_minus]);
    } else {
        vec2 dir = normalized(perp_ccw(pts[q] - pts[p]));
        point m = 0.5 * (pts[p] + pts[q]);
        if (dot(dir, pts[opp.r_plus] - m) > 0.0) dir = -1.0 * dir;
        out.ray = dir;
    }
    return out;
}

// How far the edge pq is from losing local Delaunayhood: pi minus the sum of
// the angles subtended by pq at the opposite vertices, clamped to [0, pi].
// A missing side (hull edge) contributes zero.
inline double stability_angle(const triangulation& dt, int p, int q) {
    auto opp = dt.opposite(p, q);
    const auto& pts = dt.points();
    double s = pi - angle_at(pts[opp.r_plus], pts[p], pts[q]);
    if (opp.r_minus) s -= angle_at(pts[*opp.r_minus], pts[p], pts[q]);
    return std::clamp(s, 0.0, pi);
}

} // namespace sdgkit
