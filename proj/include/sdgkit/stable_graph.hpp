#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "delaunay.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "polygon_metric.hpp"
#include "predicates.hpp"

namespace sdgkit {

enum class sdg_method { euclid_exact, breakpoint_proxy };

struct sdg_edge {
    int p;
    int q;
    double stability;  // exact Euclidean stability angle; 0 when pq is not Delaunay
    int breakpoints;   // total corner contacts over both endpoints; -1 when not computed
};

// Stable subgraph of the Delaunay triangulation plus the verdicts of an
// (alpha, alpha') audit. Edges are normalized p < q and sorted, so equal
// inputs produce byte-equal reports.
struct stable_graph_report {
    double alpha = 0.0;
    sdg_method method = sdg_method::euclid_exact;
    std::vector<sdg_edge> edges;
    std::vector<sdg_edge> s1_violations;  // listed edges whose stability falls below alpha
    std::vector<sdg_edge> s2_violations;  // alpha'-stable Delaunay edges that are missing

    bool contains(int a, int b) const {
        if (a > b) std::swap(a, b);
        auto it = std::lower_bound(edges.begin(), edges.end(), std::pair<int, int>{a, b},
                                   [](const sdg_edge& e, const std::pair<int, int>& key) {
                                       return std::pair<int, int>{e.p, e.q} < key;
                                   });
        return it != edges.end() && it->p == a && it->q == b;
    }
};

// Delaunay edges whose stability angle is at least alpha: the edge survives
// every rotation of the point set by less than alpha about any center.
inline stable_graph_report sdg_euclidean(const std::vector<point>& pts, double alpha) {
    if (!(alpha > 0.0 && alpha < pi)) throw invalid_input("stability threshold must lie in (0, pi)");
    triangulation dt = build_delaunay(pts);
    stable_graph_report rep;
    rep.alpha = alpha;
    rep.method = sdg_method::euclid_exact;
    for (auto [p, q] : dt.edges()) {
        double s = stability_angle(dt, p, q);
        if (s >= alpha) rep.edges.push_back({p, q, s, -1});
    }
    return rep;
}

// Pairs whose polygonal neighbor table entries point at each other in at
// least 11 directions combined. With alpha = 2*pi/k every reported edge is
// alpha-stable, and every 8*alpha-stable edge is reported; the guarantee
// has content for k > 16, where 8*alpha < pi. The stated domain is k >= 24,
// but any even k >= 8 is accepted for experiments near the boundary.
inline stable_graph_report sdg_proxy(const std::vector<point>& pts, int k, double offset = 0.0) {
    regular_kgon gon(k, offset);
    diamond_neighbor_table tab(pts, gon);

    std::map<std::pair<int, int>, int> totals;
    for (int p = 0; p < tab.size(); ++p)
        for (int j = 0; j < tab.k(); ++j)
            if (const auto& e = tab.at(p, j)) {
                int a = std::min(p, e->neighbor), b = std::max(p, e->neighbor);
                ++totals[{a, b}];
            }

    // A two-point set has no triangulation; its single edge never dies, so
    // it carries the maximal stability angle.
    std::optional<triangulation> dt;
    if (pts.size() > 2) dt = build_delaunay(pts);
    stable_graph_report rep;
    rep.alpha = 2.0 * pi / k;
    rep.method = sdg_method::breakpoint_proxy;
    for (const auto& [pq, total] : totals) {
        if (total < 11) continue;
        auto [p, q] = pq;
        double s = pi;
        if (dt) s = dt->has_edge(p, q) ? stability_angle(*dt, p, q) : 0.0;
        rep.edges.push_back({p, q, s, total});
    }
    return rep;
}

// Audits a claimed (alpha, alpha')-stable graph: S1 collects listed edges
// whose true stability is below alpha (soundness), S2 collects Delaunay
// edges of stability at least alpha' that the graph omits (completeness).
inline stable_graph_report verify_sdg(const std::vector<point>& pts, const stable_graph_report& graph,
                                      double alpha, double alpha_prime) {
    if (!(alpha > 0.0) || !(alpha <= alpha_prime) || !std::isfinite(alpha_prime))
        throw invalid_input("audit thresholds must satisfy 0 < alpha <= alpha'");
    triangulation dt = build_delaunay(pts);
    stable_graph_report rep = graph;
    rep.alpha = alpha;
    rep.s1_violations.clear();
    rep.s2_violations.clear();
    for (const sdg_edge& e : rep.edges) {
        double s = dt.has_edge(e.p, e.q) ? stability_angle(dt, e.p, e.q) : 0.0;
        if (s < alpha) rep.s1_violations.push_back({e.p, e.q, s, e.breakpoints});
    }
    for (auto [p, q] : dt.edges()) {
        double s = stability_angle(dt, p, q);
        if (s >= alpha_prime && !graph.contains(p, q)) rep.s2_violations.push_back({p, q, s, -1});
    }
    return rep;
}

namespace detail {

// Sign of |ab| - |cd| decided in doubles when the gap clears the rounding
// bound, otherwise by the exact comparison.
inline int distance_sign(point a, point b, point c, point d) {
    double ab = norm2(b - a), cd = norm2(d - c);
    double diff = ab - cd;
    double eps = 1e-14 * (ab + cd);
    if (diff < -eps) return -1;
    if (diff > eps) return 1;
    sign_t s = compare_distance(a, b, c, d);
    return s == sign_t::negative ? -1 : (s == sign_t::positive ? 1 : 0);
}

} // namespace detail

// Circle-based beta-skeleton for beta >= 1: pq is an edge iff the union of
// the two disks of radius (beta/2)|pq| through p and q holds no other point
// strictly inside. beta = 1 collapses both disks onto the diametral one.
inline std::vector<std::pair<int, int>> beta_skeleton(const std::vector<point>& pts, double beta) {
    if (!(beta >= 1.0) || !std::isfinite(beta)) throw invalid_input("beta must be at least 1");
    for (const point& p : pts)
        if (!is_finite(p)) throw invalid_input("beta_skeleton requires finite points");

    const int n = static_cast<int>(pts.size());
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            vec2 d = pts[j] - pts[i];
            double d2 = norm2(d);
            if (d2 == 0.0) throw invalid_input("beta_skeleton requires distinct points");
            double len = std::sqrt(d2);
            double r = 0.5 * beta * len;
            double h = std::sqrt(std::max(0.0, r * r - 0.25 * d2));
            point mid{0.5 * (pts[i].x + pts[j].x), 0.5 * (pts[i].y + pts[j].y)};
            vec2 off = (h / len) * perp_ccw(d);
            point c1{mid.x + off.x, mid.y + off.y};
            point c2{mid.x - off.x, mid.y - off.y};
            bool blocked = false;
            for (int s = 0; s < n && !blocked; ++s) {
                if (s == i || s == j) continue;
                blocked = norm2(pts[s] - c1) < r * r || norm2(pts[s] - c2) < r * r;
            }
            if (!blocked) out.push_back({i, j});
        }
    return out;
}

// Strictly closest pair by exact comparison; an exact tie for the minimum
// is reported instead of silently picking one.
inline std::pair<int, int> closest_pair(const std::vector<point>& pts) {
    if (pts.size() < 2) throw invalid_input("closest pair needs at least two points");
    for (const point& p : pts)
        if (!is_finite(p)) throw invalid_input("closest_pair requires finite points");

    const int n = static_cast<int>(pts.size());
    int bi = 0, bj = 1;
    double best = norm2(pts[1] - pts[0]);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d2 = norm2(pts[j] - pts[i]);
            if (d2 < best) {
                best = d2;
                bi = i;
                bj = j;
            }
        }

    // Everything within the rounding band of the double minimum gets an
    // exact rerun; ties at the true minimum are degenerate input.
    int ties = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d2 = norm2(pts[j] - pts[i]);
            if (d2 > best * (1.0 + 1e-9)) continue;
            sign_t s = compare_distance(pts[i], pts[j], pts[bi], pts[bj]);
            if (s == sign_t::negative) {
                bi = i;
                bj = j;
                ties = 1;
            } else if (s == sign_t::zero) {
                ++ties;
            }
        }
    if (ties > 1)
        throw general_position_violation("closest pair is tied between two point pairs");
    return {bi, bj};
}

// Relative neighborhood graph: pq is an edge iff no r satisfies
// max(|pr|, |qr|) < |pq|. Comparisons are exact at ties.
inline std::vector<std::pair<int, int>> rng(const std::vector<point>& pts) {
    for (const point& p : pts)
        if (!is_finite(p)) throw invalid_input("rng requires finite points");
    const int n = static_cast<int>(pts.size());
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            bool blocked = false;
            for (int r = 0; r < n && !blocked; ++r) {
                if (r == i || r == j) continue;
                blocked = detail::distance_sign(pts[i], pts[r], pts[i], pts[j]) < 0 &&
                          detail::distance_sign(pts[j], pts[r], pts[i], pts[j]) < 0;
            }
            if (!blocked) out.push_back({i, j});
        }
    return out;
}

struct lower_bound_result {
    int count;     // alpha-stable Delaunay edges
    double bound;  // n * (1 - 6 * alpha / pi) - 2
    bool pass;
};

// Checks the counting bound: every n-point set in general position has at
// least n(1 - 6*alpha/pi) - 2 alpha-stable Delaunay edges. The bound is
// vacuous for alpha >= pi/6; such thresholds are still accepted.
inline lower_bound_result lower_bound_check(const std::vector<point>& pts, double alpha) {
    stable_graph_report rep = sdg_euclidean(pts, alpha);
    double bound = static_cast<double>(pts.size()) * (1.0 - 6.0 * alpha / pi) - 2.0;
    int count = static_cast<int>(rep.edges.size());
    return {count, bound, static_cast<double>(count) >= bound};
}

} // namespace sdgkit
