#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"
#include "predicates.hpp"

namespace sdgkit {

// Convex polygon with the origin strictly inside, vertices counterclockwise.
// Strict convexity is enforced: no three consecutive vertices collinear, and
// the vertex directions seen from the origin advance monotonically through
// one full turn. That second condition is what makes sector lookups by angle
// valid, so both radial queries below run in O(log n).
class convex_body {
public:
    explicit convex_body(std::vector<point> vertices) : verts_(std::move(vertices)) {
        const std::size_t n = verts_.size();
        if (n < 3)
            throw invalid_body("convex body needs at least three vertices");
        for (const point& v : verts_)
            if (!is_finite(v))
                throw invalid_body("convex body vertex is not finite");
        for (std::size_t i = 0; i < n; ++i) {
            const point& a = verts_[i];
            const point& b = verts_[(i + 1) % n];
            const point& c = verts_[(i + 2) % n];
            if (orientation(a, b, c) != sign_t::positive)
                throw invalid_body("convex body vertices must turn strictly left");
        }
        for (std::size_t i = 0; i < n; ++i) {
            // origin strictly to the left of every directed edge
            if (orientation(verts_[i], verts_[(i + 1) % n], point{0.0, 0.0}) != sign_t::positive)
                throw invalid_body("convex body must contain the origin strictly inside");
        }

        base_angle_ = std::atan2(verts_[0].y, verts_[0].x);
        rel_angle_.resize(n);
        rel_angle_[0] = 0.0;
        for (std::size_t i = 1; i < n; ++i) {
            rel_angle_[i] = normalize_angle(std::atan2(verts_[i].y, verts_[i].x) - base_angle_);
            if (rel_angle_[i] <= rel_angle_[i - 1])
                throw invalid_body("convex body vertices must advance counterclockwise around the origin");
        }

        normals_.resize(n);
        offsets_.resize(n);
        max_vertex_norm_ = 0.0;
        min_edge_distance_ = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const point& a = verts_[i];
            const point& b = verts_[(i + 1) % n];
            normals_[i] = normalized(perp_cw(b - a));
            offsets_[i] = dot(normals_[i], a);
            max_vertex_norm_ = std::max(max_vertex_norm_, norm(a));
            min_edge_distance_ = std::min(min_edge_distance_, offsets_[i]);
        }
    }

    std::size_t size() const { return verts_.size(); }
    const std::vector<point>& vertices() const { return verts_; }

    // cyclic accessor
    const point& vertex(long i) const {
        const long n = static_cast<long>(verts_.size());
        return verts_[static_cast<std::size_t>(((i % n) + n) % n)];
    }

    double max_vertex_norm() const { return max_vertex_norm_; }
    double min_edge_distance() const { return min_edge_distance_; }

    const vec2& edge_normal(std::size_t i) const { return normals_[i]; }
    double edge_offset(std::size_t i) const { return offsets_[i]; }

    // edge whose angular sector (seen from the origin) contains the ray
    std::size_t sector_of(double angle) const {
        const double rel = normalize_angle(angle - base_angle_);
        auto it = std::upper_bound(rel_angle_.begin(), rel_angle_.end(), rel);
        return static_cast<std::size_t>(it - rel_angle_.begin()) - 1;
    }

    struct boundary_hit {
        point x;            // boundary point on the ray from the origin
        std::size_t edge;   // edge carrying it
        double edge_param;  // position along the edge, 0 at vertex(edge)
        double radius;      // distance from the origin, the radial function value
    };

    boundary_hit radial_boundary(const direction& w) const {
        const std::size_t i = sector_of(w.angle());
        const vec2 uw = w.unit();
        const double den = dot(normals_[i], uw);
        if (den <= 0.0)
            throw internal_inconsistency("radial sector lookup left its cone");
        const double t = offsets_[i] / den;
        const point x = point{0.0, 0.0} + t * uw;
        const vec2 e = vertex(static_cast<long>(i) + 1) - verts_[i];
        return {x, i, dot(x - verts_[i], e) / norm2(e), t};
    }

    // Signed slack against the single edge facing z's angular sector;
    // negative inside, positive outside. Sign-equivalent to membership
    // because the sector's slice of the polygon is bounded by that edge.
    double edge_margin(const point& z) const {
        if (!is_finite(z))
            throw invalid_input("edge margin of a non-finite point");
        const std::size_t i = sector_of(std::atan2(z.y, z.x));
        return dot(normals_[i], z) - offsets_[i];
    }

private:
    std::vector<point> verts_;
    std::vector<vec2> normals_;
    std::vector<double> offsets_;
    std::vector<double> rel_angle_;
    double base_angle_ = 0.0;
    double max_vertex_norm_ = 0.0;
    double min_edge_distance_ = 0.0;
};

// alpha = arccos(inner): the body sits between the unit disk and the disk of
// radius inner, and no smaller angle works for either bound.
struct closeness_certificate {
    double alpha;
    double outer;  // <= 1
    double inner;  // == cos(alpha)
};

inline closeness_certificate alpha_closeness(const convex_body& q) {
    // 1e-12 absorbs vertices constructed on the unit circle itself
    if (q.max_vertex_norm() > 1.0 + 1e-12)
        throw not_close("convex body has a vertex outside the unit disk");
    const double inner = std::min(q.min_edge_distance(), 1.0);
    const double outer = std::min(q.max_vertex_norm(), 1.0);
    return {std::acos(inner), outer, inner};
}

// Scaled translate center + scale * body. body is borrowed, null for disks
// (scale is then the radius).
struct homothet {
    point center;
    double scale;
    const convex_body* body = nullptr;
};

// Disk touching p whose center sits on the ray u[p]; it passes through q iff
// the ray makes an acute angle theta with pq, giving radius |pq|/(2 cos theta).
inline std::optional<homothet> disk_through(const point& p, const point& q, const direction& u) {
    if (!is_finite(p) || !is_finite(q))
        throw invalid_input("disk through non-finite points");
    if (p == q)
        throw invalid_input("disk through coincident points");
    const vec2 d = q - p;
    const vec2 uu = u.unit();
    const double proj = dot(uu, d);
    if (proj <= 0.0)
        return std::nullopt;
    const double r = norm2(d) / (2.0 * proj);
    return homothet{p + r * uu, r, nullptr};
}

// Homothet of Q touching p with center on u[p] and q on its boundary. The
// touching point of p, in body coordinates, is the radial boundary point zeta
// in direction -u; scaling the body about zeta sweeps q iff q-p points into
// the local cone there. Outside the closed cone no copy reaches q (q lies
// beyond every supporting line at p). Along the cone boundary the contact
// slides over a flat edge and the scale is not unique.
inline std::optional<homothet> q_homothet_through(const point& p, const point& q,
                                                  const direction& u, const convex_body& body) {
    if (!is_finite(p) || !is_finite(q))
        throw invalid_input("homothet through non-finite points");
    if (p == q)
        throw invalid_input("homothet through coincident points");

    const vec2 uu = u.unit();
    const auto hit = body.radial_boundary(u.opposite());
    const long n = static_cast<long>(body.size());

    point zeta = hit.x;
    long first, last;     // cyclic vertex fan ahead of / behind the contact
    vec2 w_fwd, w_bwd;    // cone boundary directions along the boundary
    if (hit.edge_param <= 1e-9 || hit.edge_param >= 1.0 - 1e-9) {
        const long m = static_cast<long>(hit.edge) + (hit.edge_param <= 1e-9 ? 0 : 1);
        zeta = body.vertex(m);
        first = m + 1;
        last = m + n - 1;
        w_fwd = body.vertex(m + 1) - zeta;
        w_bwd = body.vertex(m - 1) - zeta;
    } else {
        first = static_cast<long>(hit.edge) + 1;
        last = static_cast<long>(hit.edge) + n;
        w_fwd = body.vertex(first) - zeta;
        w_bwd = body.vertex(static_cast<long>(hit.edge)) - zeta;
    }

    const vec2 dv = q - p;
    const vec2 dn = normalized(dv);
    for (const vec2& w : {w_fwd, w_bwd}) {
        const vec2 wn = normalized(w);
        if (std::abs(cross(dn, wn)) <= 1e-12 && dot(dn, wn) > 0.0)
            throw general_position_violation(
                "segment parallel to a flat edge at the touching point, homothet scale not unique");
    }
    if (!(cross(w_fwd, dn) > 0.0 && cross(dn, w_bwd) > 0.0))
        return std::nullopt;

    // s(i) = cross(vertex(i) - zeta, dn) flips sign exactly once over the fan
    long lo = first, hi = last;
    while (hi - lo > 1) {
        const long mid = lo + (hi - lo) / 2;
        if (cross(body.vertex(mid) - zeta, dn) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    const vec2 a = body.vertex(hi - 1) - zeta;
    const vec2 b = body.vertex(hi) - zeta;
    const double den = cross(dn, b - a);
    if (den == 0.0)
        throw internal_inconsistency("exit edge parallel to an interior ray");
    const double t = cross(a, b - a) / den;
    if (!(t > 0.0))
        throw internal_inconsistency("boundary exit behind the contact point");

    const double scale = norm(dv) / t;
    return homothet{p - scale * zeta, scale, &body};
}

// True when the homothet of body through p and q with center on u[p] exists
// and no other point of pts lies strictly inside it.
inline bool q_placement_empty(const std::vector<point>& pts, std::size_t p, std::size_t q,
                              const direction& u, const convex_body& body) {
    const auto h = q_homothet_through(pts[p], pts[q], u, body);
    if (!h)
        return false;
    const double reach = h->scale * body.max_vertex_norm();
    const double reach2 = reach * reach;
    const double inv = 1.0 / h->scale;
    for (std::size_t r = 0; r < pts.size(); ++r) {
        if (r == p || r == q)
            continue;
        const vec2 z = pts[r] - h->center;
        if (norm2(z) > reach2)
            continue;
        if (body.edge_margin(point{z.x * inv, z.y * inv}) < -1e-12)
            return false;
    }
    return true;
}

enum class chord_side { plus, minus };  // plus: right of the directed line pq

struct contain_verdict {
    bool contained;
    double max_excess;  // worst distance beyond the disk boundary, <= 0 when inside
};

// Checks that the part of the homothet through p,q on the given side of the
// line pq fits inside the disk through p,q whose direction is rotated by five
// times the body's closeness angle: clockwise for the right side, counter-
// clockwise for the left. Vertices on that side and every crossing of the
// homothet boundary with the line pq must land in the disk, 1e-9 outward slack.
inline contain_verdict check_contain_lemma(const point& p, const point& q, const direction& u,
                                           const convex_body& body, chord_side side) {
    closeness_certificate cert{};
    try {
        cert = alpha_closeness(body);
    } catch (const not_close&) {
        throw precondition_failed("containment check needs a body certified close to the unit disk");
    }
    const auto placed = q_homothet_through(p, q, u, body);
    if (!placed)
        throw precondition_failed("homothet through the two points is undefined for this direction");
    const direction tilted =
        side == chord_side::plus ? u.rotated_cw(5.0 * cert.alpha) : u.rotated_ccw(5.0 * cert.alpha);
    const auto disk = disk_through(p, q, tilted);
    if (!disk)
        throw precondition_failed("disk is undefined after the five-alpha rotation");

    const vec2 line = q - p;
    const std::size_t n = body.size();
    double max_excess = -std::numeric_limits<double>::infinity();
    auto visit = [&](const point& x) {
        max_excess = std::max(max_excess, norm(x - disk->center) - disk->scale);
    };
    std::vector<double> offside(n);
    std::vector<point> world(n);
    for (std::size_t i = 0; i < n; ++i) {
        world[i] = placed->center + placed->scale * body.vertices()[i];
        offside[i] = cross(line, world[i] - p);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (side == chord_side::plus ? offside[i] < 0.0 : offside[i] > 0.0)
            visit(world[i]);
        const std::size_t j = (i + 1) % n;
        if (offside[i] == 0.0)
            visit(world[i]);
        else if (offside[i] * offside[j] < 0.0)
            visit(world[i] + (offside[i] / (offside[i] - offside[j])) * (world[j] - world[i]));
    }
    return {max_excess <= 1e-9, max_excess};
}

// Angular extent, sampled on a uniform grid of directions, of the set of u
// whose homothet through the two points exists and has interior free of the
// other points; measured from p and then from q. The hit set must form one
// cyclic arc: the underlying cells are star-shaped, so a split set means a
// precision bug, not geometry.
inline std::pair<double, double> stability_under_q(const std::vector<point>& pts, std::size_t p,
                                                   std::size_t q, const convex_body& body,
                                                   int resolution) {
    if (resolution < 4096)
        throw invalid_input("direction grid resolution must be at least 4096");
    if (p >= pts.size() || q >= pts.size() || p == q)
        throw invalid_input("stability endpoints must be two distinct point indices");

    const double step = 2.0 * pi / resolution;
    auto sweep = [&](std::size_t from, std::size_t to) {
        std::vector<char> hits(static_cast<std::size_t>(resolution));
        int count = 0;
        for (int m = 0; m < resolution; ++m) {
            const bool hit = q_placement_empty(pts, from, to, direction(step * m), body);
            hits[static_cast<std::size_t>(m)] = hit;
            count += hit;
        }
        int blocks = 0;
        for (int m = 0; m < resolution; ++m)
            if (hits[static_cast<std::size_t>(m)] &&
                !hits[static_cast<std::size_t>((m + resolution - 1) % resolution)])
                ++blocks;
        if (blocks > 1)
            throw internal_inconsistency("sampled direction hits split into multiple arcs");
        return count * step;
    };
    return {sweep(p, q), sweep(q, p)};
}

// A supporting line at the boundary point in the given radial direction. At a
// vertex the family is a pencil; dir is then the edge-bisecting member and
// extremes carries the two incident edge directions (equal to dir otherwise).
struct support_line {
    point at;
    vec2 dir;
    bool at_vertex;
    std::array<vec2, 2> extremes;
};

inline support_line supporting_line(const convex_body& body, const direction& boundary_direction) {
    const auto hit = body.radial_boundary(boundary_direction);
    const long i = static_cast<long>(hit.edge);
    if (hit.edge_param > 1e-9 && hit.edge_param < 1.0 - 1e-9) {
        const vec2 e = normalized(body.vertex(i + 1) - body.vertex(i));
        return {hit.x, e, false, {e, e}};
    }
    const long m = i + (hit.edge_param <= 1e-9 ? 0 : 1);
    const vec2 ein = normalized(body.vertex(m) - body.vertex(m - 1));
    const vec2 eout = normalized(body.vertex(m + 1) - body.vertex(m));
    return {body.vertex(m), normalized(ein + eout), true, {ein, eout}};
}

// Acute angle between two lines given by direction vectors.
inline double line_angle(const vec2& a, const vec2& b) {
    const double t = angle_between(a, b);
    return std::min(t, pi - t);
}

}  // namespace sdgkit
