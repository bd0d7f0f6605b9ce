#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "delaunay.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "polynomial.hpp"
#include "predicates.hpp"

namespace sdgkit {

inline constexpr int max_motion_degree = 3;

// Polynomial motion of one point, valid on [t0, t1].
struct trajectory {
    polynomial x, y;
    double t0 = 0.0;
    double t1 = 1.0;
};

inline trajectory static_trajectory(point p, double t0 = 0.0, double t1 = 1.0) {
    return {polynomial({p.x}), polynomial({p.y}), t0, t1};
}

inline trajectory linear_trajectory(point p, vec2 velocity, double t0 = 0.0, double t1 = 1.0) {
    return {polynomial({p.x, velocity.x}), polynomial({p.y, velocity.y}), t0, t1};
}

inline void validate_trajectory(const trajectory& tr, int degree_cap = max_motion_degree) {
    if (!std::isfinite(tr.t0) || !std::isfinite(tr.t1) || !(tr.t0 <= tr.t1))
        throw invalid_input("trajectory validity bounds must be finite with t0 <= t1");
    if (tr.x.degree() > degree_cap || tr.y.degree() > degree_cap)
        throw invalid_input("trajectory degree exceeds the cap of " + std::to_string(degree_cap));
    for (double c : tr.x.coeffs())
        if (!std::isfinite(c)) throw invalid_input("trajectory coefficient is not finite");
    for (double c : tr.y.coeffs())
        if (!std::isfinite(c)) throw invalid_input("trajectory coefficient is not finite");
}

inline point position_at(const trajectory& tr, double t) {
    if (!(t >= tr.t0 && t <= tr.t1))
        throw out_of_range("time outside the trajectory validity interval");
    return {tr.x(t), tr.y(t)};
}

namespace detail {

// Same row layout as the exact incircle determinant: positive while d is
// inside the circumcircle of the counterclockwise triple (a, b, c).
inline polynomial incircle_polynomial(const trajectory& a, const trajectory& b,
                                      const trajectory& c, const trajectory& d) {
    polynomial adx = a.x - d.x, ady = a.y - d.y;
    polynomial bdx = b.x - d.x, bdy = b.y - d.y;
    polynomial cdx = c.x - d.x, cdy = c.y - d.y;
    polynomial alift = adx * adx + ady * ady;
    polynomial blift = bdx * bdx + bdy * bdy;
    polynomial clift = cdx * cdx + cdy * cdy;
    return alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
           clift * (adx * bdy - bdx * ady);
}

// Positive while c lies left of the directed line a -> b.
inline polynomial orientation_polynomial(const trajectory& a, const trajectory& b,
                                         const trajectory& c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

} // namespace detail

// First time after `after` at which the four points lie on a common circle.
inline std::optional<double> next_cocircularity(const trajectory& a, const trajectory& b,
                                                const trajectory& c, const trajectory& d,
                                                double after) {
    for (const trajectory* tr : {&a, &b, &c, &d}) validate_trajectory(*tr);
    double lo = std::max(std::max(a.t0, b.t0), std::max(c.t0, d.t0));
    double hi = std::min(std::min(a.t1, b.t1), std::min(c.t1, d.t1));
    if (!(after >= lo && after <= hi))
        throw out_of_range("query time outside the common validity interval");
    polynomial det = detail::incircle_polynomial(a, b, c, d);
    if (det.is_zero()) throw degenerate_motion("quadruple is cocircular at every time");
    return first_sign_changing_root(det, after, hi);
}

enum class event_kind { flip, hull_collinearity, sdg_enter, sdg_leave };

struct kinetic_event {
    double time;
    event_kind kind;
    std::vector<int> participants;  // flip: dying edge then entering edge; hull: the triple; sdg: the edge
    double residual;                // certificate value at the refined root, or threshold gap
};

struct event_log {
    double t0 = 0.0, t1 = 0.0;
    double alpha = 0.0, hysteresis = 2.0;
    std::vector<kinetic_event> events;              // nondecreasing time
    std::vector<std::pair<int, int>> initial_sdg;   // members at t0: stability >= hysteresis * alpha
    int flips = 0, hull_events = 0, sdg_enters = 0, sdg_leaves = 0;
    triangulation snapshot;                         // triangulation at t1

    // Combinatorial state recorded at requested sample times, for
    // cross-checking against a from-scratch rebuild.
    std::vector<std::pair<double, std::vector<std::array<int, 3>>>> samples;
};

namespace detail {

// Event-queue maintenance of the Delaunay triangulation of moving points.
// One certificate per edge of the structure: interior edges carry the
// cocircularity polynomial of their flanking quadruple, hull edges the
// collinearity polynomial of (edge, inner apex), and each hull corner the
// collinearity polynomial of its hull-neighbor triple (keyed by the edge
// to the ghost vertex). Failed certificates are processed in time order;
// each flip invalidates and reschedules exactly the five edges of the
// flipped quadrilateral.
class kinetic_simulator {
public:
    kinetic_simulator(const std::vector<trajectory>& trajs, double t0, double t1, double alpha,
                      double hysteresis, int event_budget, int scan_samples,
                      std::vector<double> sample_times)
        : trajs_(trajs), alpha_(alpha), hyst_(hysteresis), budget_(event_budget),
          scan_(scan_samples), samples_(std::move(sample_times)) {
        if (!(t1 >= t0) || !std::isfinite(t0) || !std::isfinite(t1))
            throw invalid_input("simulation window must be a finite interval");
        if (!(alpha > 0.0 && alpha < pi)) throw invalid_input("stability threshold must lie in (0, pi)");
        if (!(hysteresis >= 1.0)) throw invalid_input("hysteresis multiplier must be at least 1");
        if (scan_samples < 2) throw invalid_input("threshold scan needs at least 2 samples");
        for (const trajectory& tr : trajs) {
            validate_trajectory(tr);
            if (tr.t0 > t0 || tr.t1 < t1)
                throw invalid_input("every trajectory must cover the simulation window");
        }
        std::sort(samples_.begin(), samples_.end());
        for (double t : samples_)
            if (!(t >= t0 && t <= t1)) throw invalid_input("sample time outside the simulation window");
        log_.t0 = t0;
        log_.t1 = t1;
        log_.alpha = alpha;
        log_.hysteresis = hysteresis;
        now_ = t0;
    }

    event_log run() {
        tri_ = build_delaunay(positions(now_));
        for (auto [p, q] : tri_.edges()) {
            bool in = stability_at(p, q, now_) >= hyst_ * alpha_;
            member_[{p, q}] = in;
            if (in) log_.initial_sdg.push_back({p, q});
        }
        for (const auto& key : live_edge_keys()) schedule(key, now_);

        // Combinatorial structure is constant between events, so a sample strictly
        // before the next event time can be recorded from the current triangulation.
        std::size_t si = 0;
        auto record_samples_below = [&](double cutoff) {
            while (si < samples_.size() && samples_[si] < cutoff) {
                log_.samples.push_back({samples_[si], tri_.triangles()});
                ++si;
            }
        };

        while (!queue_.empty()) {
            item top = queue_.top();
            if (stale(top)) {
                queue_.pop();
                continue;
            }
            queue_.pop();
            reject_shared_simultaneity(top);
            record_samples_below(top.time);
            scan_thresholds(now_, top.time);
            advance_positions(top.time);
            apply(top);
            now_ = top.time;
        }

        record_samples_below(std::nextafter(log_.t1, std::numeric_limits<double>::infinity()));
        scan_thresholds(now_, log_.t1);
        advance_positions(log_.t1);
        log_.snapshot = tri_;
        return std::move(log_);
    }

private:
    struct item {
        double time;
        std::pair<int, int> key;  // edge, smaller index first; ghost_vertex sorts first
        long stamp;
        bool is_flip;             // false: hull collinearity
        std::array<int, 4> parts;
        int nparts;
        polynomial cert;

        bool operator>(const item& o) const {
            if (time != o.time) return time > o.time;
            return key > o.key;
        }
    };

    std::vector<point> positions(double t) const {
        std::vector<point> pts;
        pts.reserve(trajs_.size());
        for (const trajectory& tr : trajs_) pts.push_back({tr.x(t), tr.y(t)});
        return pts;
    }

    void advance_positions(double t) { tri_.displace_points(positions(t)); }

    point at(int v, double t) const { return {trajs_[v].x(t), trajs_[v].y(t)}; }

    // Stability of a current edge from evaluated positions; the flanking
    // vertex indices stay fixed between combinatorial events.
    double stability_at(int p, int q, double t) const {
        auto opp = tri_.opposite(p, q);
        double s = pi - angle_at(at(opp.r_plus, t), at(p, t), at(q, t));
        if (opp.r_minus) s -= angle_at(at(*opp.r_minus, t), at(p, t), at(q, t));
        return std::clamp(s, 0.0, pi);
    }

    static std::pair<int, int> edge_key(int a, int b) {
        return a < b ? std::pair<int, int>{a, b} : std::pair<int, int>{b, a};
    }

    std::vector<std::pair<int, int>> live_edge_keys() const {
        std::vector<std::pair<int, int>> keys;
        const auto& store = tri_.store();
        for (std::size_t ti = 0; ti < store.size(); ++ti) {
            const triangulation::tri& t = store[ti];
            if (!t.alive) continue;
            for (int i = 0; i < 3; ++i)
                if (static_cast<int>(ti) < t.nbr[i])
                    keys.push_back(edge_key(t.v[(i + 1) % 3], t.v[(i + 2) % 3]));
        }
        std::sort(keys.begin(), keys.end());
        keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
        return keys;
    }

    bool stale(const item& it) const {
        auto found = stamp_.find(it.key);
        return found == stamp_.end() || found->second != it.stamp;
    }

    // The hull corner at w: its two ghost triangles give the hull
    // predecessor u and successor x of w.
    struct hull_corner {
        int prev, next;
        int tri_id, idx;  // flip handle: the ghost triangle whose edge opposite idx is (w, ghost)
    };

    hull_corner corner_at(int w) const {
        const auto& store = tri_.store();
        hull_corner c{-1, -1, -1, -1};
        for (std::size_t ti = 0; ti < store.size(); ++ti) {
            const triangulation::tri& t = store[ti];
            if (!t.alive || !tri_.is_ghost_tri(t)) continue;
            int gi = -1;
            for (int i = 0; i < 3; ++i)
                if (t.v[i] == triangulation::ghost_vertex) gi = i;
            int src = t.v[(gi + 2) % 3], dst = t.v[(gi + 1) % 3];
            if (src == w) c.next = dst;  // this ghost covers the hull step w -> dst
            if (dst == w) {
                c.prev = src;            // this one covers src -> w
                c.tri_id = static_cast<int>(ti);
                c.idx = (gi + 2) % 3;    // edge opposite src is (w, ghost)
            }
        }
        if (c.prev < 0 || c.next < 0)
            throw internal_inconsistency("hull corner certificate on a non-hull vertex");
        return c;
    }

    // Builds and enqueues the certificate of one live edge. Roots are
    // searched strictly after `after`; reschedules pass a small guard past
    // the event time so the root just processed is not rediscovered.
    void schedule(const std::pair<int, int>& key, double after) {
        long stamp = ++stamp_[key];
        item it;
        it.key = key;
        it.stamp = stamp;

        polynomial cert;
        if (key.first == triangulation::ghost_vertex) {
            // Hull corner: fails when the neighbor triple turns collinear.
            hull_corner c = corner_at(key.second);
            cert = orientation_polynomial(trajs_[c.prev], trajs_[key.second], trajs_[c.next]);
            it.is_flip = false;
            it.parts = {c.prev, key.second, c.next, -1};
            it.nparts = 3;
        } else {
            auto [t1, i1] = tri_.find_edge(key.first, key.second);
            if (t1 < 0) throw internal_inconsistency("certificate requested for a missing edge");
            const auto& store = tri_.store();
            int x1 = store[t1].v[i1];
            int t2 = store[t1].nbr[i1];
            int j = 0;
            while (store[t2].nbr[j] != t1) ++j;
            int x2 = store[t2].v[j];
            if (x1 == triangulation::ghost_vertex || x2 == triangulation::ghost_vertex) {
                // Hull edge: fails when the inner apex reaches the hull line.
                int z = x1 == triangulation::ghost_vertex ? x2 : x1;
                int ghost_tri = x1 == triangulation::ghost_vertex ? t1 : t2;
                int gi = 0;
                while (store[ghost_tri].v[gi] != triangulation::ghost_vertex) ++gi;
                int src = store[ghost_tri].v[(gi + 2) % 3], dst = store[ghost_tri].v[(gi + 1) % 3];
                cert = orientation_polynomial(trajs_[src], trajs_[dst], trajs_[z]);
                it.is_flip = false;
                it.parts = {src, dst, z, -1};
                it.nparts = 3;
            } else {
                // Interior edge: the flanking quadruple must stay non-cocircular.
                cert = incircle_polynomial(trajs_[store[t1].v[0]], trajs_[store[t1].v[1]],
                                           trajs_[store[t1].v[2]], trajs_[x2]);
                it.is_flip = true;
                it.parts = {key.first, key.second, std::min(x1, x2), std::max(x1, x2)};
                it.nparts = 4;
            }
        }

        if (cert.is_zero())
            throw degenerate_motion("certificate polynomial vanishes identically");
        std::optional<double> root = first_sign_changing_root(cert, after, log_.t1);
        if (!root) return;
        it.time = *root;
        it.cert = std::move(cert);
        queue_.push(std::move(it));
    }

    // Two valid certificate failures within the root tolerance are only
    // processable when they touch disjoint points; entangled simultaneity
    // is outside the generic-motion contract.
    void reject_shared_simultaneity(const item& ev) {
        while (!queue_.empty() && stale(queue_.top())) queue_.pop();
        if (queue_.empty()) return;
        const item& next = queue_.top();
        if (next.time - ev.time > 1e-10) return;
        for (int i = 0; i < ev.nparts; ++i)
            for (int j = 0; j < next.nparts; ++j)
                if (ev.parts[i] == next.parts[j])
                    throw degenerate_motion(
                        "two simultaneous certificate failures share point " +
                        std::to_string(ev.parts[i]));
    }

    void bump(int kinds) {
        if (static_cast<int>(log_.events.size()) + kinds > budget_)
            throw budget_exceeded("event budget exhausted at t=" + std::to_string(now_));
    }

    void emit(kinetic_event ev) {
        bump(1);
        switch (ev.kind) {
            case event_kind::flip: ++log_.flips; break;
            case event_kind::hull_collinearity: ++log_.hull_events; break;
            case event_kind::sdg_enter: ++log_.sdg_enters; break;
            case event_kind::sdg_leave: ++log_.sdg_leaves; break;
        }
        log_.events.push_back(std::move(ev));
    }

    // Locates threshold crossings of the stability angle on (from, to) by a
    // fixed-density scan refined with bisection. The membership state gives
    // each edge its active threshold: out-edges wait for hysteresis * alpha
    // upward, in-edges for alpha downward.
    void scan_thresholds(double from, double to) {
        if (!(to > from)) return;
        std::vector<kinetic_event> found;
        for (auto& [key, in] : member_) {
            auto [p, q] = key;
            double t_prev = from;
            double s_prev = stability_at(p, q, t_prev);
            for (int s = 1; s <= scan_; ++s) {
                double t_cur = from + (to - from) * s / scan_;
                double s_cur = stability_at(p, q, t_cur);
                double threshold = in ? alpha_ : hyst_ * alpha_;
                bool crossed = in ? (s_cur < threshold && s_prev >= threshold)
                                  : (s_cur >= threshold && s_prev < threshold);
                if (crossed) {
                    double lo = t_prev, hi = t_cur;
                    while (hi - lo > 1e-9) {
                        double mid = 0.5 * (lo + hi);
                        bool past = in ? stability_at(p, q, mid) < threshold
                                       : stability_at(p, q, mid) >= threshold;
                        (past ? hi : lo) = mid;
                    }
                    double t_star = 0.5 * (lo + hi);
                    found.push_back({t_star, in ? event_kind::sdg_leave : event_kind::sdg_enter,
                                     {p, q}, stability_at(p, q, t_star) - threshold});
                    in = !in;
                }
                t_prev = t_cur;
                s_prev = s_cur;
            }
        }
        std::sort(found.begin(), found.end(), [](const kinetic_event& a, const kinetic_event& b) {
            if (a.time != b.time) return a.time < b.time;
            return a.participants < b.participants;
        });
        for (kinetic_event& ev : found) emit(std::move(ev));
    }

    void drop_membership(const std::pair<int, int>& key, double t) {
        auto found = member_.find(key);
        if (found == member_.end()) return;
        // The scan normally emits the leave before stability reaches zero;
        // a crossing inside the last scan cell is settled here at the latest.
        if (found->second)
            emit({t, event_kind::sdg_leave, {key.first, key.second}, 0.0});
        member_.erase(found);
    }

    void init_membership(const std::pair<int, int>& key, double t) {
        if (member_.count(key)) return;
        bool in = stability_at(key.first, key.second, t) >= hyst_ * alpha_;
        member_[key] = in;
        if (in) emit({t, event_kind::sdg_enter, {key.first, key.second},
                      stability_at(key.first, key.second, t) - hyst_ * alpha_});
    }

    void apply(const item& ev) {
        int t1, i1;
        if (ev.key.first == triangulation::ghost_vertex) {
            hull_corner c = corner_at(ev.key.second);
            t1 = c.tri_id;
            i1 = c.idx;
        } else {
            std::tie(t1, i1) = tri_.find_edge(ev.key.first, ev.key.second);
            if (t1 < 0) throw internal_inconsistency("failed certificate names a missing edge");
        }

        std::vector<std::pair<int, int>> before = live_edge_keys();
        if (ev.key.first != triangulation::ghost_vertex) drop_membership(ev.key, ev.time);

        int t2 = tri_.store()[t1].nbr[i1];
        tri_.flip(t1, i1);

        kinetic_event out;
        out.time = ev.time;
        out.kind = ev.is_flip ? event_kind::flip : event_kind::hull_collinearity;
        out.participants.assign(ev.parts.begin(), ev.parts.begin() + ev.nparts);
        out.residual = ev.cert(ev.time);
        emit(std::move(out));

        // The flipped pair now bounds exactly the five affected edges; their
        // flanking quadruples changed, so their certificates restart. The
        // guard keeps the root just processed from firing again. Stamps only
        // ever advance: a destroyed edge gets a bump, not an erase, so a later
        // rebirth of the same pair cannot revalidate queue items from its
        // previous life.
        ++stamp_[ev.key];
        std::vector<std::pair<int, int>> touched;
        const auto& store = tri_.store();
        for (int t : {t1, t2})
            for (int i = 0; i < 3; ++i)
                touched.push_back(edge_key(store[t].v[(i + 1) % 3], store[t].v[(i + 2) % 3]));
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (const auto& key : touched) schedule(key, ev.time + 1e-9);

        // Settle membership bookkeeping for finite edges that were created
        // or destroyed (a hull flip destroys none and may create one).
        std::vector<std::pair<int, int>> after = live_edge_keys();
        for (const auto& key : before)
            if (key.first >= 0 && !std::binary_search(after.begin(), after.end(), key) &&
                key != ev.key) {
                drop_membership(key, ev.time);
                ++stamp_[key];
            }
        for (const auto& key : after)
            if (key.first >= 0 && !std::binary_search(before.begin(), before.end(), key))
                init_membership(key, ev.time);
    }

    std::vector<trajectory> trajs_;
    double alpha_, hyst_;
    int budget_, scan_;
    double now_ = 0.0;
    triangulation tri_;
    event_log log_;
    std::map<std::pair<int, int>, long> stamp_;
    std::map<std::pair<int, int>, bool> member_;
    std::priority_queue<item, std::vector<item>, std::greater<item>> queue_;
    std::vector<double> samples_;
};

} // namespace detail

// Runs the kinetic Delaunay simulation on [t0, t1], tracking alpha-stable
// membership with an enter threshold of hysteresis * alpha and a leave
// threshold of alpha. Requires general position at t0. Sample times must lie
// inside the window; the triangulation at each is recorded in the log.
inline event_log simulate(const std::vector<trajectory>& trajs, double t0, double t1, double alpha,
                          double hysteresis = 2.0, int event_budget = 100000,
                          int scan_samples = 64, const std::vector<double>& sample_times = {}) {
    detail::kinetic_simulator sim(trajs, t0, t1, alpha, hysteresis, event_budget, scan_samples,
                                  sample_times);
    return sim.run();
}

struct event_summary {
    int flips = 0;
    int hull_events = 0;
    int sdg_enters = 0;
    int sdg_leaves = 0;
    double membership_per_flip = 0.0;

    std::string csv_row() const {
        return std::to_string(flips) + "," + std::to_string(hull_events) + "," +
               std::to_string(sdg_enters) + "," + std::to_string(sdg_leaves) + "," +
               std::to_string(membership_per_flip);
    }
};

inline event_summary event_report(const event_log& log) {
    event_summary s;
    s.flips = log.flips;
    s.hull_events = log.hull_events;
    s.sdg_enters = log.sdg_enters;
    s.sdg_leaves = log.sdg_leaves;
    int membership = log.sdg_enters + log.sdg_leaves;
    s.membership_per_flip = log.flips > 0 ? static_cast<double>(membership) / log.flips : 0.0;
    return s;
}

// True iff every flipped edge had already fallen out of the stable graph
// just before its flip: stability measured delta before each flip time is
// below the log's alpha. Static logs hold vacuously.
inline bool cocircularity_avoidance_check(const std::vector<trajectory>& trajs,
                                          const event_log& log, double delta = 1e-6) {
    for (const kinetic_event& ev : log.events) {
        if (ev.kind != event_kind::flip) continue;
        double t = std::max(log.t0, ev.time - delta);
        std::vector<point> pts;
        pts.reserve(trajs.size());
        for (const trajectory& tr : trajs) pts.push_back(position_at(tr, t));
        triangulation dt = build_delaunay(pts);
        int p = ev.participants[0], q = ev.participants[1];
        if (!dt.has_edge(p, q)) continue;  // already flipped away just before
        if (stability_angle(dt, p, q) >= log.alpha) return false;
    }
    return true;
}

} // namespace sdgkit
