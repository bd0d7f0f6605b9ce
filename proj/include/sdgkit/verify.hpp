#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "convex_distance.hpp"
#include "delaunay.hpp"
#include "errors.hpp"
#include "generators.hpp"
#include "geometry.hpp"
#include "kinetic.hpp"
#include "neighbors.hpp"
#include "polygon_metric.hpp"
#include "random.hpp"
#include "stable_graph.hpp"

namespace sdgkit {

// Randomized audit of the library's structural claims. Each suite replays a
// family of checks over seeded instances; a violation names the check, the
// seed, and enough detail to reproduce the instance by hand.

struct verify_violation {
    std::string check;
    std::uint64_t seed;
    std::string detail;
};

struct verify_options {
    int seeds = 10;
    int n = 50;
    int k = 64;
    double alpha = 0.0;  // 0 lets each suite pick its own threshold
    int workers = 0;     // 0 means hardware concurrency; SDGKIT_THREADS caps both
};

struct verify_report {
    std::string suite;
    verify_options options;
    long checks = 0;
    std::vector<verify_violation> violations;
    bool pass() const { return violations.empty(); }
};

namespace detail {

struct verify_sink {
    long checks = 0;
    std::vector<verify_violation> violations;

    // detail is only materialized on failure; hot paths tally millions of
    // passing checks.
    void tally(bool ok, const char* check, std::uint64_t seed, auto&& detail) {
        ++checks;
        if (!ok) violations.push_back({check, seed, detail()});
    }
};

inline int worker_count(int requested) {
    int w = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (w <= 0) w = 1;
    if (const char* cap = std::getenv("SDGKIT_THREADS")) {
        int c = std::atoi(cap);
        if (c > 0) w = std::min(w, c);
    }
    return std::max(1, w);
}

// Fans seeds 1..seeds over a worker pool. Results are merged in seed order,
// so the report does not depend on the worker count.
template <typename Fn>
void for_each_seed(int seeds, int workers, verify_report& rep, Fn&& fn) {
    const int pool = std::min(worker_count(workers), std::max(seeds, 1));
    std::vector<verify_sink> sinks(static_cast<std::size_t>(seeds));
    std::atomic<int> next{0};
    auto work = [&] {
        for (int i = next.fetch_add(1); i < seeds; i = next.fetch_add(1))
            fn(static_cast<std::uint64_t>(i) + 1, sinks[static_cast<std::size_t>(i)]);
    };
    std::vector<std::thread> threads;
    for (int t = 1; t < pool; ++t) threads.emplace_back(work);
    work();
    for (std::thread& t : threads) t.join();
    for (verify_sink& s : sinks) {
        rep.checks += s.checks;
        rep.violations.insert(rep.violations.end(), s.violations.begin(), s.violations.end());
    }
}

inline std::string edge_tag(int p, int q) {
    return "edge (" + std::to_string(p) + ", " + std::to_string(q) + ")";
}

// Maximal cyclic runs of set entries as (start, length); an all-set circle
// is one run covering everything.
inline std::vector<std::pair<int, int>> cyclic_runs(const std::vector<char>& hit) {
    const int k = static_cast<int>(hit.size());
    int gap = -1;
    for (int i = 0; i < k; ++i)
        if (!hit[static_cast<std::size_t>(i)]) {
            gap = i;
            break;
        }
    if (gap < 0) return {{0, k}};
    std::vector<std::pair<int, int>> runs;
    int len = 0, start = -1;
    for (int off = 1; off <= k; ++off) {
        int i = (gap + off) % k;
        if (hit[static_cast<std::size_t>(i)]) {
            if (len == 0) start = i;
            ++len;
        } else if (len > 0) {
            runs.push_back({start, len});
            len = 0;
        }
    }
    return runs;
}

template <typename Table>
std::vector<char> fan_hits(const Table& tab, int p, int q) {
    std::vector<char> h(static_cast<std::size_t>(tab.k()), 0);
    for (int j = 0; j < tab.k(); ++j) {
        const auto& e = tab.at(p, j);
        h[static_cast<std::size_t>(j)] = e && e->neighbor == q;
    }
    return h;
}

// Directional neighbor tables in both metrics agree along long runs: the
// core of a Euclidean run of length 3 or more is polygonal, and all but the
// two outermost indices on each side of a polygonal run of length 5 or more
// are Euclidean. Edges stable beyond four grid steps hit the polygonal fan
// at both ends, and six consecutive hits at both ends force one grid step
// of stability.
inline void lemmas_seed(std::uint64_t seed, const verify_options& opt, verify_sink& sink) {
    const std::vector<point> pts = gen_uniform(opt.n, seed);
    const int k = opt.k, n = opt.n;
    const euclid_neighbor_table E(pts, k);
    const diamond_neighbor_table D(pts, regular_kgon(k));

    for (int p = 0; p < n; ++p) {
        std::vector<char> seen_e(static_cast<std::size_t>(n), 0);
        std::vector<char> seen_d(static_cast<std::size_t>(n), 0);
        for (int j = 0; j < k; ++j) {
            if (E.at(p, j)) seen_e[static_cast<std::size_t>(E.at(p, j)->neighbor)] = 1;
            if (D.at(p, j)) seen_d[static_cast<std::size_t>(D.at(p, j)->neighbor)] = 1;
        }
        for (int q = 0; q < n; ++q) {
            if (seen_e[static_cast<std::size_t>(q)]) {
                for (auto [start, h] : cyclic_runs(fan_hits(E, p, q))) {
                    if (h < 3) continue;
                    for (int off = 1; off < h - 1; ++off) {
                        int j = (start + off) % k;
                        sink.tally(D.at(p, j) && D.at(p, j)->neighbor == q,
                                   "euclid-run-core-in-diamond-fan", seed, [&] {
                                       return edge_tag(p, q) + " direction " + std::to_string(j) +
                                              " inside a run of " + std::to_string(h);
                                   });
                    }
                }
            }
            if (seen_d[static_cast<std::size_t>(q)]) {
                for (auto [start, h] : cyclic_runs(fan_hits(D, p, q))) {
                    if (h < 5) continue;
                    for (int off = 2; off < h - 2; ++off) {
                        int j = (start + off) % k;
                        sink.tally(E.at(p, j) && E.at(p, j)->neighbor == q,
                                   "diamond-run-core-in-euclid-fan", seed, [&] {
                                       return edge_tag(p, q) + " direction " + std::to_string(j) +
                                              " inside a run of " + std::to_string(h);
                                   });
                    }
                }
            }
        }
    }

    const double alpha = 2.0 * pi / k;
    const triangulation dt = build_delaunay(pts);
    for (auto [p, q] : dt.edges()) {
        const double sigma = stability_angle(dt, p, q);
        const std::vector<char> hp = fan_hits(D, p, q), hq = fan_hits(D, q, p);
        if (sigma >= 4.0 * alpha) {
            const long cp = std::count(hp.begin(), hp.end(), char(1));
            const long cq = std::count(hq.begin(), hq.end(), char(1));
            sink.tally(cp >= 2 && cq >= 2, "stable-edge-diamond-hits", seed, [&] {
                return edge_tag(p, q) + " stability " + std::to_string(sigma) + " hits " +
                       std::to_string(cp) + "/" + std::to_string(cq);
            });
        }
        int rp = 0, rq = 0;
        for (auto [start, h] : cyclic_runs(hp)) rp = std::max(rp, h);
        for (auto [start, h] : cyclic_runs(hq)) rq = std::max(rq, h);
        if (rp >= 6 && rq >= 6) {
            sink.tally(sigma >= alpha - 1e-9, "consecutive-hits-stability", seed, [&] {
                return edge_tag(p, q) + " runs " + std::to_string(rp) + "/" + std::to_string(rq) +
                       " stability " + std::to_string(sigma);
            });
        }
    }
}

// The breakpoint proxy is sandwiched between exact graphs one and eight grid
// steps tight, checked both through the audit entry point and directly as
// subset relations.
inline void poly_stable_seed(std::uint64_t seed, const verify_options& opt, verify_sink& sink) {
    const std::vector<point> pts = gen_uniform(opt.n, seed);
    const double alpha = 2.0 * pi / opt.k;

    const stable_graph_report proxy = sdg_proxy(pts, opt.k);
    // No edge reaches stability pi, so a tight threshold at or past it makes
    // the inner graph empty and the completeness side vacuous.
    const double tight = std::min(8.0 * alpha, pi);
    const stable_graph_report audited = verify_sdg(pts, proxy, alpha, tight);
    sink.tally(audited.s1_violations.empty(), "proxy-edges-are-stable", seed, [&] {
        const sdg_edge& e = audited.s1_violations.front();
        return edge_tag(e.p, e.q) + " stability " + std::to_string(e.stability);
    });
    sink.tally(audited.s2_violations.empty(), "very-stable-edges-in-proxy", seed, [&] {
        const sdg_edge& e = audited.s2_violations.front();
        return edge_tag(e.p, e.q) + " stability " + std::to_string(e.stability);
    });

    const stable_graph_report outer = sdg_euclidean(pts, alpha);
    if (tight < pi) {
        const stable_graph_report inner = sdg_euclidean(pts, tight);
        for (const sdg_edge& e : inner.edges)
            sink.tally(proxy.contains(e.p, e.q), "tight-graph-inside-proxy", seed,
                       [&] { return edge_tag(e.p, e.q); });
    }
    for (const sdg_edge& e : proxy.edges)
        sink.tally(outer.contains(e.p, e.q), "proxy-inside-loose-graph", seed,
                   [&] { return edge_tag(e.p, e.q); });
}

// Counterclockwise vertex ring for a fine regular body centered at the
// origin; the polygonal tables index theirs clockwise.
inline convex_body fine_kgon_body(int k, double offset = 0.0) {
    regular_kgon g(k, offset);
    std::vector<point> vs;
    vs.reserve(static_cast<std::size_t>(k));
    for (int j = k - 1; j >= 0; --j) vs.push_back(g.vertex(j));
    return convex_body(std::move(vs));
}

// Stability transfer between the Euclidean and polygonal metrics on one
// instance. The polygonal side is sampled on a fine direction grid; a coarse
// prepass certifies edges whose sampled extent clears the threshold with
// quantization room to spare, and only near-threshold edges pay for the fine
// sweep. Both certificates are pure grid arithmetic, each sampled arc being
// within two grid cells of the true one.
inline void theorem_window_seed(std::uint64_t seed, const verify_options& opt, verify_sink& sink,
                                const convex_body& body, double alpha) {
    const std::vector<point> pts = gen_uniform(opt.n, seed);
    const triangulation dt = build_delaunay(pts);
    const int fine = 8192, coarse = 256;
    const double fine_slack = 2.0 * (2.0 * pi / fine);
    const double coarse_slack = 2.0 * (2.0 * pi / coarse);

    auto coarse_extent = [&](std::size_t a, std::size_t b) {
        int cnt = 0;
        for (int m = 0; m < coarse; ++m)
            cnt += q_placement_empty(pts, a, b, direction(2.0 * pi * m / coarse), body);
        return cnt * (2.0 * pi / coarse);
    };

    for (auto [p, q] : dt.edges()) {
        const double sigma = stability_angle(dt, p, q);
        const std::size_t up = static_cast<std::size_t>(p), uq = static_cast<std::size_t>(q);

        bool forward_ok = true, need_fine = false;
        if (sigma >= 11.0 * alpha) {
            const double cp = coarse_extent(up, uq), cq = coarse_extent(uq, up);
            if (std::min(cp, cq) - coarse_slack - fine_slack < alpha - fine_slack) need_fine = true;
        }
        const bool converse_candidate = sigma < alpha - fine_slack;
        if (converse_candidate) need_fine = true;

        double fp = 0.0, fq = 0.0;
        if (need_fine) {
            auto [a, b] = stability_under_q(pts, up, uq, body, fine);
            fp = a;
            fq = b;
            if (sigma >= 11.0 * alpha)
                forward_ok = std::min(fp, fq) >= alpha - fine_slack;
        }
        sink.tally(sigma < 11.0 * alpha || forward_ok, "stable-euclid-implies-polygon", seed, [&] {
            return edge_tag(p, q) + " stability " + std::to_string(sigma) + " sampled " +
                   std::to_string(fp) + "/" + std::to_string(fq);
        });
        sink.tally(!converse_candidate || std::min(fp, fq) < 11.0 * alpha,
                   "stable-polygon-implies-euclid", seed, [&] {
                       return edge_tag(p, q) + " sampled " + std::to_string(fp) + "/" +
                              std::to_string(fq) + " stability " + std::to_string(sigma);
                   });
    }
}

// Supporting-line geometry of a certified body: every admissible line at a
// boundary point is within the closeness angle of the circle tangent there,
// two supporting lines along a chord agree to twice that angle, and each
// half of a two-point homothet fits in the disk rotated five closeness
// angles toward it.
inline void body_claims(const verify_options& opt, const convex_body& body, double alpha,
                        verify_sink& sink) {
    prng gen(20260814);
    const int trials = std::max(1000, 500 * opt.seeds);

    for (int t = 0; t < trials; ++t) {
        const direction rad(gen.uniform(0.0, 2.0 * pi));
        const support_line sl = supporting_line(body, rad);

        bool orth = true;
        for (const vec2& ld : {sl.dir, sl.extremes[0], sl.extremes[1]})
            orth = orth && line_angle(ld, perp_ccw(sl.at)) <= alpha + 1e-9;
        sink.tally(orth, "support-line-orthogonality", 0,
                   [&] { return "radial direction " + std::to_string(rad.angle()); });

        const double b = dot(sl.at, normalized(sl.dir));
        const double disc = std::max(b * b - (norm2(sl.at) - 1.0), 0.0);
        bool tangent = true;
        for (double s : {-b - std::sqrt(disc), -b + std::sqrt(disc)}) {
            const point e = sl.at + s * normalized(sl.dir);
            tangent = tangent && line_angle(sl.dir, perp_ccw(e)) <= alpha + 1e-9;
        }
        sink.tally(tangent, "support-line-circle-tangent", 0,
                   [&] { return "radial direction " + std::to_string(rad.angle()); });
    }

    for (int t = 0; t < trials; ++t) {
        const support_line a = supporting_line(body, direction(gen.uniform(0.0, 2.0 * pi)));
        const support_line b = supporting_line(body, direction(gen.uniform(0.0, 2.0 * pi)));
        if (norm(a.at - b.at) < 1e-9) continue;
        const vec2 chord = b.at - a.at;
        sink.tally(std::abs(line_angle(a.dir, chord) - line_angle(b.dir, chord)) <=
                       2.0 * alpha + 1e-9,
                   "support-line-chord-agreement", 0, [&] {
                       return "boundary points at angles " + std::to_string(a.at.x) + "," +
                              std::to_string(a.at.y) + " and " + std::to_string(b.at.x) + "," +
                              std::to_string(b.at.y);
                   });
    }

    int done = 0;
    for (int t = 0; t < 64 * trials && done < trials; ++t) {
        const point p{gen.uniform(0.0, 2.0), gen.uniform(0.0, 2.0)};
        const point q{gen.uniform(0.0, 2.0), gen.uniform(0.0, 2.0)};
        if (norm(q - p) < 1e-3) continue;
        const direction u(gen.uniform(0.0, 2.0 * pi));
        const chord_side side = t % 2 == 0 ? chord_side::plus : chord_side::minus;
        try {
            const contain_verdict v = check_contain_lemma(p, q, u, body, side);
            sink.tally(v.contained && v.max_excess <= 1e-9, "homothet-half-in-rotated-disk", 0,
                       [&] {
                           return "points (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                                  ") (" + std::to_string(q.x) + "," + std::to_string(q.y) +
                                  ") excess " + std::to_string(v.max_excess);
                       });
            ++done;
        } catch (const precondition_failed&) {
        }
    }
    sink.tally(done >= trials, "containment-sample-count", 0,
               [&] { return "only " + std::to_string(done) + " admissible samples"; });
}

// Structural properties of the exact stable graph: monotone in the
// threshold, edge count bounded below, skeleton and closest-pair edges
// stable, the relative neighborhood graph inside the triangulation, and
// flips preceded by stability exits under motion.
inline void properties_seed(std::uint64_t seed, const verify_options& opt, verify_sink& sink) {
    const std::vector<point> pts = gen_uniform(opt.n, seed);
    const double base = opt.alpha > 0.0 ? opt.alpha : pi / 32.0;

    const stable_graph_report g1 = sdg_euclidean(pts, base);
    const stable_graph_report g2 = sdg_euclidean(pts, 2.0 * base);
    const stable_graph_report g4 = sdg_euclidean(pts, 4.0 * base);
    for (const sdg_edge& e : g4.edges)
        sink.tally(g2.contains(e.p, e.q), "threshold-monotonicity", seed,
                   [&] { return edge_tag(e.p, e.q); });
    for (const sdg_edge& e : g2.edges)
        sink.tally(g1.contains(e.p, e.q), "threshold-monotonicity", seed,
                   [&] { return edge_tag(e.p, e.q); });

    for (double a : {pi / 64.0, pi / 32.0, pi / 16.0}) {
        const lower_bound_result r = lower_bound_check(pts, a);
        sink.tally(r.pass, "stable-edge-count-bound", seed, [&] {
            return std::to_string(r.count) + " stable edges against a bound of " +
                   std::to_string(r.bound);
        });
    }

    const triangulation dt = build_delaunay(pts);
    for (double beta : {1.05, 1.2, 2.0}) {
        const double bound = 2.0 * std::acos(1.0 / beta);
        for (auto [p, q] : beta_skeleton(pts, beta))
            sink.tally(dt.has_edge(p, q) && stability_angle(dt, p, q) >= bound - 1e-9,
                       "skeleton-edge-stability", seed, [&] {
                           return edge_tag(p, q) + " at beta " + std::to_string(beta);
                       });
    }

    const auto [cp, cq] = closest_pair(pts);
    sink.tally(dt.has_edge(cp, cq) && stability_angle(dt, cp, cq) >= pi / 3.0 - 1e-9,
               "closest-pair-stability", seed, [&] { return edge_tag(cp, cq); });

    for (auto [p, q] : rng(pts))
        sink.tally(dt.has_edge(p, q), "rng-edge-in-delaunay", seed,
                   [&] { return edge_tag(p, q); });

    const int moving = std::min(opt.n, 20);
    const std::vector<point> mpts = gen_uniform(moving, seed);
    prng vel(seed * 1000003 + 17);
    std::vector<trajectory> trajs;
    trajs.reserve(static_cast<std::size_t>(moving));
    for (int i = 0; i < moving; ++i)
        trajs.push_back(
            linear_trajectory(mpts[static_cast<std::size_t>(i)],
                              {vel.uniform(-0.4, 0.4), vel.uniform(-0.4, 0.4)}, 0.0, 1.0));
    const event_log log = simulate(trajs, 0.0, 1.0, 0.3);
    sink.tally(cocircularity_avoidance_check(trajs, log), "flip-follows-stability-exit", seed,
               [&] { return std::to_string(log.flips) + " flips"; });
}

// Fixed configurations behind the negative results: a relative neighborhood
// edge far below any useful stability, and a ring whose center strands once
// the threshold passes the spoke stability.
inline void properties_gadgets(verify_sink& sink) {
    const std::vector<point> gadget = gen_rng_gadget();
    const std::vector<std::pair<int, int>> redges = rng(gadget);
    const bool has_long = std::find(redges.begin(), redges.end(), std::make_pair(0, 1)) !=
                          redges.end();
    const triangulation gdt = build_delaunay(gadget);
    const double s = stability_angle(gdt, 0, 1);
    sink.tally(has_long && s > 0.0 && s < 0.05, "rng-edge-below-stability", 0,
               [&] { return "long edge stability " + std::to_string(s); });

    const std::vector<point> ring = gen_isolated_vertex(16, 3);
    const stable_graph_report rep = sdg_euclidean(ring, 0.6);
    bool center_isolated = true;
    int ring_edges = 0;
    for (const sdg_edge& e : rep.edges) {
        if (e.p == 0 || e.q == 0) center_isolated = false;
        else ++ring_edges;
    }
    sink.tally(center_isolated && ring_edges >= 16, "stable-graph-disconnects", 0, [&] {
        return std::to_string(ring_edges) + " ring edges, center isolated: " +
               std::string(center_isolated ? "yes" : "no");
    });
}

} // namespace detail

inline verify_report run_verify_suite(const std::string& suite, const verify_options& opt) {
    if (opt.seeds < 1) throw invalid_input("verification needs at least one seed");
    if (opt.n < 4) throw invalid_input("verification instances need at least 4 points");
    if (opt.k < 8 || opt.k % 2 != 0) throw invalid_input("direction grid needs even k >= 8");

    verify_report rep;
    rep.suite = suite;
    rep.options = opt;

    if (suite == "lemmas") {
        detail::for_each_seed(opt.seeds, opt.workers, rep,
                              [&](std::uint64_t s, detail::verify_sink& sink) {
                                  detail::lemmas_seed(s, opt, sink);
                              });
    } else if (suite == "theorem1") {
        const convex_body body = detail::fine_kgon_body(720);
        const double alpha = alpha_closeness(body).alpha;
        detail::for_each_seed(opt.seeds, opt.workers, rep,
                              [&](std::uint64_t s, detail::verify_sink& sink) {
                                  detail::theorem_window_seed(s, opt, sink, body, alpha);
                              });
        detail::verify_sink claims;
        detail::body_claims(opt, body, alpha, claims);
        rep.checks += claims.checks;
        rep.violations.insert(rep.violations.end(), claims.violations.begin(),
                              claims.violations.end());
    } else if (suite == "poly-stable") {
        detail::for_each_seed(opt.seeds, opt.workers, rep,
                              [&](std::uint64_t s, detail::verify_sink& sink) {
                                  detail::poly_stable_seed(s, opt, sink);
                              });
    } else if (suite == "properties") {
        detail::for_each_seed(opt.seeds, opt.workers, rep,
                              [&](std::uint64_t s, detail::verify_sink& sink) {
                                  detail::properties_seed(s, opt, sink);
                              });
        detail::verify_sink gadgets;
        detail::properties_gadgets(gadgets);
        rep.checks += gadgets.checks;
        rep.violations.insert(rep.violations.end(), gadgets.violations.begin(),
                              gadgets.violations.end());
    } else {
        throw invalid_input("unknown suite " + suite);
    }
    return rep;
}

inline std::string serialize_verify_report(const verify_report& rep) {
    nlohmann::ordered_json j;
    j["suite"] = rep.suite;
    j["seeds"] = rep.options.seeds;
    j["n"] = rep.options.n;
    j["k"] = rep.options.k;
    if (rep.options.alpha > 0.0) j["alpha"] = rep.options.alpha;
    j["checks"] = rep.checks;
    j["pass"] = rep.pass();
    j["violations"] = nlohmann::ordered_json::array();
    for (const verify_violation& v : rep.violations) {
        nlohmann::ordered_json o;
        o["check"] = v.check;
        o["seed"] = v.seed;
        o["detail"] = v.detail;
        j["violations"].push_back(std::move(o));
    }
    return j.dump(2) + "\n";
}

} // namespace sdgkit
