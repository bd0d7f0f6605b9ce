#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "sdgkit/delaunay.hpp"
#include "sdgkit/generators.hpp"
#include "sdgkit/polygon_metric.hpp"
#include "sdgkit/stable_graph.hpp"

using namespace sdgkit;

namespace {

std::set<std::pair<int, int>> edge_set(const stable_graph_report& rep) {
    std::set<std::pair<int, int>> out;
    for (const sdg_edge& e : rep.edges) out.insert({e.p, e.q});
    return out;
}

stable_graph_report full_delaunay_report(const std::vector<point>& pts) {
    triangulation dt = build_delaunay(pts);
    stable_graph_report rep;
    rep.alpha = 1e-12;
    rep.method = sdg_method::euclid_exact;
    for (auto [p, q] : dt.edges()) rep.edges.push_back({p, q, stability_angle(dt, p, q), -1});
    return rep;
}

const std::vector<point> near_square{{0, 0}, {1, 0}, {1 + 1e-6, 1}, {0, 1}};

} // namespace

TEST_CASE("equilateral triangle keeps all three edges at pi/2") {
    std::vector<point> pts{{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}};
    stable_graph_report rep = sdg_euclidean(pts, pi / 2);
    REQUIRE(rep.edges.size() == 3);
    CHECK(rep.alpha == pi / 2);
    CHECK(rep.method == sdg_method::euclid_exact);
    for (const sdg_edge& e : rep.edges) {
        CHECK(e.stability == Catch::Approx(2 * pi / 3).margin(1e-12));
        CHECK(e.breakpoints == -1);
    }
    CHECK(rep.s1_violations.empty());
    CHECK(rep.s2_violations.empty());
}

TEST_CASE("nearly cocircular square drops only its diagonal") {
    stable_graph_report rep = sdg_euclidean(near_square, 0.01);
    CHECK(rep.edges.size() == 4);
    CHECK_FALSE(rep.contains(0, 2));
    CHECK_FALSE(rep.contains(1, 3));
    for (const sdg_edge& e : rep.edges) CHECK(e.stability >= 0.01);
}

TEST_CASE("stable graphs shrink as the threshold grows") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        std::vector<point> pts = gen_uniform(80, seed);
        std::vector<double> alphas{0.05, 0.1, 0.3, 0.7};
        std::vector<std::set<std::pair<int, int>>> layers;
        for (double a : alphas) layers.push_back(edge_set(sdg_euclidean(pts, a)));
        for (std::size_t i = 1; i < layers.size(); ++i)
            for (auto pq : layers[i]) CHECK(layers[i - 1].count(pq) == 1);
    }
}

TEST_CASE("threshold outside (0, pi) is rejected") {
    std::vector<point> pts{{0, 0}, {1, 0}, {0.5, 1}};
    CHECK_THROWS_AS(sdg_euclidean(pts, 0.0), invalid_input);
    CHECK_THROWS_AS(sdg_euclidean(pts, pi), invalid_input);
    CHECK_THROWS_AS(sdg_euclidean(pts, -0.3), invalid_input);
}

TEST_CASE("two points are proxy neighbors in 14 of 16 directions") {
    stable_graph_report rep = sdg_proxy({{0, 0}, {3, 1}}, 16);
    REQUIRE(rep.edges.size() == 1);
    CHECK(rep.edges[0].p == 0);
    CHECK(rep.edges[0].q == 1);
    CHECK(rep.edges[0].breakpoints == 14);
    CHECK(rep.edges[0].stability == pi);
    CHECK(rep.alpha == Catch::Approx(2 * pi / 16));
    CHECK(rep.method == sdg_method::breakpoint_proxy);
}

TEST_CASE("proxy rejects odd or tiny direction counts") {
    std::vector<point> pts{{0, 0}, {1, 0}, {0.5, 1}};
    CHECK_THROWS_AS(sdg_proxy(pts, 7), invalid_input);
    CHECK_THROWS_AS(sdg_proxy(pts, 6), invalid_input);
    CHECK_THROWS_AS(sdg_proxy(pts, 15), invalid_input);
}

TEST_CASE("proxy edges are stable and stable edges are proxied") {
    const int k = 32;
    const double alpha = 2 * pi / k;
    for (std::uint64_t seed : {5u, 23u}) {
        std::vector<point> pts = gen_uniform(60, seed, 0.0, 10.0);
        stable_graph_report rep = sdg_proxy(pts, k);
        triangulation dt = build_delaunay(pts);
        for (const sdg_edge& e : rep.edges) {
            REQUIRE(dt.has_edge(e.p, e.q));
            CHECK(e.stability >= alpha - 1e-9);
            CHECK(e.breakpoints >= 11);
        }
        for (auto [p, q] : dt.edges()) {
            if (stability_angle(dt, p, q) >= 8 * alpha + 1e-9) CHECK(rep.contains(p, q));
        }
    }
}

TEST_CASE("proxy is sandwiched between the exact graphs") {
    const int k = 32;
    const double alpha = 2 * pi / k;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        std::vector<point> pts = gen_uniform(40, seed, 0.0, 8.0);
        auto tight = edge_set(sdg_euclidean(pts, 8 * alpha));
        auto proxy = edge_set(sdg_proxy(pts, k));
        auto loose = edge_set(sdg_euclidean(pts, alpha));
        for (auto pq : tight) CHECK(proxy.count(pq) == 1);
        for (auto pq : proxy) CHECK(loose.count(pq) == 1);
    }
}

TEST_CASE("audit of a graph against its own threshold is clean") {
    for (std::uint64_t seed : {7u, 8u}) {
        std::vector<point> pts = gen_uniform(70, seed);
        stable_graph_report g = sdg_euclidean(pts, 0.2);
        stable_graph_report audited = verify_sdg(pts, g, 0.2, 0.2);
        CHECK(audited.s1_violations.empty());
        CHECK(audited.s2_violations.empty());

        stable_graph_report p = sdg_proxy(pts, 64);
        stable_graph_report audited_proxy = verify_sdg(pts, p, 2 * pi / 64, 8 * (2 * pi / 64));
        CHECK(audited_proxy.s1_violations.empty());
        CHECK(audited_proxy.s2_violations.empty());
    }
}

TEST_CASE("audit flags the weak diagonal of the full triangulation") {
    stable_graph_report full = full_delaunay_report(near_square);
    stable_graph_report audited = verify_sdg(near_square, full, pi / 4, pi / 4);
    REQUIRE(audited.s1_violations.size() == 1);
    CHECK(audited.s1_violations[0].stability < 1e-3);
    CHECK(audited.s2_violations.empty());
}

TEST_CASE("audit rejects a reversed threshold pair") {
    std::vector<point> pts{{0, 0}, {1, 0}, {0.5, 1}};
    stable_graph_report g = sdg_euclidean(pts, 0.5);
    CHECK_THROWS_AS(verify_sdg(pts, g, 0.5, 0.4), invalid_input);
    CHECK_THROWS_AS(verify_sdg(pts, g, 0.0, 0.4), invalid_input);
}

TEST_CASE("stability at least 4 alpha forces two corner contacts per endpoint") {
    const int k = 64;
    const double alpha = 2 * pi / k;
    std::vector<point> pts = gen_uniform(40, 99, 0.0, 8.0);
    regular_kgon gon(k);
    diamond_neighbor_table tab(pts, gon);
    triangulation dt = build_delaunay(pts);
    int strong = 0, contact_rich = 0;
    for (auto [p, q] : dt.edges()) {
        double s = stability_angle(dt, p, q);
        auto [bp, bq] = breakpoint_count(tab, p, q);
        if (s >= 4 * alpha + 1e-9) {
            ++strong;
            CHECK(bp >= 2);
            CHECK(bq >= 2);
        }
        if (bp >= 6 && bq >= 6) {
            ++contact_rich;
            CHECK(s >= alpha - 1e-9);
        }
    }
    CHECK(strong > 10);
    CHECK(contact_rich > 10);
}

TEST_CASE("two points form a skeleton edge for every beta") {
    for (double beta : {1.0, 2.0, 5.0}) {
        auto edges = beta_skeleton({{0, 0}, {3, 1}}, beta);
        REQUIRE(edges.size() == 1);
        CHECK(edges[0] == std::pair<int, int>{0, 1});
    }
}

TEST_CASE("a point inside one of the two circles blocks the skeleton edge") {
    std::vector<point> pts{{0, 0}, {2, 0}, {1, 0.9}};
    auto edges = beta_skeleton(pts, 2.0);
    std::set<std::pair<int, int>> got(edges.begin(), edges.end());
    CHECK(got.count({0, 1}) == 0);

    // beta = 1 is the diametral-circle graph: the long edge is blocked too.
    auto gabriel = beta_skeleton(pts, 1.0);
    std::set<std::pair<int, int>> gset(gabriel.begin(), gabriel.end());
    CHECK(gset == std::set<std::pair<int, int>>{{0, 2}, {1, 2}});
}

TEST_CASE("skeleton edges carry the arccos stability guarantee") {
    for (double beta : {1.2, 2.0}) {
        double floor_angle = 2 * std::acos(1.0 / beta);
        for (std::uint64_t seed : {41u, 42u}) {
            std::vector<point> pts = gen_uniform(50, seed);
            triangulation dt = build_delaunay(pts);
            stable_graph_report sdg = sdg_euclidean(pts, floor_angle);
            for (auto [p, q] : beta_skeleton(pts, beta)) {
                REQUIRE(dt.has_edge(p, q));
                CHECK(stability_angle(dt, p, q) >= floor_angle - 1e-9);
                CHECK(sdg.contains(p, q));
            }
        }
    }
}

TEST_CASE("beta below one is rejected") {
    CHECK_THROWS_AS(beta_skeleton({{0, 0}, {1, 0}}, 0.5), invalid_input);
    CHECK_THROWS_AS(beta_skeleton({{0, 0}, {0, 0}}, 2.0), invalid_input);
}

TEST_CASE("closest pair basics") {
    CHECK(closest_pair({{0, 0}, {1, 0}, {5, 5}}) == std::pair<int, int>{0, 1});
    CHECK_THROWS_AS(closest_pair({{0, 0}}), invalid_input);
    CHECK_THROWS_AS(closest_pair({{0, 0}, {1, 0}, {0, 1}}), general_position_violation);
}

TEST_CASE("closest pair matches brute force and is a strong Delaunay edge") {
    for (std::uint64_t seed : {301u, 302u, 303u}) {
        std::vector<point> pts = gen_uniform(100, seed);
        auto [a, b] = closest_pair(pts);
        for (int i = 0; i < 100; ++i)
            for (int j = i + 1; j < 100; ++j)
                CHECK(compare_distance(pts[i], pts[j], pts[a], pts[b]) != sign_t::negative);
        triangulation dt = build_delaunay(pts);
        REQUIRE(dt.has_edge(a, b));
        CHECK(stability_angle(dt, a, b) >= pi / 3 - 1e-9);
    }
}

TEST_CASE("two points are mutual relative neighbors") {
    auto edges = rng({{0, 0}, {7, -2}});
    REQUIRE(edges.size() == 1);
    CHECK(edges[0] == std::pair<int, int>{0, 1});
}

TEST_CASE("relative neighborhood edges can be arbitrarily unstable") {
    std::vector<point> pts = gen_rng_gadget();
    auto edges = rng(pts);
    std::set<std::pair<int, int>> got(edges.begin(), edges.end());
    REQUIRE(got.count({0, 1}) == 1);
    triangulation dt = build_delaunay(pts);
    REQUIRE(dt.has_edge(0, 1));
    double s = stability_angle(dt, 0, 1);
    CHECK(s > 0.01);
    CHECK(s < 0.05);
    CHECK_FALSE(sdg_euclidean(pts, 0.05).contains(0, 1));
}

TEST_CASE("relative neighborhood graph sits inside the triangulation") {
    for (std::uint64_t seed : {61u, 62u}) {
        std::vector<point> pts = gen_uniform(60, seed);
        triangulation dt = build_delaunay(pts);
        for (auto [p, q] : rng(pts)) CHECK(dt.has_edge(p, q));
    }
}

TEST_CASE("stable edge count clears the linear lower bound") {
    for (std::uint64_t seed : {501u, 502u, 503u}) {
        lower_bound_result r = lower_bound_check(gen_uniform(100, seed), pi / 32);
        CHECK(r.pass);
        CHECK(r.bound == Catch::Approx(100 * (1 - 6.0 / 32.0) - 2));
    }
}

TEST_CASE("lower bound is vacuous for large thresholds") {
    std::vector<point> pts{{0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2}};
    lower_bound_result r = lower_bound_check(pts, pi / 2);
    CHECK(r.count == 3);
    CHECK(r.bound == Catch::Approx(-8.0));
    CHECK(r.pass);
}

TEST_CASE("two wide rows pin the stable count near the column count") {
    // Per column the vertical edge subtends about 2*atan(1/5) ~ 0.39 from the
    // flanking columns (stability ~ 2.75); row edges reach ~ 1.77 and the
    // cell diagonals ~ 0, so a threshold of 2 keeps exactly the verticals.
    std::vector<point> pts = gen_grid_rows(40, 77);
    lower_bound_result r = lower_bound_check(pts, 2.0);
    CHECK(r.pass);
    CHECK(r.count >= 38);
    CHECK(r.count <= 42);
}

TEST_CASE("a stable graph can strand a vertex") {
    std::vector<point> pts = gen_isolated_vertex(16, 2718);
    stable_graph_report rep = sdg_euclidean(pts, 0.6);
    CHECK(rep.edges.size() == 16);
    for (const sdg_edge& e : rep.edges) {
        CHECK(e.p != 0);
        CHECK(e.q != 0);
    }
}
