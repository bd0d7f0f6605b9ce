#include <catch2/catch_amalgamated.hpp>

#include <sdgkit/neighbors.hpp>
#include <sdgkit/polygon_metric.hpp>
#include <sdgkit/random.hpp>

#include <cmath>
#include <map>
#include <set>

using namespace sdgkit;

namespace {

// Membership oracle: q is in the vertex-j placement of Q at p with scale
// lambda iff (q-p)/lambda + v_j satisfies every edge half-plane of Q.
bool in_placement(point p, point q, int j, const regular_kgon& Q, double lambda) {
    vec2 z = (1.0 / lambda) * (q - p) + Q.vertex(j);
    for (int i = 0; i < Q.k(); ++i)
        if (dot(Q.edge_normal(i), z) > Q.inradius() + 1e-13) return false;
    return true;
}

double phi_by_bisection(point p, point q, int j, const regular_kgon& Q) {
    double lo = 0.5 * norm(q - p), hi = lo;
    while (!in_placement(p, q, j, Q, hi)) hi *= 2.0;
    while (in_placement(p, q, j, Q, lo * 0.999999999999)) lo *= 0.5;
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        (in_placement(p, q, j, Q, mid) ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("regular polygon shape") {
    regular_kgon Q(8);
    CHECK(Q.inradius() == Catch::Approx(std::cos(pi / 8)));
    for (int j = 0; j < 8; ++j) {
        CHECK(norm(Q.vertex(j)) == Catch::Approx(1.0).margin(1e-15));
        // Clockwise vertex order.
        CHECK(cross(Q.vertex(j), Q.vertex((j + 1) % 8)) < 0.0);
        // u_j points from the vertex to the center.
        CHECK(norm(Q.vertex(j) + Q.u(j).unit()) < 1e-15);
    }
    CHECK(Q.vertex(0) == vec2{-1.0, 0.0});
    CHECK_THROWS_AS(regular_kgon(7), invalid_input);
    CHECK_THROWS_AS(regular_kgon(6), invalid_input);
}

TEST_CASE("polygonal distance") {
    regular_kgon Q(16, 0.31);
    point o{0, 0};

    // Unit step toward a vertex costs 1, toward an edge midpoint 1/cos(pi/k).
    CHECK(dq_distance(Q, o, point{0, 0} + Q.vertex(5)) == Catch::Approx(1.0).margin(1e-14));
    vec2 mid = normalized(Q.vertex(3) + Q.vertex(4));
    CHECK(dq_distance(Q, o, point{0, 0} + mid) ==
          Catch::Approx(1.0 / std::cos(pi / 16)).margin(1e-14));

    CHECK(dq_distance(Q, {2, 3}, {2, 3}) == 0.0);

    prng gen(31);
    for (int it = 0; it < 200; ++it) {
        point x{gen.uniform(-2.0, 2.0), gen.uniform(-2.0, 2.0)};
        point y{gen.uniform(-2.0, 2.0), gen.uniform(-2.0, 2.0)};
        if (x == y) continue;
        double d = dq_distance(Q, x, y);
        // Q is centrally symmetric and nests between the in- and circumcircle.
        CHECK(dq_distance(Q, y, x) == Catch::Approx(d).epsilon(1e-12));
        CHECK(d >= norm(y - x) * (1 - 1e-12));
        CHECK(d <= norm(y - x) / std::cos(pi / 16) * (1 + 1e-12));
        double t = gen.uniform(0.1, 3.0);
        CHECK(dq_distance(Q, x, x + t * (y - x)) == Catch::Approx(t * d).epsilon(1e-12));
        point z{gen.uniform(-2.0, 2.0), gen.uniform(-2.0, 2.0)};
        CHECK(dq_distance(Q, x, z) <= d + dq_distance(Q, y, z) + 1e-12);
    }
}

TEST_CASE("pinned placement through the opposite vertex") {
    for (int k : {8, 16, 32}) {
        regular_kgon Q(k);
        auto phi = phi_diamond({0, 0}, {2, 0}, 0, Q);
        REQUIRE(phi.has_value());
        CHECK(*phi == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("pinned placement finiteness window") {
    regular_kgon Q(8);
    double bound = pi / 2 - pi / 8;
    // Perpendicular to u_0 is outside the window.
    CHECK_FALSE(phi_diamond({0, 0}, {0, 2}, 0, Q).has_value());
    CHECK_FALSE(phi_diamond({0, 0}, {-2, 1}, 0, Q).has_value());
    // Just inside and just outside the cone boundary.
    vec2 in = direction(bound - 1e-3).unit();
    vec2 out = direction(bound + 1e-3).unit();
    CHECK(phi_diamond({0, 0}, point{0, 0} + 2.0 * in, 0, Q).has_value());
    CHECK_FALSE(phi_diamond({0, 0}, point{0, 0} + 2.0 * out, 0, Q).has_value());
    // On the boundary the segment runs parallel to an incident edge.
    vec2 on = direction(bound).unit();
    CHECK_THROWS_AS(phi_diamond({0, 0}, point{0, 0} + 2.0 * on, 0, Q),
                    general_position_violation);
    CHECK_THROWS_AS(phi_diamond({1, 1}, {1, 1}, 0, Q), invalid_input);
}

TEST_CASE("pinned placement agrees with a membership bisection oracle") {
    {
        regular_kgon Q(8, pi / 4);
        auto phi = phi_diamond({0, 0}, {2, 0}, 0, Q);
        REQUIRE(phi.has_value());
        CHECK(*phi == Catch::Approx(phi_by_bisection({0, 0}, {2, 0}, 0, Q)).epsilon(1e-9));
    }
    prng gen(77);
    for (int it = 0; it < 300; ++it) {
        regular_kgon Q(gen.below(2) ? 8 : 16, gen.uniform(0.0, 2 * pi));
        point p{gen.uniform(-1.0, 1.0), gen.uniform(-1.0, 1.0)};
        point q{gen.uniform(-1.0, 1.0), gen.uniform(-1.0, 1.0)};
        if (p == q) continue;
        int j = static_cast<int>(gen.below(static_cast<std::uint64_t>(Q.k())));
        double bound = pi / 2 - pi / Q.k();
        double theta = angle_between(direction::of(q - p), Q.u(j));
        if (std::fabs(theta - bound) < 1e-6) continue;
        auto phi = phi_diamond(p, q, j, Q);
        CHECK(phi.has_value() == (theta < bound));
        if (phi) CHECK(*phi == Catch::Approx(phi_by_bisection(p, q, j, Q)).epsilon(1e-9));
    }
}

TEST_CASE("euclidean radius never exceeds the polygonal one") {
    prng gen(123);
    regular_kgon Q(16, 0.31);
    for (int it = 0; it < 400; ++it) {
        point p{gen.uniform(-1.0, 1.0), gen.uniform(-1.0, 1.0)};
        point q{gen.uniform(-1.0, 1.0), gen.uniform(-1.0, 1.0)};
        if (p == q) continue;
        for (int j = 0; j < Q.k(); ++j) {
            double bound = pi / 2 - pi / Q.k();
            double theta = angle_between(direction::of(q - p), Q.u(j));
            if (std::fabs(theta - bound) < 1e-9) continue;
            auto dia = phi_diamond(p, q, j, Q);
            if (!dia) continue;
            auto euc = phi_euclid(p, q, Q.u(j));
            REQUIRE(euc.has_value());
            CHECK(*euc <= *dia * (1 + 1e-12));
        }
    }
}

TEST_CASE("two-point table fans") {
    regular_kgon Q(16, 0.31);
    std::vector<point> pts{{0, 0}, {3, 1}};
    diamond_neighbor_table tab(pts, Q);
    int fin0 = 0, fin1 = 0;
    for (int j = 0; j < 16; ++j) {
        if (tab.at(0, j)) {
            ++fin0;
            CHECK(tab.at(0, j)->neighbor == 1);
        }
        if (tab.at(1, j)) {
            ++fin1;
            CHECK(tab.at(1, j)->neighbor == 0);
        }
    }
    CHECK(fin0 == 7);
    CHECK(fin1 == 7);
    auto counts = breakpoint_count(tab, 0, 1);
    CHECK(counts.first == 7);
    CHECK(counts.second == 7);
    CHECK(counts.first + counts.second == 14);
}

TEST_CASE("near-axis directional choice matches the smaller placement") {
    regular_kgon Q(16, 0.31);
    std::vector<point> pts{{0, 0}, {2, 0}, {0, 2}};
    diamond_neighbor_table tab(pts, Q);
    REQUIRE(tab.at(0, 0).has_value());
    CHECK(tab.at(0, 0)->neighbor == 1);
    CHECK(*phi_diamond({0, 0}, {2, 0}, 0, Q) < *phi_diamond({0, 0}, {0, 2}, 0, Q));
}

TEST_CASE("a midpoint blocker erases every breakpoint") {
    regular_kgon Q(16, 0.31);
    std::vector<point> pts{{0, 0}, {4, 0}, {2, 0.01}};
    auto counts = breakpoint_count(pts, 0, 1, Q);
    CHECK(counts.first == 0);
    CHECK(counts.second == 0);
}

TEST_CASE("winning placements are empty of other points") {
    prng gen(2024);
    std::vector<point> pts;
    for (int i = 0; i < 24; ++i) pts.push_back({gen.uniform(0.0, 1.0), gen.uniform(0.0, 1.0)});
    regular_kgon Q(16, 0.31);
    diamond_neighbor_table tab(pts, Q);
    for (int p = 0; p < static_cast<int>(pts.size()); ++p) {
        for (int j = 0; j < tab.k(); ++j) {
            const auto& e = tab.at(p, j);
            if (!e) continue;
            point c = pts[p] + e->radius * Q.u(j).unit();
            CHECK(dq_distance(Q, c, pts[p]) == Catch::Approx(e->radius).epsilon(1e-9));
            CHECK(dq_distance(Q, c, pts[e->neighbor]) == Catch::Approx(e->radius).epsilon(1e-9));
            for (int o = 0; o < static_cast<int>(pts.size()); ++o) {
                if (o == p || o == e->neighbor) continue;
                CHECK(dq_distance(Q, c, pts[o]) > e->radius * (1 - 1e-9));
            }
        }
    }
}

TEST_CASE("direction sets per polygonal neighbor are cyclically contiguous") {
    prng gen(555);
    std::vector<point> pts;
    for (int i = 0; i < 20; ++i) pts.push_back({gen.uniform(0.0, 1.0), gen.uniform(0.0, 1.0)});
    regular_kgon Q(16, 0.31);
    diamond_neighbor_table tab(pts, Q);
    for (int p = 0; p < static_cast<int>(pts.size()); ++p) {
        std::map<int, std::set<int>> per_neighbor;
        for (int j = 0; j < tab.k(); ++j)
            if (tab.at(p, j)) per_neighbor[tab.at(p, j)->neighbor].insert(j);
        for (const auto& [q, js] : per_neighbor) {
            if (js.size() == static_cast<std::size_t>(tab.k())) continue;
            int blocks = 0;
            for (int j = 0; j < tab.k(); ++j)
                if (js.count(j) && !js.count((j + tab.k() - 1) % tab.k())) ++blocks;
            CHECK(blocks == 1);
        }
    }
}

TEST_CASE("bisector chain structure") {
    for (int k : {8, 16, 32, 64}) {
        regular_kgon Q(k, 0.31);
        point p{0.1, -0.2}, q{2.3, 1.1};
        auto chain = bisector_diamond(p, q, Q);
        REQUIRE(static_cast<int>(chain.breakpoints.size()) == k - 2);
        vec2 n = perp_ccw(normalized(q - p));
        for (std::size_t i = 0; i < chain.breakpoints.size(); ++i) {
            const auto& bp = chain.breakpoints[i];
            // Equidistance under the polygonal metric.
            double dp = dq_distance(Q, bp.center, p);
            double dq = dq_distance(Q, bp.center, q);
            CHECK(dp == Catch::Approx(dq).epsilon(1e-9));
            CHECK(bp.vertex >= 0);
            CHECK(bp.vertex < k);
            if (i > 0) {
                CHECK(bp.owner != chain.breakpoints[i - 1].owner);
                // Monotone progress orthogonal to pq: no self-intersection.
                CHECK(dot(bp.center - chain.breakpoints[i - 1].center, n) > 0.0);
            }
        }
        int at_p = 0;
        for (const auto& bp : chain.breakpoints) at_p += bp.owner == 0;
        CHECK(at_p == k / 2 - 1);
    }
}

TEST_CASE("bisector rejects chord-parallel segments") {
    regular_kgon Q(8, 0.31);
    point p{0, 0};
    point q = point{0, 0} + 3.0 * direction(0.31 + pi / 2).unit();
    CHECK_THROWS_AS(bisector_diamond(p, q, Q), general_position_violation);
    // Diagonal through two opposite vertices is also a chord.
    point q2 = point{0, 0} + 3.0 * direction(0.31 + pi / 2 + pi / 8).unit();
    CHECK_THROWS_AS(bisector_diamond(p, q2, Q), general_position_violation);
    CHECK_THROWS_AS(bisector_diamond(p, p, Q), invalid_input);
}

TEST_CASE("table rejects chord-parallel input pairs") {
    regular_kgon Q(8, 0.31);
    point a{0, 0};
    point b = point{0, 0} + 2.0 * direction(0.31 + pi / 2 + 3 * pi / 8).unit();
    CHECK_THROWS_AS(diamond_neighbor_table({a, b, {5, 5}}, Q), general_position_violation);
}
