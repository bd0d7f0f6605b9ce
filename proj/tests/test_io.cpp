#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include "sdgkit/generators.hpp"
#include "sdgkit/io.hpp"
#include "sdgkit/kinetic.hpp"
#include "sdgkit/stable_graph.hpp"

using namespace sdgkit;

namespace {

int count_occurrences(const std::string& text, const std::string& needle) {
    int n = 0;
    for (std::size_t at = text.find(needle); at != std::string::npos;
         at = text.find(needle, at + needle.size()))
        ++n;
    return n;
}

// Content of the <g> element with the given id.
std::string layer_group(const std::string& svg, const std::string& id) {
    std::size_t open = svg.find("id=\"" + id + "\"");
    REQUIRE(open != std::string::npos);
    std::size_t close = svg.find("</g>", open);
    REQUIRE(close != std::string::npos);
    return svg.substr(open, close - open);
}

} // namespace

TEST_CASE("documents survive a serialize and parse round trip") {
    std::vector<input_document> docs;

    input_document uniform;
    uniform.points = gen_uniform(25, 7);
    uniform.seed = 7;
    uniform.label = "uniform";
    docs.push_back(uniform);

    input_document grid;
    grid.points = gen_grid_rows(10, 3);
    grid.body = body_spec{"regular", 16, {}};
    docs.push_back(grid);

    input_document cocirc;
    cocirc.points = gen_near_cocircular(12, 11);
    cocirc.body = body_spec{"polygon", 0, {{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
    docs.push_back(cocirc);

    input_document gadget;
    gadget.points = gen_rng_gadget();
    docs.push_back(gadget);

    input_document moving;
    moving.points = gen_isolated_vertex(8, 5);
    for (std::size_t i = 0; i < moving.points.size(); ++i)
        moving.trajectories.push_back(
            {{moving.points[i].x, 0.25, -0.125}, {moving.points[i].y, -0.5}});
    moving.seed = 5;
    docs.push_back(moving);

    for (const input_document& doc : docs) {
        std::string bytes = serialize(doc);
        input_document back = parse_input(bytes);
        CHECK(back == doc);
        CHECK(serialize(back) == bytes);
    }
}

TEST_CASE("csv input parses points and reports malformed lines") {
    input_document doc = parse_input("0.5,1.25\n# comment\n\n-2,3e-1\r\n");
    REQUIRE(doc.points.size() == 2);
    CHECK(doc.points[0] == point{0.5, 1.25});
    CHECK(doc.points[1] == point{-2.0, 0.3});
    CHECK(doc.trajectories.empty());
    CHECK_FALSE(doc.body.has_value());

    CHECK_THROWS_AS(parse_input("1.0 2.0\n"), parse_error);
    CHECK_THROWS_AS(parse_input("a,2\n"), parse_error);
    CHECK_THROWS_AS(parse_input("1,2,3\n"), parse_error);
    CHECK_THROWS_AS(parse_input(""), parse_error);
    CHECK_THROWS_AS(parse_input("   \n \n"), parse_error);

    try {
        parse_input("1,2\n3,oops\n");
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 3);
    }

    CHECK_THROWS_AS(parse_input("nan,1\n"), invalid_input);
    CHECK_THROWS_AS(parse_input("1,inf\n"), invalid_input);
}

TEST_CASE("json input reports schema violations with a location") {
    CHECK_THROWS_AS(parse_input("{\"points\": [[0, 1], [1"), parse_error);
    CHECK_THROWS_AS(parse_input("{\"label\": \"no points\"}"), parse_error);
    CHECK_THROWS_AS(parse_input("{\"points\": [[0, 1, 2]]}"), parse_error);
    CHECK_THROWS_AS(parse_input("{\"points\": [[0, \"one\"]]}"), parse_error);

    try {
        parse_input("{\n  \"points\": [[0, 1], [2, 3]],\n  \"trajectories\": [{\"x\": [0], \"y\": [0]}]\n}");
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("one entry per point") != std::string::npos);
    }

    // Degree cap: five quadratic-and-up coefficients is past the cubic limit.
    CHECK_THROWS_AS(
        parse_input("{\"points\": [[0, 0]], \"trajectories\": "
                    "[{\"x\": [0, 1, 2, 3, 4, 5], \"y\": [0]}]}"),
        parse_error);

    CHECK_THROWS_AS(parse_input("{\"points\": [[0, 0]], \"body\": {\"kind\": \"oval\"}}"),
                    parse_error);
    CHECK_THROWS_AS(parse_input("{\"points\": [[0, 0]], \"body\": {\"kind\": \"regular\"}}"),
                    parse_error);
    CHECK_THROWS_AS(
        parse_input("{\"points\": [[0, 0]], \"body\": {\"kind\": \"regular\", \"k\": 2}}"),
        parse_error);

    // Out-of-range literals decode to infinity, which is data we refuse.
    CHECK_THROWS_AS(parse_input("{\"points\": [[1e999, 0]]}"), invalid_input);
}

TEST_CASE("documents translate into simulator trajectories") {
    input_document doc;
    doc.points = {{1, 2}, {3, 4}};

    std::vector<trajectory> at_rest = document_trajectories(doc, 0, 2);
    REQUIRE(at_rest.size() == 2);
    CHECK(position_at(at_rest[1], 1.7) == point{3, 4});

    doc.trajectories = {{{1, 1}, {2}}, {{3}, {4, -1, 0.5}}};
    std::vector<trajectory> moving = document_trajectories(doc, 0, 2);
    CHECK(position_at(moving[0], 0.5) == point{1.5, 2});
    CHECK(position_at(moving[1], 2.0).y == Catch::Approx(4 - 2 + 2));

    doc.trajectories = {{{1}, {2}}};
    CHECK_THROWS_AS(document_trajectories(doc, 0, 2), invalid_input);
}

TEST_CASE("renders are deterministic and draw what the reports contain") {
    input_document tri;
    tri.points = {{0, 0}, {1, 0}, {0.5, std::sqrt(3) / 2}};

    render_spec dt_only;
    dt_only.layers = {"dt"};
    render_structures st = compute_structures(tri, dt_only);
    std::string svg = render_svg(tri, st, dt_only);
    CHECK(count_occurrences(svg, "<line ") == 3);
    CHECK(count_occurrences(svg, "<circle ") == 3);
    CHECK(render_svg(tri, compute_structures(tri, dt_only), dt_only) == svg);

    input_document cloud;
    cloud.points = gen_uniform(30, 19);
    render_spec full;
    full.layers = {"vd", "dt", "sdg", "skeleton"};
    full.alpha = 0.4;
    render_structures cst = compute_structures(cloud, full);
    std::string csvg = render_svg(cloud, cst, full);

    // Solid sdg group must carry exactly the stable edges; the dotted rest
    // group the remaining Delaunay edges.
    stable_graph_report rep = sdg_euclidean(cloud.points, 0.4);
    int dt_edges = static_cast<int>(cst.dt->edges().size());
    CHECK(count_occurrences(layer_group(csvg, "sdg"), "<line ") ==
          static_cast<int>(rep.edges.size()));
    CHECK(count_occurrences(layer_group(csvg, "sdg-rest"), "<line ") ==
          dt_edges - static_cast<int>(rep.edges.size()));
    CHECK(count_occurrences(layer_group(csvg, "dt"), "<line ") == dt_edges);
    CHECK(count_occurrences(layer_group(csvg, "vd"), "<line ") == dt_edges);
    CHECK(render_svg(cloud, compute_structures(cloud, full), full) == csvg);
}

TEST_CASE("render specs are validated") {
    input_document doc;
    doc.points = {{0, 0}, {1, 0}, {0, 1}};

    render_spec empty;
    CHECK_THROWS_AS(compute_structures(doc, empty), invalid_spec);

    render_spec unknown;
    unknown.layers = {"dt", "chrome"};
    CHECK_THROWS_AS(compute_structures(doc, unknown), invalid_spec);

    render_spec bisector;
    bisector.layers = {"bisector"};
    CHECK_THROWS_AS(compute_structures(doc, bisector), invalid_spec);

    input_document pair;
    pair.points = {{0, 0}, {3, 1}};
    pair.body = body_spec{"regular", 8, {}};
    render_structures st = compute_structures(pair, bisector);
    CHECK(st.bisector.size() == 6);
    std::string svg = render_svg(pair, st, bisector);
    CHECK(count_occurrences(svg, "<polyline ") == 1);

    input_document collinear;
    collinear.points = {{0, 0}, {1, 0}, {2, 0}};
    render_spec dt_only;
    dt_only.layers = {"dt"};
    CHECK_THROWS_AS(compute_structures(collinear, dt_only), degenerate_input);
}

TEST_CASE("files are written whole and then renamed into place") {
    std::filesystem::path dir = std::filesystem::temp_directory_path() / "sdgkit_io_test";
    std::filesystem::create_directories(dir);
    std::filesystem::path target = dir / "doc.json";

    input_document doc;
    doc.points = gen_uniform(5, 2);
    write_atomic(target, serialize(doc));
    CHECK(parse_input(read_file(target)) == doc);
    CHECK_FALSE(std::filesystem::exists(dir / "doc.json.tmp"));

    write_atomic(target, "1,2\n");
    CHECK(read_file(target) == "1,2\n");
    std::filesystem::remove_all(dir);
}

TEST_CASE("report and event log serializers emit stable json") {
    std::vector<point> pts = gen_uniform(15, 4);
    stable_graph_report rep = sdg_euclidean(pts, 0.3);
    std::string bytes = serialize_report(rep);
    CHECK(bytes == serialize_report(sdg_euclidean(pts, 0.3)));

    nlohmann::json j = nlohmann::json::parse(bytes);
    CHECK(j["alpha"] == 0.3);
    CHECK(j["method"] == "euclid_exact");
    CHECK(j["edges"].size() == rep.edges.size());
    CHECK(j["s1_violations"].empty());
    CHECK(j["s2_violations"].empty());

    std::vector<trajectory> trajs = {
        static_trajectory({0, 0}, 0.2, 1.5), static_trajectory({1, 0}, 0.2, 1.5),
        static_trajectory({0, 1}, 0.2, 1.5),
        trajectory{polynomial({0.0, 1.0}), polynomial({1.0}), 0.2, 1.5}};
    event_log log = simulate(trajs, 0.2, 1.5, 0.1);
    std::string lbytes = serialize_event_log(log);
    CHECK(lbytes == serialize_event_log(simulate(trajs, 0.2, 1.5, 0.1)));

    nlohmann::json lj = nlohmann::json::parse(lbytes);
    CHECK(lj["flips"] == 1);
    CHECK(lj["events"].size() == log.events.size());
    CHECK(lj["events"][0]["kind"].is_string());
    CHECK(lj["initial_sdg"].size() == log.initial_sdg.size());
}
