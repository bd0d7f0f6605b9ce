#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "delaunay.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "kinetic.hpp"
#include "polygon_metric.hpp"
#include "stable_graph.hpp"

namespace sdgkit {

// One point's motion as raw coefficient arrays, constant term first.
struct trajectory_coeffs {
    std::vector<double> x, y;
    bool operator==(const trajectory_coeffs&) const = default;
};

// The distance body a document carries: a regular k-gon or an explicit
// convex vertex list.
struct body_spec {
    std::string kind;
    int k = 0;
    std::vector<point> vertices;
    bool operator==(const body_spec&) const = default;
};

struct input_document {
    std::vector<point> points;
    std::vector<trajectory_coeffs> trajectories;  // empty, or one per point
    std::optional<body_spec> body;
    std::optional<std::uint64_t> seed;
    std::string label;
    bool operator==(const input_document&) const = default;
};

namespace detail {

inline std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

// Best-effort location of a schema complaint: the first occurrence of the
// offending key in the source text.
[[noreturn]] inline void schema_fail(const std::string& text, const std::string& key,
                                     const std::string& message) {
    std::size_t at = text.find("\"" + key + "\"");
    auto [line, col] = line_column(text, at == std::string::npos ? 0 : at);
    throw parse_error(message, line, col);
}

inline double finite_number(const nlohmann::json& v, const std::string& text,
                            const std::string& key) {
    if (!v.is_number()) schema_fail(text, key, key + " entries must be numbers");
    double d = v.get<double>();
    if (!std::isfinite(d)) throw invalid_input(key + " contains a non-finite number");
    return d;
}

inline point point_pair(const nlohmann::json& v, const std::string& text, const std::string& key) {
    if (!v.is_array() || v.size() != 2) schema_fail(text, key, key + " entries must be [x, y] pairs");
    return {finite_number(v[0], text, key), finite_number(v[1], text, key)};
}

inline std::vector<double> coeff_array(const nlohmann::json& v, const std::string& text) {
    if (!v.is_array() || v.empty())
        schema_fail(text, "trajectories", "trajectory coefficient lists must be nonempty arrays");
    if (static_cast<int>(v.size()) > max_motion_degree + 1)
        schema_fail(text, "trajectories",
                    "trajectory degree exceeds the cap of " + std::to_string(max_motion_degree));
    std::vector<double> out;
    for (const auto& c : v) out.push_back(finite_number(c, text, "trajectories"));
    return out;
}

inline input_document parse_json_document(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
        throw parse_error(e.what(), line, col);
    } catch (const nlohmann::json::out_of_range& e) {
        // Overflowing literals would decode to infinity; refuse them as data.
        throw invalid_input(e.what());
    }
    if (!j.is_object()) schema_fail(text, "points", "document root must be a JSON object");
    if (!j.contains("points")) schema_fail(text, "points", "document needs a points array");
    if (!j["points"].is_array()) schema_fail(text, "points", "points must be an array");

    input_document doc;
    for (const auto& v : j["points"]) doc.points.push_back(point_pair(v, text, "points"));

    if (j.contains("trajectories")) {
        const auto& trs = j["trajectories"];
        if (!trs.is_array() || trs.size() != doc.points.size())
            schema_fail(text, "trajectories", "trajectories must list one entry per point");
        for (const auto& tr : trs) {
            if (!tr.is_object() || !tr.contains("x") || !tr.contains("y"))
                schema_fail(text, "trajectories", "each trajectory needs x and y coefficient arrays");
            doc.trajectories.push_back({coeff_array(tr["x"], text), coeff_array(tr["y"], text)});
        }
    }

    if (j.contains("body")) {
        const auto& b = j["body"];
        if (!b.is_object() || !b.contains("kind") || !b["kind"].is_string())
            schema_fail(text, "body", "body needs a kind string");
        body_spec body;
        body.kind = b["kind"].get<std::string>();
        if (body.kind == "regular") {
            if (!b.contains("k") || !b["k"].is_number_integer())
                schema_fail(text, "body", "regular body needs an integer k");
            body.k = b["k"].get<int>();
            if (body.k < 3) schema_fail(text, "body", "regular body needs k >= 3");
        } else if (body.kind == "polygon") {
            if (!b.contains("vertices") || !b["vertices"].is_array() || b["vertices"].size() < 3)
                schema_fail(text, "body", "polygon body needs at least 3 vertices");
            for (const auto& v : b["vertices"]) body.vertices.push_back(point_pair(v, text, "body"));
        } else {
            schema_fail(text, "body", "body kind must be regular or polygon");
        }
        doc.body = std::move(body);
    }

    if (j.contains("metadata")) {
        const auto& m = j["metadata"];
        if (!m.is_object()) schema_fail(text, "metadata", "metadata must be an object");
        if (m.contains("seed")) {
            if (!m["seed"].is_number_unsigned())
                schema_fail(text, "metadata", "seed must be a nonnegative integer");
            doc.seed = m["seed"].get<std::uint64_t>();
        }
        if (m.contains("label")) {
            if (!m["label"].is_string()) schema_fail(text, "metadata", "label must be a string");
            doc.label = m["label"].get<std::string>();
        }
    }
    return doc;
}

inline input_document parse_csv_document(const std::string& text) {
    input_document doc;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#') continue;

        std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw parse_error("expected 'x,y'", line_no, static_cast<int>(line.size()) + 1);
        char* end = nullptr;
        double x = std::strtod(line.c_str(), &end);
        if (end == line.c_str() || end != line.c_str() + comma)
            throw parse_error("bad x coordinate", line_no, 1);
        const char* ystart = line.c_str() + comma + 1;
        double y = std::strtod(ystart, &end);
        if (end == ystart) throw parse_error("bad y coordinate", line_no, static_cast<int>(comma) + 2);
        while (*end == ' ' || *end == '\t') ++end;
        if (*end != '\0')
            throw parse_error("trailing characters after 'x,y'", line_no,
                              static_cast<int>(end - line.c_str()) + 1);
        if (!std::isfinite(x) || !std::isfinite(y))
            throw invalid_input("coordinates must be finite on line " + std::to_string(line_no));
        doc.points.push_back({x, y});
    }
    if (doc.points.empty()) throw parse_error("no points found", 1, 1);
    return doc;
}

} // namespace detail

// Reads a point-set document from JSON (full schema) or CSV (points only).
inline input_document parse_input(const std::string& bytes) {
    std::size_t first = bytes.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw parse_error("empty input", 1, 1);
    if (bytes[first] == '{') return detail::parse_json_document(bytes);
    return detail::parse_csv_document(bytes);
}

inline std::string serialize(const input_document& doc) {
    nlohmann::ordered_json j;
    j["points"] = nlohmann::ordered_json::array();
    for (point p : doc.points) j["points"].push_back({p.x, p.y});
    if (!doc.trajectories.empty()) {
        j["trajectories"] = nlohmann::ordered_json::array();
        for (const trajectory_coeffs& tr : doc.trajectories)
            j["trajectories"].push_back({{"x", tr.x}, {"y", tr.y}});
    }
    if (doc.body) {
        nlohmann::ordered_json b;
        b["kind"] = doc.body->kind;
        if (doc.body->kind == "regular") b["k"] = doc.body->k;
        if (doc.body->kind == "polygon") {
            b["vertices"] = nlohmann::ordered_json::array();
            for (point v : doc.body->vertices) b["vertices"].push_back({v.x, v.y});
        }
        j["body"] = std::move(b);
    }
    if (doc.seed || !doc.label.empty()) {
        nlohmann::ordered_json m;
        if (doc.seed) m["seed"] = *doc.seed;
        if (!doc.label.empty()) m["label"] = doc.label;
        j["metadata"] = std::move(m);
    }
    return j.dump(2) + "\n";
}

// Motions for the kinetic simulator: declared coefficients when the document
// carries them, points at rest otherwise.
inline std::vector<trajectory> document_trajectories(const input_document& doc, double t0,
                                                     double t1) {
    if (!doc.trajectories.empty() && doc.trajectories.size() != doc.points.size())
        throw invalid_input("document lists " + std::to_string(doc.trajectories.size()) +
                            " trajectories for " + std::to_string(doc.points.size()) + " points");
    std::vector<trajectory> out;
    out.reserve(doc.points.size());
    for (std::size_t i = 0; i < doc.points.size(); ++i) {
        if (doc.trajectories.empty()) {
            out.push_back(static_trajectory(doc.points[i], t0, t1));
        } else {
            trajectory tr{polynomial(doc.trajectories[i].x), polynomial(doc.trajectories[i].y), t0,
                          t1};
            validate_trajectory(tr);
            out.push_back(std::move(tr));
        }
    }
    return out;
}

struct render_spec {
    std::vector<std::string> layers;  // subset of {dt, vd, sdg, bisector, skeleton}
    double alpha = pi / 8;            // stability threshold for the sdg layer
    double beta = 2.0;                // skeleton parameter
    int width = 640, height = 640;
    double margin = 0.05;             // padding as a fraction of the data extent
};

// Everything the renderer draws, computed once so callers can cross-check
// the rendered geometry against the underlying reports.
struct render_structures {
    std::optional<triangulation> dt;
    std::optional<stable_graph_report> sdg;
    std::vector<std::pair<int, int>> skeleton;
    std::vector<bisector_breakpoint> bisector;
};

namespace detail {

inline bool has_layer(const render_spec& spec, const std::string& name) {
    return std::find(spec.layers.begin(), spec.layers.end(), name) != spec.layers.end();
}

inline void validate_spec(const render_spec& spec) {
    if (spec.layers.empty()) throw invalid_spec("render spec needs at least one layer");
    for (const std::string& layer : spec.layers)
        if (layer != "dt" && layer != "vd" && layer != "sdg" && layer != "bisector" &&
            layer != "skeleton")
            throw invalid_spec("unknown layer " + layer);
    if (spec.width < 16 || spec.height < 16) throw invalid_spec("viewport too small");
}

} // namespace detail

inline render_structures compute_structures(const input_document& doc, const render_spec& spec) {
    detail::validate_spec(spec);
    render_structures st;
    if (detail::has_layer(spec, "dt") || detail::has_layer(spec, "vd"))
        st.dt = build_delaunay(doc.points);
    if (detail::has_layer(spec, "sdg")) {
        st.sdg = sdg_euclidean(doc.points, spec.alpha);
        if (!st.dt) st.dt = build_delaunay(doc.points);
    }
    if (detail::has_layer(spec, "skeleton")) st.skeleton = beta_skeleton(doc.points, spec.beta);
    if (detail::has_layer(spec, "bisector")) {
        if (doc.points.size() != 2)
            throw invalid_spec("bisector layer needs exactly two points");
        int k = 8;
        if (doc.body) {
            if (doc.body->kind != "regular")
                throw invalid_spec("bisector layer needs a regular body");
            k = doc.body->k;
        }
        st.bisector = bisector_diamond(doc.points[0], doc.points[1], regular_kgon(k)).breakpoints;
    }
    return st;
}

namespace detail {

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

class svg_canvas {
public:
    svg_canvas(const std::vector<point>& pts, const render_spec& spec)
        : w_(spec.width), h_(spec.height) {
        double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
        for (point p : pts) {
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
            ymin = std::min(ymin, p.y);
            ymax = std::max(ymax, p.y);
        }
        double extent = std::max({xmax - xmin, ymax - ymin, 1e-9});
        double pad = spec.margin * extent;
        scale_ = std::min(w_, h_) / (extent + 2 * pad);
        x0_ = 0.5 * (xmin + xmax) - 0.5 * w_ / scale_;
        y0_ = 0.5 * (ymin + ymax) - 0.5 * h_ / scale_;
    }

    std::string sx(point p) const { return fixed6((p.x - x0_) * scale_); }
    std::string sy(point p) const { return fixed6(static_cast<double>(h_) - (p.y - y0_) * scale_); }
    double world_span() const { return std::max(w_, h_) / scale_; }

    void line(std::string& out, point a, point b) const {
        out += "    <line x1=\"" + sx(a) + "\" y1=\"" + sy(a) + "\" x2=\"" + sx(b) + "\" y2=\"" +
               sy(b) + "\"/>\n";
    }

private:
    int w_, h_;
    double scale_, x0_, y0_;
};

} // namespace detail

// Deterministic SVG: fixed 6-decimal coordinates, layers in a fixed order,
// edges sorted by index. Stable edges of the sdg layer are solid; the other
// Delaunay edges are dotted.
inline std::string render_svg(const input_document& doc, const render_structures& st,
                              const render_spec& spec) {
    detail::validate_spec(spec);
    if (doc.points.empty()) throw invalid_input("nothing to render");
    const std::vector<point>& pts = doc.points;
    detail::svg_canvas canvas(pts, spec);

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) +
           "\" height=\"" + std::to_string(spec.height) + "\" viewBox=\"0 0 " +
           std::to_string(spec.width) + " " + std::to_string(spec.height) + "\">\n";

    if (detail::has_layer(spec, "vd") && st.dt) {
        out += "  <g id=\"vd\" stroke=\"#8a8a8a\" stroke-width=\"1\" stroke-dasharray=\"2,3\" "
               "fill=\"none\">\n";
        for (auto [p, q] : st.dt->edges()) {
            voronoi_edge ve = voronoi_edge_of(*st.dt, p, q);
            point tail = ve.b ? *ve.b : ve.a + canvas.world_span() * 2.0 * *ve.ray;
            canvas.line(out, ve.a, tail);
        }
        out += "  </g>\n";
    }
    if (detail::has_layer(spec, "dt") && st.dt) {
        out += "  <g id=\"dt\" stroke=\"#b8b8b8\" stroke-width=\"1\" fill=\"none\">\n";
        for (auto [p, q] : st.dt->edges()) canvas.line(out, pts[p], pts[q]);
        out += "  </g>\n";
    }
    if (detail::has_layer(spec, "sdg") && st.sdg && st.dt) {
        out += "  <g id=\"sdg-rest\" stroke=\"#9a9a9a\" stroke-width=\"1\" "
               "stroke-dasharray=\"4,4\" fill=\"none\">\n";
        for (auto [p, q] : st.dt->edges())
            if (!st.sdg->contains(p, q)) canvas.line(out, pts[p], pts[q]);
        out += "  </g>\n";
        out += "  <g id=\"sdg\" stroke=\"#1a1a1a\" stroke-width=\"2\" fill=\"none\">\n";
        for (const sdg_edge& e : st.sdg->edges) canvas.line(out, pts[e.p], pts[e.q]);
        out += "  </g>\n";
    }
    if (detail::has_layer(spec, "skeleton")) {
        out += "  <g id=\"skeleton\" stroke=\"#2a6fb0\" stroke-width=\"2\" fill=\"none\">\n";
        for (auto [p, q] : st.skeleton) canvas.line(out, pts[p], pts[q]);
        out += "  </g>\n";
    }
    if (detail::has_layer(spec, "bisector") && !st.bisector.empty()) {
        out += "  <g id=\"bisector\" stroke=\"#b03030\" stroke-width=\"1.5\" fill=\"none\">\n";
        out += "    <polyline points=\"";
        for (std::size_t i = 0; i < st.bisector.size(); ++i) {
            if (i) out += " ";
            out += canvas.sx(st.bisector[i].center) + "," + canvas.sy(st.bisector[i].center);
        }
        out += "\"/>\n  </g>\n";
    }

    out += "  <g id=\"points\" fill=\"#000000\">\n";
    for (point p : pts)
        out += "    <circle cx=\"" + canvas.sx(p) + "\" cy=\"" + canvas.sy(p) + "\" r=\"3\"/>\n";
    out += "  </g>\n</svg>\n";
    return out;
}

// Report serializers: key order and layout are fixed so identical inputs
// produce identical bytes.
inline std::string serialize_report(const stable_graph_report& rep) {
    nlohmann::ordered_json j;
    j["alpha"] = rep.alpha;
    j["method"] = rep.method == sdg_method::euclid_exact ? "euclid_exact" : "breakpoint_proxy";
    auto edge_list = [](const std::vector<sdg_edge>& edges) {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const sdg_edge& e : edges) {
            nlohmann::ordered_json o;
            o["p"] = e.p;
            o["q"] = e.q;
            o["stability"] = e.stability;
            if (e.breakpoints >= 0) o["breakpoints"] = e.breakpoints;
            arr.push_back(std::move(o));
        }
        return arr;
    };
    j["edges"] = edge_list(rep.edges);
    j["s1_violations"] = edge_list(rep.s1_violations);
    j["s2_violations"] = edge_list(rep.s2_violations);
    return j.dump(2) + "\n";
}

inline std::string serialize_event_log(const event_log& log) {
    nlohmann::ordered_json j;
    j["t0"] = log.t0;
    j["t1"] = log.t1;
    j["alpha"] = log.alpha;
    j["hysteresis"] = log.hysteresis;
    j["flips"] = log.flips;
    j["hull_events"] = log.hull_events;
    j["sdg_enters"] = log.sdg_enters;
    j["sdg_leaves"] = log.sdg_leaves;
    j["initial_sdg"] = nlohmann::ordered_json::array();
    for (auto [p, q] : log.initial_sdg) j["initial_sdg"].push_back({p, q});
    j["events"] = nlohmann::ordered_json::array();
    for (const kinetic_event& ev : log.events) {
        nlohmann::ordered_json o;
        o["time"] = ev.time;
        switch (ev.kind) {
            case event_kind::flip: o["kind"] = "flip"; break;
            case event_kind::hull_collinearity: o["kind"] = "hull_collinearity"; break;
            case event_kind::sdg_enter: o["kind"] = "sdg_enter"; break;
            case event_kind::sdg_leave: o["kind"] = "sdg_leave"; break;
        }
        o["participants"] = ev.participants;
        o["residual"] = ev.residual;
        j["events"].push_back(std::move(o));
    }
    return j.dump(2) + "\n";
}

// Whole-file atomic write: the content lands under the final name only
// complete, via rename of a sibling temporary.
inline void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw invalid_input("cannot open " + tmp.string() + " for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw invalid_input("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input("cannot open " + path.string());
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace sdgkit
