// Command-line front end: point-set generation, stable-graph extraction,
// randomized verification, kinetic simulation, and SVG rendering.

#include <cstdint>
#include <iostream>
#include <iterator>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <sdgkit/sdgkit.hpp>

namespace {

using namespace sdgkit;

std::string error_name(const std::exception& e) {
    if (dynamic_cast<const parse_error*>(&e)) return "ParseError";
    if (dynamic_cast<const degenerate_input*>(&e)) return "DegenerateInput";
    if (dynamic_cast<const degenerate_triangle*>(&e)) return "DegenerateTriangle";
    if (dynamic_cast<const degenerate_motion*>(&e)) return "DegenerateMotion";
    if (dynamic_cast<const general_position_violation*>(&e)) return "GeneralPositionViolation";
    if (dynamic_cast<const invalid_spec*>(&e)) return "InvalidSpec";
    if (dynamic_cast<const invalid_body*>(&e)) return "InvalidBody";
    if (dynamic_cast<const not_an_edge*>(&e)) return "NotAnEdge";
    if (dynamic_cast<const not_close*>(&e)) return "NotClose";
    if (dynamic_cast<const out_of_range*>(&e)) return "OutOfRange";
    if (dynamic_cast<const budget_exceeded*>(&e)) return "BudgetExceeded";
    if (dynamic_cast<const precondition_failed*>(&e)) return "PreconditionFailed";
    if (dynamic_cast<const internal_inconsistency*>(&e)) return "InternalInconsistency";
    if (dynamic_cast<const invalid_input*>(&e)) return "InvalidInput";
    if (dynamic_cast<const error*>(&e)) return "Error";
    return "Internal";
}

int fail(const std::exception& e) {
    nlohmann::ordered_json j;
    j["error"] = error_name(e);
    j["message"] = e.what();
    std::cerr << j.dump(2) << "\n";
    return 1;
}

// Empty path selects the standard stream, so generated documents can be
// piped straight into the other subcommands.
input_document load_input(const std::string& path) {
    if (path.empty()) {
        std::string bytes(std::istreambuf_iterator<char>(std::cin),
                          std::istreambuf_iterator<char>{});
        return parse_input(bytes);
    }
    return parse_input(read_file(path));
}

void emit(const std::string& path, const std::string& bytes) {
    if (path.empty())
        std::cout << bytes;
    else
        write_atomic(path, bytes);
}

std::vector<std::string> split_layers(const std::string& spec) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        std::size_t comma = spec.find(',', pos);
        std::string part = spec.substr(pos, comma == std::string::npos ? std::string::npos
                                                                       : comma - pos);
        if (!part.empty()) out.push_back(part);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

input_document generate(const std::string& kind, int n, std::uint64_t seed) {
    input_document doc;
    if (kind == "uniform") {
        doc.points = gen_uniform(n, seed);
    } else if (kind == "grid") {
        if (n % 2 != 0) throw invalid_input("grid takes an even total point count");
        doc.points = gen_grid_rows(n / 2, seed);
    } else if (kind == "near-cocircular") {
        doc.points = gen_near_cocircular(n, seed);
    } else if (kind == "rng-gadget") {
        doc.points = gen_rng_gadget();
    } else if (kind == "isolated-vertex") {
        if (n < 9) throw invalid_input("isolated-vertex needs at least 9 points");
        doc.points = gen_isolated_vertex(n - 1, seed);
    } else {
        throw invalid_input("unknown generator kind " + kind);
    }
    doc.seed = seed;
    doc.label = kind;
    return doc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stable Delaunay graph toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from a TOML/INI file");

    std::string input, out;

    auto* sdg_cmd = app.add_subcommand("sdg", "Extract the stable Delaunay graph");
    double sdg_alpha = 0.0;
    std::string method = "euclid";
    int sdg_k = 64;
    sdg_cmd->add_option("--input", input, "Input document (stdin when absent)");
    sdg_cmd->add_option("--alpha", sdg_alpha, "Stability threshold in (0, pi)");
    sdg_cmd->add_option("--method", method, "euclid or proxy")
        ->check(CLI::IsMember({"euclid", "proxy"}));
    sdg_cmd->add_option("--k", sdg_k, "Direction count for the proxy");
    sdg_cmd->add_option("--out", out, "Report path (stdout when absent)");

    auto* verify_cmd = app.add_subcommand("verify", "Run a randomized verification suite");
    std::string suite;
    verify_options vopt;
    verify_cmd->add_option("--suite", suite, "lemmas, theorem1, poly-stable, or properties")
        ->required()
        ->check(CLI::IsMember({"lemmas", "theorem1", "poly-stable", "properties"}));
    verify_cmd->add_option("--seeds", vopt.seeds, "Number of seeded instances");
    verify_cmd->add_option("--n", vopt.n, "Points per instance");
    verify_cmd->add_option("--k", vopt.k, "Direction count");
    verify_cmd->add_option("--alpha", vopt.alpha, "Stability threshold override");
    verify_cmd->add_option("--workers", vopt.workers, "Worker cap (SDGKIT_THREADS also caps)");
    verify_cmd->add_option("--out", out, "Report path (stdout always gets a copy)");

    auto* kinetic_cmd = app.add_subcommand("kinetic", "Simulate moving points");
    double t0 = 0.0, t1 = 1.0, kin_alpha = 0.0, hysteresis = 2.0;
    kinetic_cmd->add_option("--input", input, "Input document with trajectories")->required();
    kinetic_cmd->add_option("--t0", t0, "Window start")->required();
    kinetic_cmd->add_option("--t1", t1, "Window end")->required();
    kinetic_cmd->add_option("--alpha", kin_alpha, "Stability threshold")->required();
    kinetic_cmd->add_option("--hysteresis", hysteresis, "Enter/leave threshold ratio");
    kinetic_cmd->add_option("--out", out, "Event log path (stdout when absent)");

    auto* plot_cmd = app.add_subcommand("plot", "Render structures as SVG");
    std::string layers;
    render_spec rspec;
    plot_cmd->add_option("--input", input, "Input document")->required();
    plot_cmd->add_option("--layers", layers, "Comma-separated: dt,vd,sdg,bisector,skeleton")
        ->required();
    plot_cmd->add_option("--alpha", rspec.alpha, "Stability threshold for the sdg layer");
    plot_cmd->add_option("--beta", rspec.beta, "Skeleton parameter");
    plot_cmd->add_option("--width", rspec.width, "Canvas width in pixels");
    plot_cmd->add_option("--height", rspec.height, "Canvas height in pixels");
    plot_cmd->add_option("--out", out, "SVG path (stdout when absent)");

    auto* gen_cmd = app.add_subcommand("gen", "Generate a point-set document");
    std::string kind;
    int gen_n = 50;
    std::uint64_t seed = 1;
    gen_cmd->add_option("--kind", kind, "uniform, grid, near-cocircular, rng-gadget, or isolated-vertex")
        ->required()
        ->check(CLI::IsMember({"uniform", "grid", "near-cocircular", "rng-gadget", "isolated-vertex"}));
    gen_cmd->add_option("--n", gen_n, "Total point count");
    gen_cmd->add_option("--seed", seed, "Generator seed");
    gen_cmd->add_option("--out", out, "Document path (stdout when absent)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return 2;
    }

    try {
        if (*gen_cmd) {
            emit(out, serialize(generate(kind, gen_n, seed)));
            return 0;
        }
        if (*sdg_cmd) {
            input_document doc = load_input(input);
            stable_graph_report rep = method == "proxy" ? sdg_proxy(doc.points, sdg_k)
                                                        : sdg_euclidean(doc.points, sdg_alpha);
            emit(out, serialize_report(rep));
            return 0;
        }
        if (*verify_cmd) {
            verify_report rep = run_verify_suite(suite, vopt);
            std::string bytes = serialize_verify_report(rep);
            std::cout << bytes;
            if (!out.empty()) write_atomic(out, bytes);
            return rep.pass() ? 0 : 1;
        }
        if (*kinetic_cmd) {
            input_document doc = load_input(input);
            std::vector<trajectory> trajs = document_trajectories(doc, t0, t1);
            event_log log = simulate(trajs, t0, t1, kin_alpha, hysteresis);
            emit(out, serialize_event_log(log));
            return 0;
        }
        if (*plot_cmd) {
            input_document doc = load_input(input);
            rspec.layers = split_layers(layers);
            render_structures st = compute_structures(doc, rspec);
            emit(out, render_svg(doc, st, rspec));
            return 0;
        }
    } catch (const std::exception& e) {
        return fail(e);
    }
    return 2;
}
