#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

#include "sdgkit/generators.hpp"
#include "sdgkit/io.hpp"

using namespace sdgkit;
namespace fs = std::filesystem;

namespace {

struct run_result {
    int status;
    std::string out, err;
};

fs::path scratch_dir() {
    fs::path dir = fs::temp_directory_path() / "sdgkit_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>{});
}

// Shell invocation so redirections and pipes behave as they would for a user.
run_result run_shell(const std::string& command) {
    fs::path dir = scratch_dir();
    fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
    int rc = std::system((command + " >" + out.string() + " 2>" + err.string()).c_str());
    int status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    return {status, slurp(out), slurp(err)};
}

run_result run_cli(const std::string& args) { return run_shell(std::string(SDGKIT_CLI_PATH) + " " + args); }

} // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(run_cli("sdg --bogus-flag 1").status == 2);
    CHECK(run_cli("").status == 2);
    CHECK(run_cli("gen --kind mystery").status == 2);
    CHECK(run_cli("verify --suite lemmas --seeds").status == 2);

    run_result help = run_cli("--help");
    CHECK(help.status == 0);
    CHECK(help.out.find("sdg") != std::string::npos);
    CHECK(help.out.find("kinetic") != std::string::npos);
}

TEST_CASE("generated documents pipe into the graph extractor") {
    std::string cli(SDGKIT_CLI_PATH);
    run_result piped =
        run_shell(cli + " gen --kind uniform --n 20 --seed 11 | " + cli + " sdg --alpha 0.4");
    REQUIRE(piped.status == 0);
    nlohmann::json j = nlohmann::json::parse(piped.out);
    CHECK(j["alpha"] == 0.4);
    CHECK(j["method"] == "euclid_exact");
    CHECK(j["edges"].size() > 0);

    // Same computation against the library directly.
    input_document doc;
    doc.points = gen_uniform(20, 11);
    stable_graph_report rep = sdg_euclidean(doc.points, 0.4);
    CHECK(j["edges"].size() == rep.edges.size());
}

TEST_CASE("identical seeds give byte-identical runs") {
    for (std::string kind : {"uniform", "grid", "near-cocircular", "isolated-vertex"}) {
        run_result a = run_cli("gen --kind " + kind + " --n 24 --seed 6");
        run_result b = run_cli("gen --kind " + kind + " --n 24 --seed 6");
        REQUIRE(a.status == 0);
        CHECK(a.out == b.out);
    }
    run_result odd = run_cli("gen --kind grid --n 7");
    CHECK(odd.status == 1);
    CHECK(odd.err.find("InvalidInput") != std::string::npos);
}

TEST_CASE("documents round trip through files and stdout") {
    fs::path dir = scratch_dir();
    fs::path doc_path = dir / "doc.json";
    REQUIRE(run_cli("gen --kind near-cocircular --n 30 --seed 4 --out " + doc_path.string())
                .status == 0);
    CHECK_FALSE(fs::exists(doc_path.string() + ".tmp"));

    input_document doc = parse_input(slurp(doc_path));
    CHECK(doc.points.size() == 30);
    CHECK(doc.label == "near-cocircular");
    CHECK(parse_input(serialize(doc)) == doc);

    run_result rep = run_cli("sdg --input " + doc_path.string() + " --method proxy --k 16");
    REQUIRE(rep.status == 0);
    CHECK(nlohmann::json::parse(rep.out)["method"] == "breakpoint_proxy");
}

TEST_CASE("plotting collinear points surfaces the degeneracy") {
    fs::path dir = scratch_dir();
    fs::path csv = dir / "collinear.csv";
    std::ofstream(csv) << "0,0\n1,0\n2,0\n";
    run_result r = run_cli("plot --input " + csv.string() + " --layers dt --out " +
                           (dir / "fig.svg").string());
    CHECK(r.status == 1);
    CHECK(r.err.find("DegenerateInput") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "fig.svg"));
}

TEST_CASE("plots are deterministic svg") {
    fs::path dir = scratch_dir();
    fs::path doc_path = dir / "cloud.json";
    REQUIRE(run_cli("gen --kind uniform --n 25 --seed 8 --out " + doc_path.string()).status == 0);
    run_result a = run_cli("plot --input " + doc_path.string() + " --layers dt,vd,sdg");
    run_result b = run_cli("plot --input " + doc_path.string() + " --layers dt,vd,sdg");
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.find("<svg") == 0);
    CHECK(a.out.find("id=\"sdg\"") != std::string::npos);

    run_result bad = run_cli("plot --input " + doc_path.string() + " --layers dt,chrome");
    CHECK(bad.status == 1);
    CHECK(bad.err.find("InvalidSpec") != std::string::npos);
}

TEST_CASE("kinetic runs write event logs") {
    fs::path dir = scratch_dir();
    fs::path doc_path = dir / "motion.json";
    input_document doc;
    doc.points = {{0, 0}, {1, 0}, {0, 1}, {0.2, 1}};
    doc.trajectories = {{{0}, {0}}, {{1}, {0}}, {{0}, {1}}, {{0.2, 1}, {1}}};
    write_atomic(doc_path, serialize(doc));

    fs::path log_path = dir / "log.json";
    run_result r = run_cli("kinetic --input " + doc_path.string() +
                           " --t0 0 --t1 1.5 --alpha 0.1 --out " + log_path.string());
    REQUIRE(r.status == 0);
    nlohmann::json j = nlohmann::json::parse(slurp(log_path));
    CHECK(j["flips"] == 1);
    CHECK(j["t1"] == 1.5);
    CHECK(j["events"].size() >= 1);
}

TEST_CASE("verification runs report through exit codes") {
    run_result ok = run_cli("verify --suite poly-stable --seeds 2 --n 25 --k 16");
    REQUIRE(ok.status == 0);
    nlohmann::json j = nlohmann::json::parse(ok.out);
    CHECK(j["pass"] == true);
    CHECK(j["violations"].empty());
    CHECK(j["checks"] > 0);
}

TEST_CASE("a config file mirrors command-line flags") {
    fs::path dir = scratch_dir();
    fs::path cfg = dir / "cfg.toml";
    std::ofstream(cfg) << "[gen]\nkind = \"uniform\"\nn = 6\nseed = 12\n";
    run_result r = run_shell(std::string(SDGKIT_CLI_PATH) + " --config " + cfg.string() + " gen");
    REQUIRE(r.status == 0);
    nlohmann::json j = nlohmann::json::parse(r.out);
    CHECK(j["points"].size() == 6);
    CHECK(j["metadata"]["seed"] == 12);
}

TEST_CASE("worker caps do not change verification output") {
    std::string base = "verify --suite properties --seeds 2 --n 20";
    run_result one = run_shell("SDGKIT_THREADS=1 " + std::string(SDGKIT_CLI_PATH) + " " + base);
    run_result four = run_shell("SDGKIT_THREADS=4 " + std::string(SDGKIT_CLI_PATH) + " " + base);
    REQUIRE(one.status == 0);
    CHECK(one.out == four.out);
}
