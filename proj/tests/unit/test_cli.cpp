#include "l0dag/cli.hpp"
#include "l0dag/io.hpp"
#include "l0dag/simulator.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace l0dag;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("l0dag_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("constants prints c1") {
    const auto r = run({"constants", "--sigma0", "1", "--lambda-min", "1", "--p", "10", "--s0", "10", "--n", "1000"});
    CHECK(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["c1"] == 96.0);
    CHECK(j["c"] == 38976.0);
}

TEST_CASE("usage errors exit 1") {
    CHECK(run({"fit"}).code == kExitUsage);
    CHECK(run({"fit"}).err.find("Usage") != std::string::npos);
    CHECK(run({}).code == kExitUsage);
    CHECK(run({"constants", "--bogus"}).code == kExitUsage);
    CHECK(run({"fit", "--data", "/nonexistent/x.csv"}).code == kExitUsage);
}

TEST_CASE("simulate, fit and represent") {
    const auto dir = scratch("sim");
    auto r = run({"simulate", "--kind", "ar1", "--p", "4", "--beta0", "0.5", "--n", "300", "--seed", "7", "--out",
                  dir.string()});
    REQUIRE(r.code == kExitOk);
    for (const char* f : {"model.json", "data.csv", "config.json", "manifest.json"}) CHECK(fs::exists(dir / f));
    const auto model = io::dag_model_from_json(io::read_json(dir / "model.json"));
    CHECK(model.edge_count() == 3);
    const auto manifest = io::read_json(dir / "manifest.json");
    CHECK(manifest["seed"] == 7);
    CHECK(manifest["version"] == L0DAG_VERSION);
    CHECK(manifest["config_hash"].get<std::string>().size() == 16);

    r = run({"fit", "--data", (dir / "data.csv").string(), "--max-parents", "2", "--out", (dir / "fit.json").string(),
             "--table-jsonl", (dir / "table.jsonl").string()});
    REQUIRE(r.code == kExitOk);
    const auto fit = io::read_json(dir / "fit.json");
    CHECK(fit["method"] == "exact");
    CHECK(fit.contains("pi_hat"));
    CHECK(fit.contains("s_hat"));
    CHECK(fs::exists(dir / "fit.json.manifest.json"));
    CHECK(fs::exists(dir / "table.jsonl"));

    r = run({"fit", "--data", (dir / "data.csv").string(), "--method", "greedy", "--restarts", "2", "--mode",
             "equalvar"});
    REQUIRE(r.code == kExitOk);
    CHECK(nlohmann::json::parse(r.out)["mode"] == "equalvar");

    std::ofstream(dir / "sigma.csv") << "1,0.5,0.25\n0.5,1,0.5\n0.25,0.5,1\n";
    r = run({"represent", "--sigma", (dir / "sigma.csv").string(), "--pi", "3,2,1"});
    REQUIRE(r.code == kExitOk);
    const auto rep = nlohmann::json::parse(r.out);
    CHECK(rep["edge_profile"]["total"] == 2);
    CHECK(rep["pi"] == std::vector<int>{3, 2, 1});
}

TEST_CASE("singular covariance exits 2") {
    const auto dir = scratch("singular");
    std::ofstream(dir / "sigma.csv") << "1,1\n1,1\n";
    const auto r = run({"represent", "--sigma", (dir / "sigma.csv").string(), "--pi", "1,2"});
    CHECK(r.code == kExitNumerical);
}

TEST_CASE("check reports the selected conditions") {
    const auto dir = scratch("check");
    std::ofstream(dir / "sigma.csv") << "1,0.5,0.25\n0.5,1,0.5\n0.25,0.5,1\n";
    const auto r = run({"check", "--sigma", (dir / "sigma.csv").string(), "--n", "500", "--conditions", "1,2,4"});
    REQUIRE(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j["conditions"].size() == 3);
    CHECK(j["conditions"][0]["condition"] == 1);
    CHECK(j["conditions"][2]["measured"] == 2.0);
    const auto t = run({"check", "--sigma", (dir / "sigma.csv").string(), "--n", "500", "--constants-from",
                        "theorem"});
    CHECK(t.code == kExitOk);
    CHECK(run({"check", "--sigma", (dir / "sigma.csv").string(), "--n", "500", "--conditions", "3"}).code ==
          kExitUsage);
}

TEST_CASE("experiment reruns are byte-identical") {
    const auto dir = scratch("exp");
    std::ofstream(dir / "rate.json") << R"({"kind": "rate", "p": 4, "s0": null, "beta0": 0.5, "n_grid": [100, 200],
        "lambda2_rule": {"type": "c_logp_over_n", "c": 2.0}, "mode": "profile", "method": "exact",
        "reps": 2, "seed": 3})";
    REQUIRE(run({"experiment", "--config", (dir / "rate.json").string(), "--out", (dir / "a").string()}).code ==
            kExitOk);
    REQUIRE(run({"experiment", "--config", (dir / "rate.json").string(), "--out", (dir / "b").string(), "--threads",
                 "2", "--gnuplot"})
                .code == kExitOk);
    CHECK(slurp(dir / "a" / "records.csv") == slurp(dir / "b" / "records.csv"));
    CHECK(fs::exists(dir / "b" / "error_vs_n.dat"));
    CHECK(fs::exists(dir / "a" / "manifest.json"));
    CHECK(io::read_json(dir / "a" / "manifest.json")["seed"] == 3);
}

}
