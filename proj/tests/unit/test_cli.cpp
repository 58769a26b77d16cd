#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "latkpp/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using latkpp::cli::run;

namespace {

fs::path scratch(const std::string& name) {
    const char* env = std::getenv("LATKPP_TEST_TMP");
    const fs::path root = env ? fs::path(env) : fs::temp_directory_path() / "latkpp_cli_tests";
    const auto p = root / name;
    fs::remove_all(p);
    return p;
}

struct Result {
    int code;
    std::string out, err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

json read_json(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE(f.good());
    return json::parse(f);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("dispersion run writes config and summary") {
    const auto dir = scratch("dispersion");
    const auto r = call({"--output-dir", dir.string(), "dispersion", "--fprime0", "1"});
    CHECK(r.code == latkpp::cli::kExitOk);
    const auto s = read_json(dir / "summary.json");
    CHECK(std::abs(s["c_star"].get<double>() - 2.0734) < 5e-5);
    CHECK(std::abs(s["lambda_star"].get<double>() - 0.9071) < 5e-5);
    CHECK(s["version"] == latkpp::cli::kVersion);
    CHECK(s["pass"] == true);
    CHECK(s["config"]["parameters"]["fprime0"] == 1.0);
    CHECK(s["config"]["parameters"]["tol"] == 1e-12);
    CHECK(call({"--output-dir", (dir / "b").string(), "bramson", "--T", "1"}).code != 0);
    const auto b = read_json(dir / "b" / "config.json");
    CHECK(b["parameters"]["levels"] == json::array({0.1, 0.5, 0.9}));
    CHECK(fs::exists(dir / "config.json"));
    CHECK(json::parse(r.out)["c_star"] == s["c_star"]);
}

TEST_CASE("usage errors exit with status 2") {
    CHECK(call({}).code == latkpp::cli::kExitUsage);
    CHECK(call({"no-such-command"}).code == latkpp::cli::kExitUsage);
    CHECK(call({"dispersion", "--bogus", "1"}).code == latkpp::cli::kExitUsage);
    CHECK(call({"dispersion", "--fprime0", "abc"}).code == latkpp::cli::kExitUsage);
    const auto dir = scratch("usage");
    CHECK(call({"--output-dir", dir.string(), "dispersion", "--fprime0", "-1"}).code == latkpp::cli::kExitUsage);
    CHECK(call({"--output-dir", dir.string(), "continuum", "--bramson", "--heat-ratio"}).code ==
          latkpp::cli::kExitUsage);
    CHECK(call({"--output-dir", dir.string(), "bramson", "--levels", "0.5,1.5"}).code == latkpp::cli::kExitUsage);
    CHECK(call({"--output-dir", dir.string(), "front"}).code == latkpp::cli::kExitUsage);
    CHECK(call({"--output-dir", dir.string(), "barrier-check", "--params", (dir / "missing.json").string()}).code ==
          latkpp::cli::kExitUsage);
}

TEST_CASE("version and help") {
    const auto v = call({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find(latkpp::cli::kVersion) != std::string::npos);
    const auto h = call({"--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("green-verify") != std::string::npos);
}

TEST_CASE("config file drives a run") {
    const auto dir = scratch("config");
    fs::create_directories(dir);
    const auto cfg = dir / "run.json";
    std::ofstream(cfg) << json{{"subcommand", "dispersion"},
                               {"seed", 9},
                               {"output_dir", (dir / "out").string()},
                               {"parameters", {{"fprime0", 2.0}}}}
                              .dump();
    const auto r = call({"--config", cfg.string()});
    CHECK(r.code == 0);
    const auto s = read_json(dir / "out" / "summary.json");
    CHECK(s["fprime0"] == 2.0);
    CHECK(s["seed"] == 9);
    std::ofstream(dir / "bad.json") << "{\"parameters\": {}}";
    CHECK(call({"--config", (dir / "bad.json").string()}).code == latkpp::cli::kExitUsage);
}

TEST_CASE("an echoed config.json replays to the same summary") {
    const auto a = scratch("replay_a"), b = scratch("replay_b");
    REQUIRE(call({"--seed", "4", "--output-dir", a.string(), "odd-data", "--t", "100"}).code != latkpp::cli::kExitUsage);
    const auto r = call({"--config", (a / "config.json").string(), "--output-dir", b.string()});
    CHECK(r.code != latkpp::cli::kExitUsage);
    auto sa = read_json(a / "summary.json"), sb = read_json(b / "summary.json");
    CHECK(sb["seed"] == 4);
    sa["config"].erase("output_dir");
    sb["config"].erase("output_dir");
    CHECK(sa == sb);
}

TEST_CASE("green-verify reproduces the remainder slope") {
    const auto dir = scratch("green");
    const auto r = call({"--output-dir", dir.string(), "green-verify", "--fprime0", "1", "--L", "1000", "--dt", "0.01",
                         "--tmax", "400", "--stride", "100"});
    const auto s = read_json(dir / "summary.json");
    CHECK(s["slope"].get<double>() >= -1.55);
    CHECK(s["slope"].get<double>() <= -1.45);
    CHECK(s["mass_error_max"].get<double>() <= 1e-8);
    CHECK(s.contains("intercept"));
    CHECK(s.contains("r2"));
    CHECK(s.contains("positivity_min"));
    CHECK((r.code == 0) == s["pass"].get<bool>());
    CHECK(fs::exists(dir / "green_t10.csv"));
    CHECK(fs::exists(dir / "green_t400.csv"));
    CHECK(slurp(dir / "p_tilde.csv").rfind("xi,P_tilde,P\n", 0) == 0);
    CHECK(slurp(dir / "green_t40.csv").rfind("t,j,G,H,R\n", 0) == 0);
}

TEST_CASE("front runs are byte-identical across repeats") {
    const auto a = scratch("front_a"), b = scratch("front_b");
    const std::vector<std::string> rest{"front", "--collapse", "--L", "600", "--t1", "100", "--t2", "200"};
    auto args_a = rest, args_b = rest;
    args_a.insert(args_a.begin(), {"--seed", "3", "--output-dir", a.string()});
    args_b.insert(args_b.begin(), {"--seed", "3", "--output-dir", b.string()});
    const auto ra = call(args_a), rb = call(args_b);
    CHECK(ra.code == rb.code);
    for (const auto* f : {"profile_t100.csv", "profile_t200.csv"}) {
        REQUIRE(fs::exists(a / f));
        CHECK(slurp(a / f) == slurp(b / f));
    }
    auto sa = read_json(a / "summary.json"), sb = read_json(b / "summary.json");
    sa["config"].erase("output_dir");
    sb["config"].erase("output_dir");
    CHECK(sa == sb);
}

TEST_CASE("bramson writes traces and fits; too few samples is a numeric failure") {
    const auto dir = scratch("bramson");
    const auto r = call({"--output-dir", dir.string(), "bramson", "--L", "700", "--T", "200", "--levels", "0.5"});
    const auto s = read_json(dir / "summary.json");
    REQUIRE(s["fits"].size() == 1);
    CHECK(s["fits"][0].contains("a_hat"));
    CHECK(s["fits"][0]["bramson_coeff_theory"].get<double>() == doctest::Approx(1.6536).epsilon(1e-4));
    CHECK((r.code == 0) == s["pass"].get<bool>());
    CHECK(slurp(dir / "trace.csv").rfind("m,t,j_m,x_m\n", 0) == 0);

    const auto bad = scratch("bramson_bad");
    const auto rb = call({"--output-dir", bad.string(), "bramson", "--L", "1200", "--T", "400", "--t-min", "390"});
    CHECK(rb.code == latkpp::cli::kExitFailed);
    CHECK(fs::exists(bad / "error.json"));
}

TEST_CASE("continuum heat ratio") {
    const auto dir = scratch("heat");
    const auto r = call({"--output-dir", dir.string(), "continuum", "--heat-ratio", "--t", "1000"});
    CHECK(r.code == 0);
    const auto s = read_json(dir / "summary.json");
    CHECK(s["max_rel_dev"].get<double>() <= 0.02);
    CHECK(s["ratios"].size() == 3);
}

TEST_CASE("barrier-check reports every region") {
    const auto dir = scratch("barrier");
    const auto r = call({"--output-dir", dir.string(), "barrier-check", "--t", "300", "--params", "default"});
    const auto s = read_json(dir / "summary.json");
    CHECK(s["regions"].size() == 9);
    for (const auto& reg : s["regions"]) {
        CHECK(reg.contains("region"));
        CHECK(reg.contains("min_residual"));
        CHECK(reg.contains("max_residual"));
        CHECK(reg.contains("pass"));
    }
    CHECK((r.code == 0) == s["pass"].get<bool>());
    CHECK(s["params"]["delta"] == 0.05);
}
