#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bellvar/cli.hpp"
#include "bellvar/json_io.hpp"
#include "oracles.hpp"

using namespace bellvar;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
    Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string fmt(double v)
{
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

std::filesystem::path temp_file(const std::string& name, const std::string& content)
{
    const auto dir = std::filesystem::temp_directory_path() / "bellvar_cli_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::ofstream(path) << content;
    return path;
}

} // namespace

TEST_CASE("optimize on mems")
{
    const Run r = run({"optimize", "--family", "mems", "--gamma", "0.5"});
    REQUIRE(r.code == 0);
    const Json j = r.json();
    CHECK(j["b_max"].get<double>() >= 2 * std::sqrt(1.25) - 1e-6);
    CHECK(j["violated"] == true);
    CHECK(j["rng_seed"] == 0);
    CHECK(j["source"]["gamma"] == 0.5);
}

TEST_CASE("concurrence of the separable family")
{
    const Run r = run({"concurrence", "--family", "separable", "--x", "0.2"});
    REQUIRE(r.code == 0);
    CHECK(r.json()["concurrence"].get<double>() <= 1e-12);
    const Run m = run({"concurrence", "--family", "mems", "--gamma", "0.3"});
    CHECK(std::abs(m.json()["concurrence"].get<double>() - 0.3) <= 1e-12);
}

TEST_CASE("eval at the werner witness")
{
    const Run r = run({"eval", "--family", "werner", "--gamma", "0.2", "--xi", "0.7853981633974483", "--angles",
                       "1.5707963,0.1973955,-0.1973955,0"});
    REQUIRE(r.code == 0);
    CHECK(std::abs(r.json()["b_value"].get<double>() - 2 * std::sqrt(1.04)) <= 1e-9);
    CHECK(r.json()["report"]["settings"]["mode"] == "plane");
}

TEST_CASE("eval in degrees and bloch mode")
{
    const Run deg = run({"eval", "--family", "bell", "--x", "0.25", "--degrees", "--angles", "90,45,-45,0"});
    REQUIRE(deg.code == 0);
    CHECK(std::abs(deg.json()["b_value"].get<double>() - 2 * std::sqrt(2.0)) <= 1e-12);
    const Run sphere = run({"eval", "--family", "separable", "--decomposition", "bell", "--x", "0.25", "--bloch",
                            "--angles", fmt(oracle::pi / 2) + ",0," + fmt(oracle::pi / 4) + ",0," +
                                            fmt(-oracle::pi / 4) + ",0,0,0"});
    REQUIRE(sphere.code == 0);
    CHECK(std::abs(sphere.json()["b_value"].get<double>() - 2 * std::sqrt(2.0)) <= 1e-12);
}

TEST_CASE("eval reproduces the optimizer's maximum from its angles")
{
    const Run opt = run({"optimize", "--family", "werner", "--gamma", "0.4", "--xi", "0.3"});
    REQUIRE(opt.code == 0);
    const Json j = opt.json();
    const Json& s = j["optimal_settings"];
    const std::string angles = fmt(s["a"]["theta"].get<double>()) + "," + fmt(s["b"]["theta"].get<double>()) + "," +
                               fmt(s["c"]["theta"].get<double>()) + "," + fmt(s["d"]["theta"].get<double>());
    const Run ev = run({"eval", "--family", "werner", "--gamma", "0.4", "--xi", "0.3", "--angles", angles});
    REQUIRE(ev.code == 0);
    CHECK(std::abs(ev.json()["b_value"].get<double>() - j["b_max"].get<double>()) <= 1e-12);
}

TEST_CASE("eval --eq7")
{
    const Run r = run({"eval", "--family", "mems", "--gamma", "0.8", "--eq7", "--angles", "0.1,0.5,1.2,1.2"});
    REQUIRE(r.code == 0);
    CHECK(r.json()["eq7"]["experimental"] == true);
    CHECK(r.json()["eq7"]["split"] == 2);
    const Run bad = run({"eval", "--family", "mems", "--gamma", "0.8", "--eq7", "--angles", "0.1,0.5,1.2,1.3"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("d == c") != std::string::npos);
}

TEST_CASE("sample subcommand")
{
    const Run r = run({"sample", "--family", "werner", "--gamma", "0.6", "--first", "0.3", "--second", "1.1",
                       "--trials", "200000", "--seed", "5"});
    REQUIRE(r.code == 0);
    const Json j = r.json();
    CHECK(j["rng_seed"] == 5);
    CHECK(std::abs(j["analytic"].get<double>() - 0.6 * std::cos(0.8)) <= 1e-12);
    CHECK(j["deviation_in_std_errors"].get<double>() <= 5.0);
}

TEST_CASE("validate and file sources")
{
    const Run ok = run({"validate", "--family", "mems", "--gamma", "0.5"});
    CHECK(ok.code == 0);
    CHECK(ok.json()["passed"] == true);

    const auto bad = temp_file("bad.json", R"({"terms": [
        {"weight": 0.6, "amplitudes": [[1, 0], [0, 0], [0, 0], [0, 0]]},
        {"weight": 0.6, "amplitudes": [[0, 0], [0, 0], [0, 0], [1, 0]]}]})");
    const Run fail = run({"validate", "--decomp", bad.string()});
    CHECK(fail.code == 1);
    CHECK(std::abs(fail.json()["weight_sum_error"].get<double>() - 0.2) <= 1e-12);

    const Json doc = bell_decomposition(0.2);
    const auto good = temp_file("bell.json", doc.dump());
    const Run opt = run({"optimize", "--decomp", good.string()});
    REQUIRE(opt.code == 0);
    CHECK(opt.json()["b_max"].get<double>() >= std::sqrt(4 + 64 * 0.04) - 1e-6);

    const auto state = temp_file("state.json", Json{{"matrix", matrix_to_json(mems_state(0.7).matrix())}}.dump());
    const Run conc = run({"concurrence", "--state", state.string()});
    REQUIRE(conc.code == 0);
    CHECK(std::abs(conc.json()["concurrence"].get<double>() - 0.7) <= 1e-12);

    const auto nonpsd = temp_file("nonpsd.json", R"({"matrix": [[[1.5,0],[0,0],[0,0],[0,0]], [[0,0],[-0.5,0],[0,0],[0,0]],
        [[0,0],[0,0],[0,0],[0,0]], [[0,0],[0,0],[0,0],[0,0]]]})");
    CHECK(run({"concurrence", "--state", nonpsd.string()}).code == 1);
    CHECK(run({"concurrence", "--state", "/nonexistent/state.json"}).code == 1);
}

TEST_CASE("sweep subcommand")
{
    const Run csv = run({"sweep", "--family", "bell,product", "--axis", "x:-0.2:0.2:3", "--csv"});
    REQUIRE(csv.code == 0);
    std::istringstream lines(csv.out);
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) {
        ++count;
    }
    CHECK(count == 7); // header + 3 x 2

    const Run js = run({"sweep", "--family", "werner", "--axis", "gamma:0.1:0.3:2", "--fixed", "xi=0.5"});
    REQUIRE(js.code == 0);
    CHECK(js.json()["rows"].size() == 2);

    CHECK(run({"sweep", "--preset", "fig1a", "--family", "mems"}).code == 2);
    CHECK(run({"sweep", "--preset", "nope"}).code == 1);
}

TEST_CASE("usage and domain errors")
{
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"optimize"}).code == 2);                                                       // no source
    CHECK(run({"optimize", "--family", "mems"}).code == 2);                                   // no gamma
    CHECK(run({"optimize", "--family", "mems", "--gamma", "0.5", "--decomp", "x.json"}).code == 2); // two sources
    CHECK(run({"eval", "--family", "mems", "--gamma", "0.5", "--angles", "1,2,x,4"}).code == 2);
    CHECK(run({"optimize", "--family", "mems", "--gamma", "1.5"}).code == 1);
    CHECK(run({"optimize", "--family", "mems", "--gamma", "0.5", "--grid", "2"}).code == 1);
    CHECK(run({"eval", "--family", "mems", "--gamma", "0.5", "--angles", "1,2,3"}).code == 1);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("BELLVAR_JOBS sets the worker default without changing results")
{
    const Run serial = run({"optimize", "--family", "mems", "--gamma", "0.3"});
    setenv("BELLVAR_JOBS", "3", 1);
    const Run parallel = run({"optimize", "--family", "mems", "--gamma", "0.3"});
    setenv("BELLVAR_JOBS", "many", 1);
    const Run broken = run({"optimize", "--family", "mems", "--gamma", "0.3"});
    unsetenv("BELLVAR_JOBS");
    CHECK(serial.out == parallel.out);
    CHECK(broken.code == 2);
}
