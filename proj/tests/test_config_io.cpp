#include "doctest.h"

#include "frontlab/config.hpp"
#include "frontlab/error.hpp"
#include "frontlab/io.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

using namespace frontlab;
namespace fs = std::filesystem;

namespace {

std::string error_message(const std::function<void()>& fn, ErrorKind expected)
{
    try {
        fn();
    } catch (const Error& e) {
        CHECK(e.kind() == expected);
        return e.what();
    }
    FAIL("expected an error");
    return {};
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("frontlab_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::string> read_lines(const fs::path& p)
{
    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

Trajectory small_trajectory()
{
    Trajectory traj;
    for (int k = 0; k < 4; ++k) {
        FieldState s;
        s.t = 0.5 * k;
        s.dx = 0.1;
        s.origin = -3 + k;
        s.u.resize(6);
        for (Eigen::Index i = 0; i < 6; ++i) s.u(i) = 1.0 / (1.0 + std::exp(s.x(i) - s.t + 1e-3 * k));
        traj.snapshots.push_back(s);
    }
    traj.snapshots[2].u(5) = 4.9e-320; // subnormal survives the text round trip
    InterfaceTrack half;
    half.level = 0.5;
    InterfaceTrack low;
    low.level = 0.1;
    for (int k = 0; k < 4; ++k) {
        half.push(0.5 * k, 0.5 * k, 1, -0.3 + 0.1 * k, 0.2 + 0.1 * k);
        low.push(0.5 * k, k == 0 ? std::nan("") : 0.5 * k + 2.2, k == 0 ? 0 : 1, -0.3, 0.2);
    }
    traj.tracks = {low, half};
    traj.shifts.push_back({1.0, 1, -2});
    traj.shifts.push_back({1.5, 1, -1});
    return traj;
}

} // namespace

TEST_SUITE("config_io")
{
    TEST_CASE("parses tables, scalars and arrays")
    {
        const auto j = parse_config(R"(# scenario
name = "demo \"quoted\"\tx"
experiment = "switch"
seed = 42
flag = true

[reaction]
t1 = 0.0
t2 = 1e1

[reaction.f1]
family = 'logistic'
params = [1.0]

[solver]
dx = 0.05
levels = [
  0.1,  # low
  0.5,
  0.9,
]
big = 1_000
limit = inf
)");
        CHECK(j["name"] == "demo \"quoted\"\tx");
        CHECK(j["seed"] == 42);
        CHECK(j["flag"] == true);
        CHECK(get_number(j, "reaction.t2") == 10.0);
        CHECK(get_string(j, "reaction.f1.family") == "logistic");
        CHECK(j["solver"]["levels"].size() == 3);
        CHECK(get_number(j, "solver.big") == 1000.0);
        CHECK(std::isinf(get_number(j, "solver.limit")));
        CHECK(get_number(j, "solver.missing", 7.0) == 7.0);
        CHECK(get_bool(j, "flag", false));
        CHECK(get_bool(j, "nope", true));
    }

    TEST_CASE("dotted keys create nested tables")
    {
        const auto j = parse_config("analysis.blends = [\"linear\"]\n[solver]\nwindow.left = 40\n");
        CHECK(j["analysis"]["blends"][0] == "linear");
        CHECK(get_number(j, "solver.window.left") == 40.0);
    }

    TEST_CASE("errors carry source and line")
    {
        const auto dup = error_message([] { parse_config("a = 1\n\nb = 2\na = 3\n", "x.toml"); }, ErrorKind::Config);
        CHECK(dup.find("x.toml:4:") != std::string::npos);
        const auto table = error_message([] { parse_config("[s]\na = 1\n[s]\n", "y.toml"); }, ErrorKind::Config);
        CHECK(table.find("y.toml:3:") != std::string::npos);
        const auto bad = error_message([] { parse_config("a = 1.2.3\n", "z.toml"); }, ErrorKind::Config);
        CHECK(bad.find("z.toml:1:") != std::string::npos);
        error_message([] { parse_config("a = {b = 1}\n"); }, ErrorKind::Config);
        error_message([] { parse_config("a = [[1]]\n"); }, ErrorKind::Config);
        error_message([] { parse_config("a = \"open\n"); }, ErrorKind::Config);
        error_message([] { parse_config("a = [1, 2\n"); }, ErrorKind::Config);
    }

    TEST_CASE("path helpers")
    {
        nlohmann::json j = nlohmann::json::object();
        set_path(j, "solver.dx", 0.1);
        set_path(j, "analysis.c1", 2.5);
        CHECK(get_number(j, "solver.dx") == 0.1);
        CHECK(find_path(j, "solver.dt") == nullptr);
        const auto msg = error_message([&] { require_path(j, "solver.dt"); }, ErrorKind::Config);
        CHECK(msg.find("solver.dt") != std::string::npos);
        set_path(j, "solver.dx", 0.2);
        CHECK(get_number(j, "solver.dx") == 0.2);
        error_message([&] { get_string(j, "solver.dx"); }, ErrorKind::Config);
    }

    TEST_CASE("number formatting round-trips")
    {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> u(-1e6, 1e6);
        for (int i = 0; i < 1000; ++i) {
            const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
            CHECK(std::stod(format_double(v)) == v);
        }
        CHECK(format_double(0.1) == "0.1");
        CHECK(format_double(std::nan("")) == "nan");
    }

    TEST_CASE("track csv columns")
    {
        const auto dir = scratch_dir("track");
        write_track_csv(dir / "track.csv", small_trajectory());
        const auto lines = read_lines(dir / "track.csv");
        REQUIRE(lines.size() == 5);
        CHECK(lines[0] == "t,x_half,x_0.1,window_left,window_right");
        CHECK(lines[1].find("nan") != std::string::npos);
        const std::string expected = "0.5,0.5," + format_double(0.5 + 2.2) + "," + format_double(-0.3 + 0.1) + ","
            + format_double(0.2 + 0.1);
        CHECK(lines[2] == expected);
        fs::remove_all(dir);
    }

    TEST_CASE("snapshot text round trip and csv layout")
    {
        const auto dir = scratch_dir("snap");
        const auto traj = small_trajectory();
        write_snapshots_text(dir / "s.txt", traj, 0.0);
        const auto back = read_snapshots_text(dir / "s.txt");
        REQUIRE(back.size() == traj.snapshots.size());
        for (std::size_t k = 0; k < back.size(); ++k) {
            CHECK(back[k].t == traj.snapshots[k].t);
            CHECK(back[k].origin == traj.snapshots[k].origin);
            CHECK(back[k].dx == traj.snapshots[k].dx);
            CHECK(back[k].u == traj.snapshots[k].u);
        }
        // every = 1 keeps t = 0, 1 and the final snapshot
        write_snapshots_text(dir / "sparse.txt", traj, 1.0);
        CHECK(read_snapshots_text(dir / "sparse.txt").size() == 3);
        write_snapshots_csv(dir / "s.csv", traj, 0.0);
        const auto rows = read_lines(dir / "s.csv");
        CHECK(rows[0] == "t,x,u");
        CHECK(rows.size() == 1 + 4 * 6);
        CHECK(rows[1].rfind("0,-0.30000000000000004,", 0) == 0);
        fs::remove_all(dir);
    }

    TEST_CASE("shift log as json lines")
    {
        const auto dir = scratch_dir("shifts");
        write_shifts_jsonl(dir / "shifts.jsonl", small_trajectory());
        const auto lines = read_lines(dir / "shifts.jsonl");
        REQUIRE(lines.size() == 2);
        const auto j = nlohmann::json::parse(lines[1]);
        CHECK(j["t"] == 1.5);
        CHECK(j["cells"] == 1);
        CHECK(j["origin_after"] == -1);
        fs::remove_all(dir);
    }

    TEST_CASE("loading a missing file")
    {
        error_message([] { load_config("/nonexistent/frontlab.toml"); }, ErrorKind::Config);
    }
}
