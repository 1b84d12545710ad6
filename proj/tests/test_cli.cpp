#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "expr.hpp"
#include "pipeline.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace confcurv;
using namespace confcurv::cli;
namespace fs = std::filesystem;

namespace {

double at(const std::string& src, double x, double y, double theta = 0.0)
{
    Point p;
    p.x = x;
    p.y = y;
    p.theta = theta;
    return Expr::parse(src).eval(p);
}

std::size_t error_offset(const std::string& src)
{
    try {
        Expr::parse(src);
    } catch (const ParseError& e) {
        return e.offset();
    }
    FAIL("no error for " << src);
    return 0;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("confcurv_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string annulus_config(const fs::path& out)
{
    return R"({"mesh": {"generator": "annulus", "resolution": 32}, "problem": "PC0",
               "target": "sin(theta) - 0.1", "target_where": "r - 0.75",
               "solver": {"tol": 1e-8}, "output": ")" + out.string() + "\"}";
}

} // namespace

TEST_CASE("expressions evaluate with standard precedence")
{
    CHECK(at("sin(theta) - 0.1", 0, 0, std::numbers::pi / 2) == doctest::Approx(0.9));
    CHECK(at("x^2 + y", 2, 3) == doctest::Approx(7.0));
    CHECK(at("2^3^2", 0, 0) == doctest::Approx(512.0));
    CHECK(at("-2^2", 0, 0) == doctest::Approx(-4.0));
    CHECK(at("2^-1", 0, 0) == doctest::Approx(0.5));
    CHECK(at("1 - 2 - 3", 0, 0) == doctest::Approx(-4.0));
    CHECK(at("8 / 4 / 2", 0, 0) == doctest::Approx(1.0));
    CHECK(at(" max( x , y ) * min(x,y) ", 2, 5) == doctest::Approx(10.0));
    CHECK(at("abs(-3) + sqrt(16) + exp(0) + log(1) + cos(0)", 0, 0) == doctest::Approx(9.0));
    CHECK(at("1.5e1 + .5", 0, 0) == doctest::Approx(15.5));
    CHECK(at("pi", 0, 0) == doctest::Approx(std::numbers::pi));
}

TEST_CASE("expression errors are located")
{
    CHECK(error_offset("sin(") == 4);
    CHECK(error_offset("x +") == 3);
    CHECK(error_offset("foo + 1") == 0);
    CHECK(error_offset("1 + bar") == 4);
    CHECK(error_offset("(x") == 2);
    CHECK(error_offset("x )") == 2);
    CHECK(error_offset("max(1)") == 5);
    CHECK_THROWS_AS(at("log(x)", 0, 0), EvalError);
    CHECK_THROWS_AS(at("1 / x", 0, 0), EvalError);
    CHECK_THROWS_AS(at("sqrt(x)", -1, 0), EvalError);
}

TEST_CASE("print then parse gives the same tree")
{
    for (const char* src : {"sin(theta) - 0.1", "x^2 + y", "-2^2", "2^3^2", "max(x, -y) / (1 + r) * 3e-7",
                            "--x", "exp(-(x*x + y*y) / 0.02) - 0.5", "0.1 + 0.2"}) {
        const Expr a = Expr::parse(src);
        const Expr b = Expr::parse(a.print());
        CHECK(a == b);
        CHECK(b.print() == a.print());
    }
}

TEST_CASE("configuration errors")
{
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"problem": "PC0", "target": "1"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"mesh": {"generator": "disk", "resolution": 3}, "problem": "PX", "target": "1"})"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_config(R"({"mesh": {"generator": "disk", "resolution": 3}, "problem": "PC0", "target": "1", "method": "x"})"),
        ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"mesh": {"generator": "disk", "resolution": 3}, "problem": "PC0", "target": "sin("})"),
                    ParseError);

    const fs::path dir = scratch("missing");
    const ProblemConfig cfg =
        parse_config(R"({"mesh": {"path": "nowhere.off"}, "problem": "PC0", "target": "1"})", dir.string());
    CHECK(guarded((dir / "out").string(), [&] { build_mesh(cfg); }) == kExitConfig);
    CHECK(fs::exists(dir / "out" / "error.json"));

    const ProblemConfig mismatch =
        parse_config(R"({"mesh": {"generator": "disk", "resolution": 3}, "dimension": 3, "problem": "PC0", "target": "1"})");
    CHECK_THROWS_AS(build_mesh(mismatch), ConfigError);

    CHECK(guarded("", [] { throw SolverError("boom"); }) == kExitSolver);
    CHECK(guarded("", [] {}) == kExitOk);
}

TEST_CASE("target is evaluated on the prescribed vertices")
{
    const ProblemConfig cfg = parse_config(
        R"({"mesh": {"generator": "annulus", "resolution": 16}, "problem": "PC0", "target": "1", "target_where": "r - 0.75"})");
    const Mesh m = build_mesh(cfg);
    const ScalarField t = build_target(cfg, m);
    for (Eigen::Index i = 0; i < m.num_vertices(); ++i) {
        const bool outer_boundary = m.boundary_vertex_mask()[static_cast<std::size_t>(i)] && m.vertices().row(i).norm() > 0.75;
        CHECK(t[i] == (outer_boundary ? 1.0 : 0.0));
    }
}

TEST_CASE("annulus pipeline: verdict, solution and determinism")
{
    const fs::path dir = scratch("annulus");
    const ProblemConfig a = parse_config(annulus_config(dir / "a"));
    const ProblemConfig b = parse_config(annulus_config(dir / "b"));
    CHECK(guarded(a.output, [&] { run(a); }) == kExitOk);
    CHECK(guarded(b.output, [&] { run(b); }) == kExitOk);
    const auto verdict = nlohmann::json::parse(slurp(dir / "a" / "verdict.json"));
    CHECK(verdict["verdict"] == "Exists");
    CHECK(verdict["report"]["status"] == "Converged");
    CHECK(fs::exists(dir / "a" / "fields" / "u.csv"));
    CHECK(fs::exists(dir / "a" / "solve_report.json"));
    CHECK(slurp(dir / "a" / "verdict.json") == slurp(dir / "b" / "verdict.json"));
}

TEST_CASE("disk with a linear boundary target is obstructed")
{
    const fs::path dir = scratch("disk");
    ProblemConfig cfg = parse_config(
        R"({"mesh": {"generator": "disk", "resolution": 8}, "problem": "PC0", "target": "x + 2"})");
    cfg.output = (dir / "out").string();
    CHECK(guarded(cfg.output, [&] { run(cfg); }) == kExitOk);
    const auto verdict = nlohmann::json::parse(slurp(dir / "out" / "verdict.json"));
    CHECK(verdict["verdict"] == "NotExists");
    CHECK(verdict["witnesses"].contains("kwe_integral_x"));
    CHECK(verdict["witnesses"]["kwe_integral_x"].get<double>() > 0.0);
}

TEST_CASE("solve with a forced method and matrix dump")
{
    const fs::path dir = scratch("solve");
    ProblemConfig cfg = parse_config(annulus_config(dir / "out"));
    cfg.method = "constrained";
    cfg.dump_matrices = true;
    CHECK(guarded(cfg.output, [&] { solve(cfg); }) == kExitOk);
    CHECK(fs::exists(dir / "out" / "matrices" / "stiffness.mtx"));
    CHECK(fs::exists(dir / "out" / "matrices" / "jacobian.mtx"));
    const auto rep = nlohmann::json::parse(slurp(dir / "out" / "solve_report.json"));
    CHECK(rep["method"].get<std::string>().find("constrained") != std::string::npos);
}
