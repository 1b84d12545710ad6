#include "pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

using namespace confcurv;
using namespace confcurv::cli;

namespace {

struct Overrides {
    std::string config;
    std::optional<unsigned> seed;
    std::string out;
    std::optional<double> tol;
    std::string method;
    bool dump = false;
};

void add_common(CLI::App* sub, Overrides& o)
{
    sub->add_option("--config", o.config, "JSON problem file")->required();
    sub->add_option("--seed", o.seed, "seed for randomized initial guesses (config default 0)");
    sub->add_option("--out", o.out, "output directory (config default \"out\")");
    sub->add_option("--tol", o.tol, "nonlinear residual tolerance (default 1e-6)");
    sub->add_option("--method", o.method, "auto, newton, constrained, monotone, subcritical (default auto)");
    sub->add_flag("--dump-matrices", o.dump, "write matrices/*.mtx");
}

ProblemConfig configured(const Overrides& o)
{
    ProblemConfig cfg = load_config(o.config);
    if (o.seed) {
        cfg.seed = *o.seed;
    }
    if (!o.out.empty()) {
        cfg.output = o.out;
    }
    if (o.tol) {
        cfg.solver.tol = *o.tol;
    }
    if (!o.method.empty()) {
        if (!known_method(o.method)) {
            throw ConfigError("unknown method '" + o.method + "'");
        }
        cfg.method = o.method;
    }
    cfg.dump_matrices = cfg.dump_matrices || o.dump;
    return cfg;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Conformal curvature prescription workbench.\n"
                 "Targets are expressions in x, y, z, r, theta (r, theta polar about the mesh centroid).\n"
                 "Solver defaults: tol 1e-6, linear_tol 1e-8, max_iterations 200, monotone_max_iterations 50000,\n"
                 "sing_tol 1e-8, invertible_tol 1e-4, gamma 0.5, kwe_tolerance 1e-2.\n"
                 "Exit codes: 0 completed, 2 configuration error, 3 solver fault."};
    app.require_subcommand(1);

    Overrides o;
    auto* classify_cmd = app.add_subcommand("classify", "eigenvalues, Euler characteristic and sign class");
    auto* eigen_cmd = app.add_subcommand("eigen", "lambda1 and sigma1 with eigenfunctions");
    auto* check_cmd = app.add_subcommand("check", "obstruction checks only");
    auto* solve_cmd = app.add_subcommand("solve", "run one solver (see --method)");
    auto* run_cmd = app.add_subcommand("run", "classify, check, solve where constructive, report");
    for (CLI::App* sub : {classify_cmd, eigen_cmd, check_cmd, solve_cmd, run_cmd}) {
        add_common(sub, o);
    }

    auto* mesh_cmd = app.add_subcommand("mesh", "mesh utilities");
    mesh_cmd->require_subcommand(1);
    auto* gen_cmd = mesh_cmd->add_subcommand("gen", "write a built-in mesh as OFF plus tags");
    std::string gen_name;
    int resolution = 8;
    std::string gen_out = "mesh.off";
    gen_cmd->add_option("name", gen_name, "disk, annulus, rectangle, square, cylinder, half_cylinder, pants, "
                                          "hemisphere, cube, ball")
        ->required();
    gen_cmd->add_option("--resolution", resolution, "generator resolution")->capture_default_str();
    gen_cmd->add_option("--out", gen_out, "output OFF path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (gen_cmd->parsed()) {
        return guarded("", [&] { mesh_gen(gen_name, resolution, gen_out); });
    }

    ProblemConfig cfg;
    const int loaded = guarded(o.out, [&] { cfg = configured(o); });
    if (loaded != kExitOk) {
        return loaded;
    }
    return guarded(cfg.output, [&] {
        nlohmann::json j;
        if (classify_cmd->parsed()) {
            j = classify(cfg);
        } else if (eigen_cmd->parsed()) {
            j = eigen(cfg);
        } else if (check_cmd->parsed()) {
            j = check(cfg);
        } else if (solve_cmd->parsed()) {
            j = solve(cfg);
        } else {
            j = run(cfg);
        }
        std::cout << j.dump(2) << '\n';
    });
}
