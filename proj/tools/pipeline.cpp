#include "pipeline.hpp"

#include "expr.hpp"

#include "confcurv/generators.hpp"
#include "confcurv/geometry.hpp"
#include "confcurv/io.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

namespace confcurv::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Non-finite doubles become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_json(const std::string& dir, const std::string& name, const json& j)
{
    fs::create_directories(dir);
    std::ofstream out(fs::path(dir) / name);
    if (!out) {
        throw Error("cannot write " + (fs::path(dir) / name).string());
    }
    out << j.dump(2) << '\n';
}

std::string fields_dir(const ProblemConfig& cfg)
{
    const fs::path p = fs::path(cfg.output) / "fields";
    fs::create_directories(p);
    return p.string();
}

struct Loaded {
    Mesh mesh;
    BackgroundGeometry bg;
    ScalarField target;
};

Loaded load(const ProblemConfig& cfg)
{
    Loaded p;
    p.mesh = build_mesh(cfg);
    p.bg = build_background(cfg, p.mesh);
    p.bg.validate(p.mesh);
    p.target = build_target(cfg, p.mesh);
    return p;
}

void dump_matrices(const ProblemConfig& cfg, const Loaded& p, const SolveReport* rep)
{
    if (!cfg.dump_matrices) {
        return;
    }
    const fs::path dir = fs::path(cfg.output) / "matrices";
    fs::create_directories(dir);
    const OperatorSet ops = assemble_operators(p.mesh, p.bg);
    io::save_matrix_market(ops.stiffness, (dir / "stiffness.mtx").string());
    auto diag = [](const Vector& d) {
        SparseMatrix m(d.size(), d.size());
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            m.insert(i, i) = d[i];
        }
        return m;
    };
    io::save_matrix_market(diag(ops.mass_interior), (dir / "mass_interior.mtx").string());
    io::save_matrix_market(diag(ops.mass_boundary), (dir / "mass_boundary.mtx").string());
    if (rep != nullptr && rep->u.size() == p.mesh.num_vertices()) {
        const LinearizedOperator lin = assemble_linearization(ops, rep->u.values);
        io::save_matrix_market(lin.coupled, (dir / "jacobian.mtx").string());
    }
}

json config_echo(const ProblemConfig& cfg)
{
    json j;
    j["problem"] = to_string(cfg.problem);
    j["target"] = Expr::parse(cfg.target).print();
    if (!cfg.target_where.empty()) {
        j["target_where"] = Expr::parse(cfg.target_where).print();
    }
    j["mesh"] = cfg.generator.empty() ? cfg.mesh_path : cfg.generator + ":" + std::to_string(cfg.resolution);
    j["background"] = cfg.background.empty() ? "default" : cfg.background;
    j["method"] = cfg.method;
    j["tol"] = cfg.solver.tol;
    j["seed"] = cfg.seed;
    return j;
}

ScalarField initial_guess(const ProblemConfig& cfg, const Mesh& mesh, double base)
{
    ScalarField u = ScalarField::constant(Support::All, mesh.num_vertices(), base);
    if (cfg.initial_jitter > 0.0) {
        std::mt19937 rng(cfg.seed);
        std::uniform_real_distribution<double> d(-cfg.initial_jitter, cfg.initial_jitter);
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            u[i] += d(rng);
        }
    }
    return u;
}

CurvaturePair target_pair(const ProblemConfig& cfg, const Loaded& p)
{
    const OperatorSet ops = assemble_operators(p.mesh, p.bg);
    const Vector zero = Vector::Zero(p.mesh.num_vertices());
    return prescribes_boundary(cfg.problem) ? make_target(ops, zero, p.target.values)
                                            : make_target(ops, p.target.values, zero);
}

TargetSide side_of(const ProblemConfig& cfg)
{
    return prescribes_boundary(cfg.problem) ? TargetSide::Boundary : TargetSide::Interior;
}

SolveReport forced_solve(const ProblemConfig& cfg, const Loaded& p, const std::string& method)
{
    if (method == "newton") {
        return newton_solve(p.mesh, p.bg, target_pair(cfg, p), initial_guess(cfg, p.mesh, p.bg.n == 2 ? 0.0 : 1.0),
                            cfg.solver);
    }
    if (method == "constrained") {
        return minimize_constrained(p.mesh, p.bg, p.target, side_of(cfg), cfg.solver);
    }
    if (method == "subcritical") {
        SubcriticalParams sp;
        sp.gamma = cfg.gamma;
        return minimize_subcritical(p.mesh, p.bg, p.target, sp, side_of(cfg), cfg.solver);
    }
    if (method == "monotone") {
        if (p.bg.n < 3 || prescribes_boundary(cfg.problem)) {
            throw PreconditionError("monotone method needs an interior (PC) target with n >= 3");
        }
        const UpperBarrier up = zero_case_upper_barrier(p.mesh, p.bg, p.target, cfg.solver);
        const LowerBarrier lo = zero_case_lower_barrier(p.mesh, p.bg, p.target, up.u, cfg.solver);
        return monotone_iteration(p.mesh, p.bg, target_pair(cfg, p), lo.u, up.u, cfg.solver);
    }
    throw PreconditionError("unknown method '" + method + "'");
}

void write_solution(const ProblemConfig& cfg, const Loaded& p, const SolveReport& rep)
{
    write_json(cfg.output, "solve_report.json", to_json(rep));
    const std::string dir = fields_dir(cfg);
    if (rep.u.size() == p.mesh.num_vertices()) {
        io::save_field(p.mesh, rep.u, (fs::path(dir) / "u.csv").string());
    }
}

} // namespace

json to_json(const SolveReport& rep)
{
    json j;
    j["status"] = to_string(rep.status);
    j["n"] = rep.n;
    j["method"] = rep.method;
    j["iterations"] = rep.iterations;
    j["residual_interior"] = number(rep.residual_interior);
    j["residual_boundary"] = number(rep.residual_boundary);
    if (rep.multipliers) {
        j["multipliers"] = {number(rep.multipliers->first), number(rep.multipliers->second)};
    } else {
        j["multipliers"] = nullptr;
    }
    if (rep.perturbation_used) {
        j["perturbation"] = {{"description", rep.perturbation_used->description},
                             {"t", number(rep.perturbation_used->t)}};
    } else {
        j["perturbation"] = nullptr;
    }
    j["notes"] = rep.notes;
    json d = json::object();
    for (const auto& [k, v] : rep.diagnostics) {
        d[k] = number(v);
    }
    j["diagnostics"] = d;
    if (rep.u.size() > 0) {
        j["u_min"] = number(rep.u.values.minCoeff());
        j["u_max"] = number(rep.u.values.maxCoeff());
    }
    return j;
}

json to_json(const ObstructionVerdict& v)
{
    json j;
    j["verdict"] = to_string(v.verdict);
    j["theorem"] = v.theorem;
    json w = json::object();
    for (const auto& [k, x] : v.witnesses) {
        w[k] = number(x);
    }
    j["witnesses"] = w;
    j["assumptions_checked"] = v.assumptions_checked;
    j["report"] = v.report ? to_json(*v.report) : json(nullptr);
    return j;
}

json to_json(const EigenResult& e)
{
    return {{"kind", to_string(e.kind)},           {"value", number(e.value)},
            {"sign_class", to_string(e.sign_class)}, {"tolerance", number(e.tolerance)},
            {"method", e.method},                   {"iterations", e.iterations}};
}

json classify(const ProblemConfig& cfg)
{
    const Mesh mesh = build_mesh(cfg);
    const BackgroundGeometry bg = build_background(cfg, mesh);
    bg.validate(mesh);
    json j;
    j["dimension"] = bg.n;
    j["vertices"] = mesh.num_vertices();
    if (bg.n == 2) {
        j["euler_characteristic_mesh"] = euler_characteristic(mesh);
        j["euler_characteristic_background"] = background_euler_characteristic(mesh, bg);
    }
    const EigenResult lam = lambda1(mesh, bg);
    j["lambda1"] = to_json(lam);
    const EigenResult sig = sigma1(mesh, bg);
    j["sigma1"] = to_json(sig);
    j["sign_agreement"] = lam.sign_class == sig.sign_class;
    j["sign_class"] = to_string(lam.sign_class);
    write_json(cfg.output, "classify.json", j);
    return j;
}

json eigen(const ProblemConfig& cfg)
{
    const Mesh mesh = build_mesh(cfg);
    const BackgroundGeometry bg = build_background(cfg, mesh);
    bg.validate(mesh);
    const EigenResult lam = lambda1(mesh, bg);
    const EigenResult sig = sigma1(mesh, bg);
    const std::string dir = fields_dir(cfg);
    io::save_field(mesh, lam.eigenfunction, (fs::path(dir) / "lambda1_eigenfunction.csv").string());
    io::save_field(mesh, sig.eigenfunction, (fs::path(dir) / "sigma1_eigenfunction.csv").string());
    json j{{"lambda1", to_json(lam)}, {"sigma1", to_json(sig)}};
    write_json(cfg.output, "eigen.json", j);
    return j;
}

json check(const ProblemConfig& cfg)
{
    const Loaded p = load(cfg);
    DispatchOptions opts;
    opts.solver = cfg.solver;
    opts.run_solvers = false;
    json j = to_json(trichotomy_dispatch(p.mesh, p.bg, p.target, cfg.problem, opts));
    j["problem"] = to_string(cfg.problem);
    j["config"] = config_echo(cfg);
    io::save_field(p.mesh, p.target, (fs::path(fields_dir(cfg)) / "target.csv").string());
    write_json(cfg.output, "verdict.json", j);
    return j;
}

json solve(const ProblemConfig& cfg)
{
    const Loaded p = load(cfg);
    SolveReport rep;
    if (cfg.method == "auto") {
        DispatchOptions opts;
        opts.solver = cfg.solver;
        const ObstructionVerdict v = trichotomy_dispatch(p.mesh, p.bg, p.target, cfg.problem, opts);
        rep = v.report ? *v.report : forced_solve(cfg, p, "newton");
    } else {
        rep = forced_solve(cfg, p, cfg.method);
    }
    write_solution(cfg, p, rep);
    dump_matrices(cfg, p, &rep);
    return to_json(rep);
}

json run(const ProblemConfig& cfg)
{
    const Loaded p = load(cfg);
    json summary;
    summary["classify"] = classify(cfg);
    DispatchOptions opts;
    opts.solver = cfg.solver;
    ObstructionVerdict v = trichotomy_dispatch(p.mesh, p.bg, p.target, cfg.problem, opts);
    if (cfg.method != "auto" && v.verdict != Verdict::NotExists) {
        const SolveReport rep = forced_solve(cfg, p, cfg.method);
        v.assumptions_checked.push_back("method forced to " + cfg.method);
        if (rep.converged()) {
            v.report = rep;
        } else {
            v.report.reset();
        }
    }
    json j = to_json(v);
    j["problem"] = to_string(cfg.problem);
    j["config"] = config_echo(cfg);
    write_json(cfg.output, "verdict.json", j);
    io::save_field(p.mesh, p.target, (fs::path(fields_dir(cfg)) / "target.csv").string());
    if (v.report) {
        write_solution(cfg, p, *v.report);
    }
    dump_matrices(cfg, p, v.report ? &*v.report : nullptr);
    summary["verdict"] = j;
    return summary;
}

void mesh_gen(const std::string& name, int resolution, const std::string& out_path)
{
    if (resolution <= 0) {
        throw ConfigError("resolution must be positive");
    }
    Mesh m;
    try {
        m = gen::by_name(name, resolution);
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    const fs::path out(out_path);
    if (out.has_parent_path()) {
        fs::create_directories(out.parent_path());
    }
    io::save_mesh(m, out.string());
    fs::path tags = out;
    tags.replace_extension(".tags");
    io::save_tags(m, tags.string());
}

int guarded(const std::string& out_dir, const std::function<void()>& stage)
{
    int code = kExitOk;
    std::string type;
    std::string message;
    try {
        stage();
        return kExitOk;
    } catch (const ConfigError& e) {
        code = kExitConfig, type = "ConfigError", message = e.what();
    } catch (const ParseError& e) {
        code = kExitConfig, type = "ParseError", message = e.what();
    } catch (const EvalError& e) {
        code = kExitConfig, type = "EvalError", message = e.what();
    } catch (const PreconditionError& e) {
        code = kExitConfig, type = "PreconditionError", message = e.what();
    } catch (const DimensionError& e) {
        code = kExitConfig, type = "DimensionError", message = e.what();
    } catch (const SolverError& e) {
        code = kExitSolver, type = "SolverError", message = e.what();
    } catch (const std::exception& e) {
        code = kExitSolver, type = "InternalError", message = e.what();
    }
    std::cerr << "error (" << type << "): " << message << '\n';
    if (!out_dir.empty()) {
        try {
            write_json(out_dir, "error.json", {{"type", type}, {"message", message}, {"exit_code", code}});
        } catch (const std::exception&) {
            // the directory itself may be the problem
        }
    }
    return code;
}

} // namespace confcurv::cli
