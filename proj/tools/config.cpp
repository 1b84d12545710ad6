#include "config.hpp"

#include "expr.hpp"

#include "confcurv/generators.hpp"
#include "confcurv/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace confcurv::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kMethods = {"auto", "newton", "constrained", "monotone", "subcritical"};

std::string resolve(const ProblemConfig& cfg, const std::string& p)
{
    if (p.empty() || fs::path(p).is_absolute()) {
        return p;
    }
    return (fs::path(cfg.base_dir) / p).string();
}

std::string must_exist(const ProblemConfig& cfg, const std::string& p, const char* what)
{
    const std::string full = resolve(cfg, p);
    if (!fs::exists(full)) {
        throw ConfigError(std::string(what) + " '" + full + "' does not exist");
    }
    return full;
}

template <class T>
T get(const json& j, const char* key, T fallback)
{
    if (!j.contains(key)) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

Expr parse_located(const std::string& src, const char* key)
{
    try {
        return Expr::parse(src);
    } catch (const ParseError& e) {
        throw ParseError(std::string(key) + ": " + e.what(), e.offset());
    }
}

} // namespace

bool known_method(const std::string& name)
{
    return std::find(kMethods.begin(), kMethods.end(), name) != kMethods.end();
}

ProblemConfig parse_config(const std::string& json_text, const std::string& base_dir)
{
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    ProblemConfig cfg;
    cfg.base_dir = base_dir;

    if (!j.contains("mesh") || !j["mesh"].is_object()) {
        throw ConfigError("config needs a 'mesh' object");
    }
    const json& m = j["mesh"];
    cfg.generator = get<std::string>(m, "generator", "");
    cfg.resolution = get<int>(m, "resolution", 0);
    cfg.mesh_path = get<std::string>(m, "path", "");
    cfg.tags_path = get<std::string>(m, "tags", "");
    if (cfg.generator.empty() == cfg.mesh_path.empty()) {
        throw ConfigError("mesh needs exactly one of 'generator' and 'path'");
    }
    if (j.contains("dimension")) {
        cfg.dimension = get<int>(j, "dimension", 0);
    }

    if (j.contains("background")) {
        const json& b = j["background"];
        if (b.is_string()) {
            cfg.background = b.get<std::string>();
            if (cfg.background != "angle_defect" && cfg.background != "flat") {
                throw ConfigError("unknown background '" + cfg.background + "'");
            }
        } else if (b.is_object() && (b.contains("interior_csv") || b.contains("boundary_csv"))) {
            cfg.background = "fields";
            cfg.background_interior_csv = get<std::string>(b, "interior_csv", "");
            cfg.background_boundary_csv = get<std::string>(b, "boundary_csv", "");
        } else if (b.is_object()) {
            cfg.background = "constant";
            cfg.background_interior = get<double>(b, "interior", 0.0);
            cfg.background_boundary = get<double>(b, "boundary", 0.0);
        } else {
            throw ConfigError("background must be a name or an object");
        }
    }

    try {
        cfg.problem = problem_from_string(get<std::string>(j, "problem", ""));
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    cfg.target = get<std::string>(j, "target", "");
    if (cfg.target.empty()) {
        throw ConfigError("config needs a 'target' expression");
    }
    parse_located(cfg.target, "target");
    cfg.target_where = get<std::string>(j, "target_where", "");
    if (!cfg.target_where.empty()) {
        parse_located(cfg.target_where, "target_where");
    }
    cfg.method = get<std::string>(j, "method", "auto");
    if (!known_method(cfg.method)) {
        throw ConfigError("unknown method '" + cfg.method + "'");
    }
    cfg.gamma = get<double>(j, "gamma", 0.5);
    if (j.contains("solver")) {
        const json& s = j["solver"];
        cfg.solver.tol = get<double>(s, "tol", cfg.solver.tol);
        cfg.solver.linear_tol = get<double>(s, "linear_tol", cfg.solver.linear_tol);
        cfg.solver.max_iterations = get<int>(s, "max_iterations", cfg.solver.max_iterations);
        cfg.solver.monotone_max_iterations =
            get<int>(s, "monotone_max_iterations", cfg.solver.monotone_max_iterations);
    }
    cfg.output = get<std::string>(j, "output", "out");
    cfg.seed = get<unsigned>(j, "seed", 0u);
    cfg.initial_jitter = get<double>(j, "initial_jitter", 0.0);
    cfg.dump_matrices = get<bool>(j, "dump_matrices", false);
    return cfg;
}

ProblemConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config '" + path + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    const fs::path parent = fs::path(path).parent_path();
    return parse_config(text.str(), parent.empty() ? "." : parent.string());
}

Mesh build_mesh(const ProblemConfig& cfg)
{
    Mesh mesh;
    if (!cfg.generator.empty()) {
        if (cfg.resolution <= 0) {
            throw ConfigError("generator needs a positive 'resolution'");
        }
        try {
            mesh = gen::by_name(cfg.generator, cfg.resolution);
        } catch (const PreconditionError& e) {
            throw ConfigError(e.what());
        }
    } else {
        mesh = io::load_mesh(must_exist(cfg, cfg.mesh_path, "mesh file"));
    }
    if (!cfg.tags_path.empty()) {
        mesh = io::load_tags(mesh, must_exist(cfg, cfg.tags_path, "tag file"));
    }
    if (cfg.dimension && *cfg.dimension != mesh.dim()) {
        std::ostringstream msg;
        msg << "config dimension " << *cfg.dimension << " does not match the mesh (" << mesh.dim() << ")";
        throw ConfigError(msg.str());
    }
    return mesh;
}

BackgroundGeometry build_background(const ProblemConfig& cfg, const Mesh& mesh)
{
    std::string kind = cfg.background;
    if (kind.empty()) {
        kind = mesh.dim() == 2 ? "angle_defect" : "flat";
    }
    if (kind == "angle_defect") {
        if (mesh.dim() != 2) {
            throw ConfigError("angle_defect background needs a triangle mesh");
        }
        return BackgroundGeometry::from_angle_defects(mesh);
    }
    if (kind == "flat") {
        return BackgroundGeometry::constant(mesh, 0.0, 0.0);
    }
    if (kind == "constant") {
        return BackgroundGeometry::constant(mesh, cfg.background_interior, cfg.background_boundary);
    }
    BackgroundGeometry bg = BackgroundGeometry::constant(mesh, 0.0, 0.0);
    if (!cfg.background_interior_csv.empty()) {
        bg.interior_curvature = io::load_field(mesh, Support::All, must_exist(cfg, cfg.background_interior_csv, "field"));
    }
    if (!cfg.background_boundary_csv.empty()) {
        bg.boundary_curvature =
            io::load_field(mesh, Support::Boundary, must_exist(cfg, cfg.background_boundary_csv, "field"));
    }
    return bg;
}

ScalarField build_target(const ProblemConfig& cfg, const Mesh& mesh)
{
    const Expr f = parse_located(cfg.target, "target");
    std::optional<Expr> where;
    if (!cfg.target_where.empty()) {
        where = parse_located(cfg.target_where, "target_where");
    }
    const bool boundary = prescribes_boundary(cfg.problem);
    const std::vector<bool> d0 = mesh.d0_vertex_mask();
    const Eigen::RowVectorXd c = mesh.centroid();
    ScalarField t = ScalarField::constant(boundary ? Support::Boundary : Support::All, mesh.num_vertices(), 0.0);
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
        if (boundary && !d0[static_cast<std::size_t>(i)]) {
            continue;
        }
        Point p;
        const auto v = mesh.vertices().row(i);
        p.x = v[0];
        p.y = v.size() > 1 ? v[1] : 0.0;
        p.z = v.size() > 2 ? v[2] : 0.0;
        const double dx = p.x - c[0];
        const double dy = p.y - (c.size() > 1 ? c[1] : 0.0);
        p.r = std::hypot(dx, dy);
        p.theta = std::atan2(dy, dx);
        try {
            if (where && where->eval(p) <= 0.0) {
                continue;
            }
            t[i] = f.eval(p);
        } catch (const EvalError& e) {
            std::ostringstream msg;
            msg << "target at vertex " << i << ": " << e.what();
            throw EvalError(msg.str());
        }
    }
    return t;
}

} // namespace confcurv::cli
