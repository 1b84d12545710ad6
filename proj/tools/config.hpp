#pragma once

#include "confcurv/obstructions.hpp"

#include <optional>
#include <string>

namespace confcurv::cli {

/// Malformed or inconsistent configuration; maps to exit code 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Problem description read from a JSON file. Relative paths are resolved
/// against the directory of the file.
///
///   mesh         {"generator": NAME, "resolution": N} or {"path": OFF, "tags": FILE}
///   dimension    optional; must match the mesh
///   background   "angle_defect" (surfaces, default), "flat" (default for n=3),
///                {"interior": K, "boundary": k} constants, or
///                {"interior_csv": PATH, "boundary_csv": PATH}
///   problem      PC, PC0, CE or CE0
///   target       expression in x, y, z, r, theta
///   target_where optional expression; the target is zero where it is <= 0
///   method       auto (default), newton, constrained, monotone, subcritical
///   gamma        subcritical exponent, default 0.5
///   solver       {"tol", "linear_tol", "max_iterations", "monotone_max_iterations"}
///   output       output directory, default "out"
///   seed         default 0; seeds the initial-guess jitter
///   initial_jitter  amplitude of a random initial guess for newton, default 0
struct ProblemConfig {
    std::string base_dir = ".";
    std::string generator;
    int resolution = 0;
    std::string mesh_path;
    std::string tags_path;
    std::optional<int> dimension;

    std::string background;
    double background_interior = 0.0;
    double background_boundary = 0.0;
    std::string background_interior_csv;
    std::string background_boundary_csv;

    Problem problem = Problem::PC0;
    std::string target;
    std::string target_where;
    std::string method = "auto";
    double gamma = 0.5;
    SolverConfig solver;
    std::string output = "out";
    unsigned seed = 0;
    double initial_jitter = 0.0;
    bool dump_matrices = false;
};

bool known_method(const std::string& name);

ProblemConfig load_config(const std::string& path);
ProblemConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");

Mesh build_mesh(const ProblemConfig& cfg);
BackgroundGeometry build_background(const ProblemConfig& cfg, const Mesh& mesh);

/// Target evaluated on the D0 vertices (PC0, CE0) or on every vertex.
ScalarField build_target(const ProblemConfig& cfg, const Mesh& mesh);

} // namespace confcurv::cli
