#pragma once

#include "config.hpp"

#include <json.hpp>

#include <functional>
#include <string>

namespace confcurv::cli {

enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitSolver = 3 };

nlohmann::json to_json(const SolveReport& rep);
nlohmann::json to_json(const ObstructionVerdict& v);
nlohmann::json to_json(const EigenResult& e);

/// Eigenvalues, Euler characteristics and sign class; writes classify.json.
nlohmann::json classify(const ProblemConfig& cfg);
/// lambda1 / sigma1 with eigenfunctions in fields/.
nlohmann::json eigen(const ProblemConfig& cfg);
/// Obstruction checks only (no solver); writes verdict.json.
nlohmann::json check(const ProblemConfig& cfg);
/// Forces cfg.method ("auto" defers to the dispatcher's choice, then Newton);
/// writes solve_report.json and fields/u.csv.
nlohmann::json solve(const ProblemConfig& cfg);
/// classify, check, solve where a constructive branch applies, report.
nlohmann::json run(const ProblemConfig& cfg);

/// Writes a generated mesh as OFF plus its tag file.
void mesh_gen(const std::string& name, int resolution, const std::string& out_path);

/// Runs `stage`, maps exceptions to exit codes and logs them to
/// <out>/error.json when an output directory is known.
int guarded(const std::string& out_dir, const std::function<void()>& stage);

} // namespace confcurv::cli
