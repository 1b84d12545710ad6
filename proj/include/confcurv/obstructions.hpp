#pragma once

#include "confcurv/prescribe.hpp"
#include "confcurv/spectral.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace confcurv {

enum class Verdict { Exists, NotExists, Unknown };

/// PC/PC0: pointwise conformal metrics with prescribed interior (resp.
/// boundary) curvature and the other curvature zero. CE/CE0: the same up to
/// diffeomorphism.
enum class Problem { PC, PC0, CE, CE0 };

std::string to_string(Verdict v);
std::string to_string(Problem p);
Problem problem_from_string(const std::string& s);

/// PC0 and CE0 prescribe a boundary function.
bool prescribes_boundary(Problem p);

struct ObstructionVerdict {
    Verdict verdict = Verdict::Unknown;
    /// Identifier of the criterion that decided the verdict.
    std::string theorem;
    std::map<std::string, double> witnesses;
    std::vector<std::string> assumptions_checked;
    std::optional<SolveReport> report;
};

/// Nodal sign predicates on the support of `target`, with a dead-band of
/// 1e-12 * sup |target|.
bool identically_zero(const ScalarField& target);
bool positive_somewhere(const ScalarField& target);
bool negative_somewhere(const ScalarField& target);
bool changes_sign(const ScalarField& target);

/// chi > 0: positive somewhere; chi = 0: changes sign or vanishes;
/// chi < 0: negative somewhere.
bool sign_condition(int chi, const ScalarField& target);

/// Euler characteristic that the background's total curvature implies by
/// Gauss-Bonnet, round(total / 2 pi). Equals the mesh's for angle-defect
/// backgrounds.
int background_euler_characteristic(const Mesh& mesh, const BackgroundGeometry& bg);

struct IntegralCondition {
    std::string name;
    double value = 0.0;
    bool pass = false;
};

/// "total": integral of the target (< 0 passes). For n = 2 also
/// "weighted": int kappa e^{-v} da with d_nu v = kappa_g - mean, or
/// int K e^{2v} dv with Delta v = K_g - mean (< 0 passes). A vanishing
/// target reports zeros, all passing, plus "identically_zero".
std::vector<IntegralCondition> integral_conditions(const Mesh& mesh, const BackgroundGeometry& bg,
                                                   const ScalarField& target, TargetSide side);

struct PositivityWitness {
    bool positive = false;
    ScalarField field;
    double minimum = 0.0;
};

PositivityWitness positivity_witness(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& target,
                                     AuxiliaryKind kind);

/// Boundary target kappa = -d_nu psi + kappa_0 (psi + alpha), with psi the
/// harmonic extension of `psi_boundary` and kappa_0 the (constant) background
/// boundary curvature. The Robin problem for this kappa is solved by
/// psi + alpha exactly.
ScalarField robin_recipe_target(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& psi_boundary,
                                double alpha);

/// Harmonic function with the given values on the D0 rows.
Vector harmonic_extension(const Mesh& mesh, const Vector& boundary_values);

enum class KillingKind { Rotation, ConformalTranslation };

/// Conformal vector field of the boundary sphere of a round ball (or circle
/// of a round disk), sampled at every vertex (zero away from the boundary).
struct KillingField {
    KillingKind kind = KillingKind::Rotation;
    /// Rotation axis (n = 3) or translation direction.
    Eigen::VectorXd axis;
    Matrix vectors;
};

/// Boundary vertices equidistant from the centroid to `tol` relative.
bool is_round_ball(const Mesh& mesh, double tol = 1e-6);

/// X(x) = axis x (x - c) for n = 3, the quarter turn of (x - c) for n = 2.
KillingField rotation_field(const Mesh& mesh, const Eigen::VectorXd& axis);
/// X(x) = e - (e . y) y with y = (x - c) / radius.
KillingField conformal_translation_field(const Mesh& mesh, const Eigen::VectorXd& direction);

/// Sum over boundary facets of measure * <mean X, tangential grad H>, H
/// piecewise linear. Bilinear in H and X. Throws PreconditionError unless
/// the mesh is a round ball or disk.
double kazdan_warner_escobar(const Mesh& mesh, const ScalarField& h, const KillingField& x);

struct DispatchOptions {
    SolverConfig solver;
    EigenOptions eigen;
    /// Run the constructive solvers where a theorem provides one.
    bool run_solvers = true;
    /// Relative size of the Kazdan-Warner-Escobar integral that counts as
    /// nonzero.
    double kwe_tolerance = 1e-2;
};

ObstructionVerdict trichotomy_dispatch(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& target,
                                       Problem problem, const DispatchOptions& opts = {});

} // namespace confcurv
