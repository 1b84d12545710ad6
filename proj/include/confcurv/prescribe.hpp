#pragma once

#include "confcurv/fem.hpp"
#include "confcurv/spectral.hpp"

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace confcurv {

enum class SolveStatus { Converged, Diverged, NotAdmissible, SingularJacobian };

std::string to_string(SolveStatus s);

struct SolverConfig {
    /// Sup-norm tolerance on density residuals of nonlinear solves.
    double tol = 1e-6;
    /// Relative residual tolerance of linear solves.
    double linear_tol = 1e-8;
    int max_iterations = 200;
    /// A coupled Jacobian with smallest singular value below this is singular.
    double sing_tol = 1e-8;
    /// Perturbation stops once the smallest singular value exceeds this.
    double invertible_tol = 1e-4;
    double t0 = 1e-3;
    double t_max = 1.0;
    double armijo = 1e-4;
    int monotone_max_iterations = 50000;
    /// Smallest c tried by bound_solution_transform.
    double c_min = 1e-8;
};

struct Perturbation {
    std::string description;
    double t = 0.0;
};

struct SolveReport {
    SolveStatus status = SolveStatus::Diverged;
    int n = 2;
    ScalarField u;
    int iterations = 0;
    double residual_interior = std::numeric_limits<double>::infinity();
    double residual_boundary = std::numeric_limits<double>::infinity();
    /// (lambda_1, lambda_2) of the constrained method.
    std::optional<std::pair<double, double>> multipliers;
    std::optional<Perturbation> perturbation_used;
    std::string method;
    std::vector<std::string> notes;
    /// Named scalar evidence (identities, chosen parameters).
    std::map<std::string, double> diagnostics;

    bool converged() const { return status == SolveStatus::Converged; }
};

/// Sup norms of eval_F(u) - target over interior rows and boundary rows.
std::pair<double, double> density_residuals(const OperatorSet& ops, const Vector& u, const CurvaturePair& target);

/// Target pair with zeros on the rows not covered by the given fields.
CurvaturePair make_target(const OperatorSet& ops, const Vector& interior, const Vector& boundary);

/// Damped Newton on F(u) = target with Armijo backtracking on the weak
/// residual. A singular Jacobian triggers perturb_until_invertible, then
/// Tikhonov steps.
SolveReport newton_solve(const Mesh& mesh, const BackgroundGeometry& bg, const CurvaturePair& target,
                         const ScalarField& u0, const SolverConfig& cfg = {});

struct PerturbationResult {
    ScalarField u;
    double t = 0.0;
    /// "bump-laplacian" (nonconstant kernel) or "boundary-distance".
    std::string branch;
    double sigma_min = 0.0;
};

/// Moves u along z until the coupled Jacobian is invertible. Throws
/// PreconditionError when it already is, SolverError when |t| reaches t_max.
PerturbationResult perturb_until_invertible(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& u,
                                            const SolverConfig& cfg = {});

/// Graph distance (along edges) from every vertex to the boundary.
Vector boundary_distance(const Mesh& mesh);

enum class TargetSide { Boundary, Interior };

/// Zero-total-curvature surfaces: minimizes the Dirichlet energy over
/// {sum W t e^{p w} = 0, mean w = 0} and recovers u = w + log(-lambda_2 / 2) / p.
/// Backgrounds that are not flat with geodesic boundary are first reduced by
/// the potential that makes them so.
SolveReport minimize_constrained(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& target,
                                 TargetSide side, const SolverConfig& cfg = {});

enum class AuxiliaryKind {
    /// harmonic phi with d_nu phi - kappa_0 phi = -kappa
    BoundaryRobin,
    /// Delta phi + K_0 phi = K with d_nu phi = 0
    InteriorHelmholtz,
    /// harmonic v with d_nu v = kappa_g - mean(kappa_g)
    BoundaryFluxPotential,
    /// Delta v = K_g - mean(K_g) with d_nu v = 0
    InteriorPotential,
    /// harmonic phi with d_nu phi - H_0 phi = -H
    MeanCurvatureRobin,
    /// Delta phi + R_0/(n-1) phi = R/(n-1) with d_nu phi = 0
    ScalarHelmholtz,
    /// Delta Psi = mean(R) - R with d_nu Psi = 0
    ScalarPotential,
};

std::string to_string(AuxiliaryKind k);
AuxiliaryKind auxiliary_kind_from_string(const std::string& s);

struct AuxiliaryResult {
    ScalarField field;
    bool positive = false;
    double minimum = 0.0;
    double residual = 0.0;
};

/// The constant coefficient (kappa_0, K_0, H_0, R_0) is read from the
/// background; `data` is the prescribed function where the kind needs one.
/// Pure Neumann kinds return the mass-weighted mean-zero solution.
AuxiliaryResult solve_auxiliary_linear(const Mesh& mesh, const BackgroundGeometry& bg, AuxiliaryKind kind,
                                       const ScalarField& data, const SolverConfig& cfg = {});

/// Largest nodal violation of the super- (upper = true) or sub-solution
/// inequality, relative to the size of the terms at each row. <= 0 passes.
double barrier_violation(const OperatorSet& ops, const Vector& u, const CurvaturePair& target, bool upper);

/// Monotone scheme (L + C) u_{k+1} = L u_k - G(u_k) + C u_k started at the
/// upper barrier, C diagonal and large enough to make the right side
/// increasing on [lower, upper].
SolveReport monotone_iteration(const Mesh& mesh, const BackgroundGeometry& bg, const CurvaturePair& target,
                               const ScalarField& lower, const ScalarField& upper, const SolverConfig& cfg = {});

/// Upper barrier eps^{(n+2)/(n-2)} Psi + eps for the zero case with target
/// scalar curvature R (boundary target 0), eps halved from 1. The potential
/// solves Delta Psi = mean(R) - R; if no eps passes, Psi is rescaled by
/// c(n) = (n-2)/(4(n-1)) and the search repeated.
struct UpperBarrier {
    ScalarField u;
    double epsilon = 0.0;
    bool rescaled_potential = false;
    double violation = 0.0;
};
UpperBarrier zero_case_upper_barrier(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& r,
                                     const SolverConfig& cfg = {});

/// Lower barrier below `upper` for the same problem. First the closed form
/// u = e^{v}/a with
///   v = g (phi^{r^2} - r^r)^{1 - log(r)/r}
///       + (n-2)/4 log(g (r^2 - r log r) (1-r)^{-log(r)/r}),
/// m a^{4/(n-2)} = c(n), phi > 1 the first eigenfunction of
/// -Delta - m R (m doubled until its eigenvalue is negative); g and r are
/// scanned. If that never passes, the family u = g phi^r is scanned.
struct LowerBarrier {
    ScalarField u;
    double m = 0.0;
    double eigenvalue = 0.0;
    double gamma = 0.0;
    double r = 0.0;
    bool closed_form = false;
    double violation = 0.0;
    /// Smallest violation reached by the closed form.
    double closed_form_violation = 0.0;
};
LowerBarrier zero_case_lower_barrier(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& r,
                                     const ScalarField& upper, const SolverConfig& cfg = {});

struct SubcriticalParams {
    double gamma = 0.5;
    /// Defaults to the total background curvature of the surface (2 pi chi
    /// for an angle-defect background).
    std::optional<double> constraint_constant;
};

/// Minimizes 1/2 int |grad u|^2 + int curvature-load u over
/// {sum W kappa e^{gamma u} = constraint}, with W the boundary (or interior)
/// mass, by eliminating the additive constant.
SolveReport minimize_subcritical(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& target,
                                 const SubcriticalParams& params, TargetSide side, const SolverConfig& cfg = {});

struct TransformResult {
    ScalarField w;
    double c = 0.0;
    double alpha = 0.0;
    /// 1 - e^{-c alpha} and 1.
    double lower_bound = 0.0;
    double upper_bound = 1.0;
    /// min over interior rows of (S w)_i (Delta w <= 0 holds when >= 0).
    double interior_min = 0.0;
    /// min over D0 rows of (S w)_i + Mb_i h_i w_i (must be > 0).
    double boundary_min = 0.0;
};

/// w = 1 - e^{-c (u + alpha)} with c halved from c0 until both discrete
/// inequalities hold. Throws SolverError below cfg.c_min.
TransformResult bound_solution_transform(const Mesh& mesh, const ScalarField& h, const ScalarField& u, double alpha,
                                         double c0, const SolverConfig& cfg = {});

/// Half the largest alpha keeping (S u)_i + Mb_i h_i (u_i + alpha) > 0 on the
/// D0 rows where h < 0 (1 if h >= 0 everywhere).
double admissible_shift(const Mesh& mesh, const ScalarField& h, const ScalarField& u);

/// H / sqrt(|R|) < 1 / sqrt(n (n-1)) at every vertex carrying both (R < 0
/// required); recorded only.
bool mixed_admissibility(int n, const ScalarField& r, const ScalarField& h);

} // namespace confcurv
