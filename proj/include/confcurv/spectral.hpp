#pragma once

#include "confcurv/fem.hpp"

#include <optional>
#include <string>

namespace confcurv {

enum class EigenKind { Lambda1Lg, Sigma1Bg, Mu1Domain, Sigma1Domain, RobinMR };
enum class SignClass { Neg, Zero, Pos };

std::string to_string(EigenKind k);
std::string to_string(SignClass s);

struct EigenOptions {
    /// Zero-band for sign classification; defaults to
    /// max(1e-8, 10 h^2 |bg|_inf) with h the longest edge.
    std::optional<double> sign_tolerance;
    /// Support sizes up to this use a dense reduced solve.
    Eigen::Index dense_limit = 2000;
    int max_iterations = 1000;
    double convergence = 1e-12;
};

/// Lowest eigenpair. The eigenfunction has unit norm in the weight of the
/// problem and is positive (checked after a sign flip).
struct EigenResult {
    EigenKind kind = EigenKind::Lambda1Lg;
    double value = 0.0;
    ScalarField eigenfunction;
    SignClass sign_class = SignClass::Zero;
    double tolerance = 0.0;
    std::string method;
    int iterations = 0;
};

/// Lowest eigenpair of K x = lambda B x with K sparse symmetric and B a
/// non-negative diagonal. Rows where B vanishes are eliminated by a Schur
/// complement (harmonic extension). Small supports use a dense symmetric
/// solve; larger ones use shifted block inverse iteration with Rayleigh-Ritz.
struct GeneralizedPair {
    double value = 0.0;
    Vector vector;
    std::string method;
    int iterations = 0;
};
GeneralizedPair lowest_generalized_eigenpair(const SparseMatrix& k, const Vector& b, const EigenOptions& opts = {});

/// Rayleigh quotient t^T K t / t^T B t.
double rayleigh_quotient(const SparseMatrix& k, const Vector& b, const Vector& t);

/// lambda_1 of the interior operator with homogeneous boundary operator:
/// alpha S + diag(M R) + (alpha/beta) diag(Mb H) against M. For n=2 the
/// same construction with alpha = beta = 1 and (K_g, kappa_g).
EigenResult lambda1(const Mesh& mesh, const BackgroundGeometry& bg, const EigenOptions& opts = {});

/// Steklov-type sigma_1: interior operator annihilates phi, boundary operator
/// equals sigma phi. Weighted by the boundary mass.
EigenResult sigma1(const Mesh& mesh, const BackgroundGeometry& bg, const EigenOptions& opts = {});

/// min (u^T S u + sum_D0 h u^2) / sum_D0 u^2 with natural conditions on DM.
EigenResult sigma1_domain(const Mesh& mesh, const ScalarField& h, const EigenOptions& opts = {});

/// Lowest eigenvalue of -Delta + f with natural boundary conditions.
EigenResult mu1_domain(const Mesh& mesh, const ScalarField& f, const EigenOptions& opts = {});

/// mu1_domain with f = -m R, reported with kind RobinMR.
EigenResult robin_mR(const Mesh& mesh, const ScalarField& r, double m, const EigenOptions& opts = {});

/// Doubles m from m0 until robin_mR is negative; returns the first such m
/// and its eigenpair. Throws SolverError past m_max.
std::pair<double, EigenResult> robin_mR_negative(const Mesh& mesh, const ScalarField& r, double m0 = 1.0,
                                                 double m_max = 1e8, const EigenOptions& opts = {});

SignClass classify_sign(double value, double tol);

double default_sign_tolerance(const Mesh& mesh, const BackgroundGeometry& bg);

/// Zero-band for sigma1 matching a lambda1 band: scaled by
/// (beta/alpha) |M| / |dM_D0|, the ratio of the two quotients at constants.
double sigma1_sign_tolerance(const OperatorSet& ops, double lambda_tol);

/// The matrices behind lambda1 / sigma1 (K and the diagonal weight).
struct EigenSystem {
    SparseMatrix k;
    Vector b;
};
EigenSystem lambda1_system(const OperatorSet& ops);
EigenSystem sigma1_system(const OperatorSet& ops);

} // namespace confcurv
