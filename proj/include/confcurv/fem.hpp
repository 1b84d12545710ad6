#pragma once

#include "confcurv/mesh.hpp"

#include <vector>

namespace confcurv {

/// Exponents of the conformal Laplacian pair in dimension n >= 3.
struct DimensionConstants {
    int n = 3;
    double a = 0.0;     ///< (n+2)/(n-2)
    double b = 0.0;     ///< n/(n-2)
    double beta = 0.0;  ///< 2/(n-2)
    double alpha = 0.0; ///< 2(n-1) beta = 4(n-1)/(n-2)
    double c_n = 0.0;   ///< (n-2)/(4(n-1)) = 1/alpha

    /// Throws DimensionError for n < 3.
    static DimensionConstants of(int n);
};

/// P1 finite-element operators on a mesh with a background.
///
/// Mass matrices are lumped and stored as diagonals. The boundary mass only
/// sees D0 facets. Rows whose boundary mass is positive are "boundary rows";
/// all others (true interior and DM-only vertices) are "interior rows".
struct OperatorSet {
    int n = 2;
    SparseMatrix stiffness;
    Vector mass_interior;
    Vector mass_boundary;
    /// mass_interior .* K_g (or R_g), every vertex.
    Vector curvature_load_interior;
    /// mass_boundary .* kappa_g (or H_g).
    Vector curvature_load_boundary;
    std::vector<bool> boundary_rows;
    /// Edges whose cotangent weight is negative (non-Delaunay); kept as is.
    int negative_weight_edges = 0;
};

OperatorSet assemble_operators(const Mesh& mesh, const BackgroundGeometry& bg);

/// Stiffness matrix alone, from edge lengths.
SparseMatrix assemble_stiffness(const Mesh& mesh);

/// (T(u), Q(u)) as pointwise densities. `interior` lives on interior rows,
/// `boundary` on boundary rows; both are full length with zeros elsewhere.
///
/// n=2: T_i = e^{-2u_i} ((Su)_i + M_i K_i) / M_i,
///      Q_i = e^{-u_i} ((Su)_i + Mb_i kappa_i) / Mb_i.
/// n=3: T_i = u_i^{-a} (alpha (Su)_i + M_i R_i u_i) / M_i,
///      Q_i = u_i^{-b} (beta (Su)_i + Mb_i H_i u_i) / Mb_i.
struct CurvaturePair {
    ScalarField interior;
    ScalarField boundary;

    /// Interior values on interior rows, boundary values on boundary rows.
    Vector stacked() const { return interior.values + boundary.values; }
};

CurvaturePair eval_F(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& u);
CurvaturePair eval_F(const OperatorSet& ops, const Vector& u);

/// Weak residual of F(u) = (f, h): interior rows carry
/// (Su)_i + M_i K_i - M_i f_i e^{2u_i} (n=2) and boundary rows
/// (Su)_i + Mb_i kappa_i - Mb_i h_i e^{u_i}; for n=3 the rows are
/// alpha(Su)_i + M_i R_i u_i - M_i f_i u_i^a and
/// (alpha/beta)(beta(Su)_i + Mb_i H_i u_i - Mb_i h_i u_i^b).
Vector weak_residual(const OperatorSet& ops, const Vector& u, const Vector& f, const Vector& h);

/// Jacobian of F at u.
///
/// `coupled` is the symmetric Jacobian of the weak residual: interior rows
/// from A, boundary rows from B. The Jacobian of the density map eval_F is
/// diag(row_scale) * coupled. A and B are full square matrices; only their
/// interior (resp. boundary) rows enter `coupled`.
struct LinearizedOperator {
    SparseMatrix A;
    SparseMatrix B;
    SparseMatrix coupled;
    Vector row_scale;
    std::vector<bool> boundary_rows;
};

/// Newton steps on F(u) = (f, h) solve coupled * du = -weak_residual(u).
LinearizedOperator assemble_linearization(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& u);
LinearizedOperator assemble_linearization(const OperatorSet& ops, const Vector& u);

struct SingularPair {
    double value = 0.0;
    /// Unit right singular vector for the smallest singular value.
    Vector vector;
    int iterations = 0;
};

/// Smallest singular value by inverse iteration on C^T C with a sparse LU of
/// C. A structurally or numerically singular factorization gives 0. Throws
/// SolverError if the iteration does not settle within `max_iterations`.
SingularPair smallest_singular_value(const SparseMatrix& c, int max_iterations = 500, double tol = 1e-10);
SingularPair smallest_singular_value(const LinearizedOperator& l);

/// Throws PreconditionError unless u is finite, sized to the mesh, and (for
/// n >= 3) positive.
void check_conformal_factor(int n, const Vector& u, Eigen::Index num_vertices);

} // namespace confcurv
