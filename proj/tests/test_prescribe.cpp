#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "confcurv/fem.hpp"
#include "confcurv/generators.hpp"
#include "confcurv/prescribe.hpp"
#include "confcurv/spectral.hpp"
#include "test_support.hpp"

#include <cmath>
#include <numbers>

using namespace confcurv;

namespace {

constexpr double kPi = std::numbers::pi;

double theta(const Mesh& m, int i)
{
    const Eigen::RowVectorXd c = m.centroid();
    return std::atan2(m.vertices()(i, 1) - c(1), m.vertices()(i, 0) - c(0));
}

ScalarField zeros(const Mesh& m) { return ScalarField::constant(Support::All, m.num_vertices(), 0.0); }

ScalarField boundary_field(const Mesh& m, double (*f)(double))
{
    ScalarField k = ScalarField::constant(Support::Boundary, m.num_vertices(), 0.0);
    for (int i : m.boundary_vertices()) {
        k[i] = f(theta(m, i));
    }
    return k;
}

// Outer circle of the annulus only.
ScalarField outer_field(const Mesh& m, double (*f)(double))
{
    ScalarField k = ScalarField::constant(Support::Boundary, m.num_vertices(), 0.0);
    for (int i : m.boundary_vertices()) {
        if (m.vertices().row(i).norm() > 0.75) {
            k[i] = f(theta(m, i));
        }
    }
    return k;
}

} // namespace

TEST_CASE("newton: fixed point and constant rescaling of the disk")
{
    const Mesh disk = gen::disk(8);
    const BackgroundGeometry bg = BackgroundGeometry::from_angle_defects(disk);
    const CurvaturePair here = eval_F(disk, bg, zeros(disk));
    const SolveReport fixed = newton_solve(disk, bg, here, zeros(disk));
    CHECK(fixed.converged());
    CHECK(fixed.iterations <= 1);
    CHECK(fixed.u.values.cwiseAbs().maxCoeff() < 1e-12);

    // kappa_g = 1: u = c gives boundary curvature e^{-c}.
    const BackgroundGeometry unit = BackgroundGeometry::constant(disk, 0.0, 1.0);
    const OperatorSet ops = assemble_operators(disk, unit);
    const CurvaturePair two = make_target(ops, Vector::Zero(disk.num_vertices()),
                                          Vector::Constant(disk.num_vertices(), 2.0));
    SolverConfig tight;
    tight.tol = 1e-11;
    const SolveReport r = newton_solve(disk, unit, two, zeros(disk), tight);
    REQUIRE(r.converged());
    CHECK((r.u.values.array() + std::log(2.0)).abs().maxCoeff() < 1e-8);

    const CurvaturePair negative = make_target(ops, Vector::Zero(disk.num_vertices()),
                                               Vector::Constant(disk.num_vertices(), -1.0));
    const SolveReport bad = newton_solve(disk, unit, negative, zeros(disk));
    CHECK_FALSE(bad.converged());
    CHECK((bad.status == SolveStatus::Diverged || bad.status == SolveStatus::SingularJacobian));
}

TEST_CASE("newton with the perturbation fallback on the flat cylinder")
{
    const Mesh cyl = gen::cylinder(32, 2.0);
    const BackgroundGeometry bg = BackgroundGeometry::from_angle_defects(cyl);
    const OperatorSet ops = assemble_operators(cyl, bg);
    CHECK(smallest_singular_value(assemble_linearization(ops, Vector::Zero(cyl.num_vertices()))).value < 1e-8);

    const PerturbationResult p = perturb_until_invertible(cyl, bg, zeros(cyl));
    CHECK(p.branch == "boundary-distance");
    CHECK(p.sigma_min > 1e-4);
    CHECK(smallest_singular_value(assemble_linearization(ops, p.u.values)).value > 1e-4);

    const ScalarField k = boundary_field(cyl, [](double t) { return std::sin(t) - 0.1; });
    const CurvaturePair target = make_target(ops, Vector::Zero(cyl.num_vertices()), k.values);
    const SolveReport r = newton_solve(cyl, bg, target, zeros(cyl));
    CHECK(r.converged());
    CHECK(r.residual_interior < 1e-6);
    CHECK(r.residual_boundary < 1e-6);
    CHECK(r.perturbation_used.has_value());
}

TEST_CASE("perturbation: nonconstant kernel and the invertible guard")
{
    // K_g = -1 inside, kappa_g = lowest eigenvalue of (S + 2 M, Mb): the
    // Jacobian at 0 is S + 2M - kappa Mb, whose kernel is that eigenvector.
    const Mesh disk = gen::disk(6);
    BackgroundGeometry bg = BackgroundGeometry::constant(disk, -1.0, 0.0);
    const OperatorSet ops0 = assemble_operators(disk, bg);
    Vector mi = ops0.mass_interior;
    for (Eigen::Index i = 0; i < mi.size(); ++i) {
        if (ops0.mass_boundary[i] > 0.0) {
            mi[i] = 0.0;
        }
    }
    const SparseMatrix k = ops0.stiffness + SparseMatrix(Vector(2.0 * mi).asDiagonal());
    const GeneralizedPair pair = lowest_generalized_eigenpair(k, ops0.mass_boundary);
    for (int i : disk.boundary_vertices()) {
        bg.boundary_curvature[i] = pair.value;
    }
    const OperatorSet ops = assemble_operators(disk, bg);
    REQUIRE(smallest_singular_value(assemble_linearization(ops, Vector::Zero(disk.num_vertices()))).value < 1e-8);
    const PerturbationResult p = perturb_until_invertible(disk, bg, zeros(disk));
    CHECK(p.branch == "bump-laplacian");
    CHECK(p.sigma_min > 1e-4);

    CHECK_THROWS_AS(perturb_until_invertible(disk, BackgroundGeometry::constant(disk, -1.0, 0.5), zeros(disk)),
                    PreconditionError);
}

TEST_CASE("boundary distance")
{
    const Mesh disk = gen::disk(4);
    const Vector d = boundary_distance(disk);
    for (int i : disk.boundary_vertices()) {
        CHECK(d[i] == 0.0);
    }
    CHECK(d.maxCoeff() == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("constrained minimization on the flat annulus")
{
    const Mesh ann = gen::annulus(48);
    const BackgroundGeometry bg = BackgroundGeometry::from_angle_defects(ann);
    const ScalarField k = outer_field(ann, [](double t) { return std::sin(t) - 0.1; });
    const SolveReport r = minimize_constrained(ann, bg, k, TargetSide::Boundary);
    REQUIRE(r.converged());
    CHECK(r.residual_interior < 1e-6);
    CHECK(r.residual_boundary < 1e-6);
    REQUIRE(r.multipliers.has_value());
    CHECK(r.multipliers->second < 0.0);
    const OperatorSet ops = assemble_operators(ann, bg);
    const double identity = (ops.mass_boundary.array() * k.values.array() * r.u.values.array().exp()).sum();
    CHECK(std::abs(identity) < 1e-6);

    const ScalarField positive = outer_field(ann, [](double t) { return 1.0 + 0.5 * std::sin(t); });
    CHECK(minimize_constrained(ann, bg, positive, TargetSide::Boundary).status == SolveStatus::NotAdmissible);

    // Geodesic boundary: the flat metric already has the target.
    const SolveReport zero = minimize_constrained(ann, BackgroundGeometry::constant(ann, 0.0, 0.0),
                                                  ScalarField::constant(Support::Boundary, ann.num_vertices(), 0.0),
                                                  TargetSide::Boundary);
    CHECK(zero.converged());
    CHECK(zero.u.values.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("auxiliary linear problems")
{
    const Mesh disk = gen::disk(8);
    const BackgroundGeometry robin = BackgroundGeometry::constant(disk, 0.0, -1.0);
    const AuxiliaryResult one = solve_auxiliary_linear(
        disk, robin, AuxiliaryKind::BoundaryRobin, ScalarField::constant(Support::Boundary, disk.num_vertices(), -1.0));
    CHECK((one.field.values.array() - 1.0).abs().maxCoeff() < 1e-10);
    CHECK(one.positive);

    const Mesh ann = gen::annulus(32);
    const BackgroundGeometry bg = BackgroundGeometry::from_angle_defects(ann);
    const AuxiliaryResult v = solve_auxiliary_linear(ann, bg, AuxiliaryKind::BoundaryFluxPotential, zeros(ann));
    CHECK(v.residual < 1e-8);
    // Delta v = 0 inside and the flux balances the boundary curvature.
    const OperatorSet ops = assemble_operators(ann, bg);
    const Vector sv = ops.stiffness * v.field.values;
    const double kbar = ops.curvature_load_boundary.sum() / ops.mass_boundary.sum();
    for (Eigen::Index i = 0; i < ann.num_vertices(); ++i) {
        const double want = ops.mass_boundary[i] > 0.0
                                ? ops.curvature_load_boundary[i] - kbar * ops.mass_boundary[i]
                                : 0.0;
        CHECK(std::abs(sv[i] - want) < 1e-8);
    }

    for (AuxiliaryKind kind : {AuxiliaryKind::BoundaryRobin, AuxiliaryKind::InteriorHelmholtz,
                               AuxiliaryKind::BoundaryFluxPotential, AuxiliaryKind::InteriorPotential,
                               AuxiliaryKind::MeanCurvatureRobin, AuxiliaryKind::ScalarHelmholtz,
                               AuxiliaryKind::ScalarPotential}) {
        CHECK(auxiliary_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_THROWS(auxiliary_kind_from_string("nope"));
}

TEST_CASE("monotone iteration between constant barriers on the cube")
{
    // H_0 = -1 on every face, target H = -1/2: the constants above sqrt 2 are
    // super-solutions, those below are sub-solutions, and sqrt 2 solves.
    const Mesh cube = gen::cube(4);
    const BackgroundGeometry bg = BackgroundGeometry::constant(cube, 0.0, -1.0);
    const OperatorSet ops = assemble_operators(cube, bg);
    const Eigen::Index nv = cube.num_vertices();
    const CurvaturePair target = make_target(ops, Vector::Zero(nv), Vector::Constant(nv, -0.5));
    const ScalarField lower = ScalarField::constant(Support::All, nv, 0.5);
    const ScalarField upper = ScalarField::constant(Support::All, nv, 2.0);
    CHECK(barrier_violation(ops, lower.values, target, false) <= 0.0);
    CHECK(barrier_violation(ops, upper.values, target, true) <= 0.0);
    CHECK(barrier_violation(ops, lower.values, target, true) > 0.0);

    SolverConfig tight;
    tight.tol = 1e-11;
    const SolveReport r = monotone_iteration(cube, bg, target, lower, upper, tight);
    REQUIRE(r.converged());
    CHECK((r.u.values.array() - std::sqrt(2.0)).abs().maxCoeff() < 1e-6);

    CHECK_THROWS_AS(monotone_iteration(cube, bg, target, upper, lower), PreconditionError);
    CHECK_THROWS_AS(monotone_iteration(cube, bg, target, lower, ScalarField::constant(Support::All, nv, 1.0)),
                    PreconditionError);
}

TEST_CASE("zero-case barriers on the cube")
{
    const Mesh cube = gen::cube(6);
    const BackgroundGeometry bg = BackgroundGeometry::constant(cube, 0.0, 0.0);
    const Eigen::Index nv = cube.num_vertices();
    ScalarField r = ScalarField::constant(Support::All, nv, 0.0);
    for (Eigen::Index i = 0; i < nv; ++i) {
        r[i] = -0.5 + std::exp(-(cube.vertices().row(i).array() - 0.5).matrix().squaredNorm() / 0.02);
    }
    const UpperBarrier up = zero_case_upper_barrier(cube, bg, r);
    CHECK(up.violation <= 1e-10);
    CHECK(up.u.values.minCoeff() > 0.0);

    // A nearly constant field is no sub-solution where R < 0.
    const OperatorSet ops = assemble_operators(cube, bg);
    const CurvaturePair target = make_target(ops, r.values, Vector::Zero(nv));
    CHECK(barrier_violation(ops, Vector::Constant(nv, 0.01), target, false) > 0.1);
}

TEST_CASE("subcritical minimization on the disk")
{
    const Mesh disk = gen::disk(10);
    const BackgroundGeometry unit = BackgroundGeometry::constant(disk, 0.0, 1.0);
    const ScalarField one = ScalarField::constant(Support::Boundary, disk.num_vertices(), 1.0);
    const SolveReport flat = minimize_subcritical(disk, unit, one, {0.5, std::nullopt}, TargetSide::Boundary);
    REQUIRE(flat.converged());
    CHECK(flat.u.values.cwiseAbs().maxCoeff() < 1e-8);

    const BackgroundGeometry bg = BackgroundGeometry::from_angle_defects(disk);
    const ScalarField k = boundary_field(disk, [](double t) { return 1.0 + 0.3 * std::cos(t); });
    const OperatorSet ops = assemble_operators(disk, bg);
    for (double gamma : {0.3, 0.5, 0.8}) {
        const SolveReport r = minimize_subcritical(disk, bg, k, {gamma, 2 * kPi}, TargetSide::Boundary);
        REQUIRE(r.converged());
        const double constraint =
            (ops.mass_boundary.array() * k.values.array() * (gamma * r.u.values.array()).exp()).sum();
        CHECK(std::abs(constraint - 2 * kPi) < 1e-6);
    }

    const ScalarField negative = ScalarField::constant(Support::Boundary, disk.num_vertices(), -1.0);
    CHECK(minimize_subcritical(disk, bg, negative, {0.5, 2 * kPi}, TargetSide::Boundary).status ==
          SolveStatus::NotAdmissible);
}

TEST_CASE("bounded solution transform")
{
    const Mesh disk = gen::disk(6);
    const ScalarField h = ScalarField::constant(Support::Boundary, disk.num_vertices(), 1.0);
    const ScalarField v = ScalarField::constant(Support::All, disk.num_vertices(), 1.0);
    const TransformResult t = bound_solution_transform(disk, h, v, 0.0, 1.0);
    CHECK(t.c == 1.0);
    CHECK((t.w.values.array() - (1.0 - std::exp(-1.0))).abs().maxCoeff() < 1e-14);
    CHECK(t.boundary_min > 0.0);

    const ScalarField bad = ScalarField::constant(Support::Boundary, disk.num_vertices(), -5.0);
    CHECK_THROWS_AS(bound_solution_transform(disk, bad, v, 0.0, 1.0), SolverError);

    // Positive sigma1 eigenfunction on a half-cylinder: harmonic inside with
    // d_nu v + h v > 0 on the D0 circle.
    const int around = 48;
    const Mesh half = gen::half_cylinder(around, 16 * 2 * kPi / around);
    const ScalarField hh = boundary_field(half, [](double s) { return 0.7 + std::sin(s); });
    const EigenResult s = sigma1_domain(half, hh);
    REQUIRE(s.value > 0.0);
    const double alpha = admissible_shift(half, hh, s.eigenfunction);
    CHECK(alpha > 0.0);
    const TransformResult w = bound_solution_transform(half, hh, s.eigenfunction, alpha, 1.0);
    CHECK(w.interior_min >= 0.0);
    CHECK(w.boundary_min > 0.0);
    CHECK(w.lower_bound > 0.0);
    CHECK(w.w.values.minCoeff() > w.lower_bound);
    CHECK(w.w.values.maxCoeff() < 1.0);
}

TEST_CASE("mixed admissibility")
{
    const Mesh cube = gen::cube(2);
    const Eigen::Index nv = cube.num_vertices();
    const ScalarField r = ScalarField::constant(Support::All, nv, -6.0);
    CHECK(mixed_admissibility(3, r, ScalarField::constant(Support::Boundary, nv, 0.5)));
    CHECK_FALSE(mixed_admissibility(3, r, ScalarField::constant(Support::Boundary, nv, 1.5)));
}
