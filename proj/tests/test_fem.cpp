#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "confcurv/fem.hpp"
#include "confcurv/generators.hpp"
#include "confcurv/geometry.hpp"
#include "test_support.hpp"

#include <numbers>

using namespace confcurv;

namespace {

constexpr double kPi = std::numbers::pi;

ScalarField field(const Vector& v) { return ScalarField(Support::All, v); }

double sup(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

// Background with random smooth curvature fields.
BackgroundGeometry random_background(const Mesh& m, unsigned seed)
{
    BackgroundGeometry bg = BackgroundGeometry::constant(m, 0.0, 0.0);
    bg.interior_curvature.values = testsupport::smooth_random(m, 1.0, seed);
    const Vector h = testsupport::smooth_random(m, 1.0, seed + 1000);
    for (int i : m.boundary_vertices()) {
        bg.boundary_curvature[i] = h[i];
    }
    return bg;
}

// Relative finite-difference error of the density Jacobian along v.
double fd_error(const OperatorSet& ops, const Vector& u, const Vector& v)
{
    const double eps = 1e-6;
    const LinearizedOperator lin = assemble_linearization(ops, u);
    const Vector exact = lin.row_scale.cwiseProduct(lin.coupled * v);
    const Vector fd = (eval_F(ops, u + eps * v).stacked() - eval_F(ops, u).stacked()) / eps;
    return (fd - exact).norm() / exact.norm();
}

} // namespace

TEST_CASE("dimension constants")
{
    const auto k3 = DimensionConstants::of(3);
    CHECK(k3.a == doctest::Approx(5.0));
    CHECK(k3.b == doctest::Approx(3.0));
    CHECK(k3.beta == doctest::Approx(2.0));
    CHECK(k3.alpha == doctest::Approx(8.0));
    CHECK(k3.c_n * k3.alpha == doctest::Approx(1.0));
    for (int n = 3; n <= 8; ++n) {
        const auto k = DimensionConstants::of(n);
        CHECK(k.alpha == doctest::Approx(4.0 * (n - 1) / (n - 2)));
        CHECK(k.c_n * k.alpha == doctest::Approx(1.0));
        CHECK(k.a > 0);
        CHECK(k.b > 0);
    }
    CHECK_THROWS_AS(DimensionConstants::of(2), DimensionError);
}

TEST_CASE("stiffness reproduces the Dirichlet energy of a linear field")
{
    const Mesh sq = gen::rectangle(7, 5);
    const OperatorSet ops = assemble_operators(sq, BackgroundGeometry::constant(sq, 0, 0));
    const Vector x = sq.vertices().col(0);
    CHECK(x.dot(ops.stiffness * x) == doctest::Approx(1.0).epsilon(1e-10));
    const Mesh cube = gen::cube(3);
    const Vector z = cube.vertices().col(2);
    CHECK(z.dot(assemble_stiffness(cube) * z) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("stiffness rows sum to zero and matrix is symmetric")
{
    for (const Mesh& m : {gen::disk(6), gen::annulus(24), gen::hemisphere(5), gen::cube(3), gen::ball(4)}) {
        const SparseMatrix s = assemble_stiffness(m);
        CHECK(sup(s * Vector::Ones(m.num_vertices())) < 1e-12);
        CHECK(SparseMatrix(s - SparseMatrix(s.transpose())).norm() < 1e-12 * s.norm());
        // Positive semidefinite along random directions.
        const Vector r = testsupport::uniform_random(m.num_vertices(), -1, 1, 5);
        CHECK(r.dot(s * r) >= 0.0);
    }
}

TEST_CASE("boundary mass of the unit disk approximates the perimeter")
{
    for (int rings : {8, 16, 32}) {
        const Mesh d = gen::disk(rings);
        const double h = 2 * kPi / (6 * rings);
        const double perimeter = d.boundary_vertex_measures().sum();
        CHECK(std::abs(perimeter - 2 * kPi) < h * h);
    }
}

TEST_CASE("cotangent weights are flagged, not clamped")
{
    const Mesh disk = gen::disk(5);
    CHECK(assemble_operators(disk, BackgroundGeometry::from_angle_defects(disk)).negative_weight_edges == 0);
    // A flat quad split along its long diagonal has an obtuse pair.
    Matrix v(4, 2);
    v << 0, 0, 1, 0, 1.2, 0.2, 0.2, 0.2;
    IndexMatrix c(2, 3);
    c << 0, 1, 2, 0, 2, 3;
    const Mesh quad(v, c);
    const OperatorSet ops = assemble_operators(quad, BackgroundGeometry::constant(quad, 0, 0));
    CHECK(ops.negative_weight_edges == 1);
    CHECK(sup(ops.stiffness * Vector::Ones(4)) < 1e-12);
}

TEST_CASE("eval_F at constant factors")
{
    const Mesh disk = gen::disk(6);
    const BackgroundGeometry flat = BackgroundGeometry::constant(disk, 0.0, 1.0);
    const Eigen::Index nv = disk.num_vertices();
    const CurvaturePair f0 = eval_F(disk, flat, field(Vector::Zero(nv)));
    for (int i : disk.boundary_vertices()) {
        CHECK(f0.boundary[i] == doctest::Approx(1.0));
    }
    CHECK(sup(f0.interior.values) < 1e-12);

    const double c = 0.7;
    const CurvaturePair fc = eval_F(disk, flat, field(Vector::Constant(nv, c)));
    for (int i : disk.boundary_vertices()) {
        CHECK(fc.boundary[i] == doctest::Approx(std::exp(-c)));
    }
    CHECK(sup(fc.interior.values) < 1e-12);

    // u = 0 returns the background densities.
    const BackgroundGeometry defects = BackgroundGeometry::from_angle_defects(gen::hemisphere(6));
    const Mesh hemi = gen::hemisphere(6);
    const CurvaturePair fh = eval_F(hemi, defects, field(Vector::Zero(hemi.num_vertices())));
    CHECK(sup(fh.interior.values - defects.interior_curvature.values) < 1e-12);
    CHECK(sup(fh.boundary.values - defects.boundary_curvature.values) < 1e-12);

    const Mesh cube = gen::cube(3);
    const CurvaturePair f3 = eval_F(cube, BackgroundGeometry::constant(cube, 0, 0),
                                    field(Vector::Ones(cube.num_vertices())));
    CHECK(sup(f3.stacked()) < 1e-12);

    CHECK_THROWS_AS(eval_F(cube, BackgroundGeometry::constant(cube, 0, 0), field(Vector::Zero(cube.num_vertices()))),
                    PreconditionError);
}

TEST_CASE("conformal covariance at constants (n=2)")
{
    const Mesh m = gen::annulus(24);
    const BackgroundGeometry bg = random_background(m, 3);
    const OperatorSet ops = assemble_operators(m, bg);
    const Vector u = testsupport::smooth_random(m, 0.8, 11);
    for (double c : {-1.3, 0.4, 2.0}) {
        const CurvaturePair base = eval_F(ops, u);
        const CurvaturePair shifted = eval_F(ops, (u.array() + c).matrix());
        CHECK(sup(shifted.boundary.values - std::exp(-c) * base.boundary.values) < 1e-12 * (1 + sup(base.boundary.values)));
        CHECK(sup(shifted.interior.values - std::exp(-2 * c) * base.interior.values) < 1e-12 * (1 + sup(base.interior.values)));
    }
}

TEST_CASE("scaling law (n=3)")
{
    const Mesh m = gen::cube(3);
    const OperatorSet ops = assemble_operators(m, random_background(m, 8));
    const Vector u = (testsupport::smooth_random(m, 0.5, 2).array() + 1.0).matrix();
    for (double s : {0.5, 1.7, 3.0}) {
        const CurvaturePair base = eval_F(ops, u);
        const CurvaturePair scaled = eval_F(ops, s * u);
        CHECK(sup(scaled.interior.values - std::pow(s, -4.0) * base.interior.values) < 1e-12 * sup(base.interior.values));
        CHECK(sup(scaled.boundary.values - std::pow(s, -2.0) * base.boundary.values) < 1e-12 * sup(base.boundary.values));
    }
}

TEST_CASE("jacobian matches finite differences (n=2 and n=3)")
{
    const Mesh m2 = gen::hemisphere(6);
    const OperatorSet ops2 = assemble_operators(m2, random_background(m2, 21));
    const Mesh m3 = gen::cube(3);
    const OperatorSet ops3 = assemble_operators(m3, random_background(m3, 22));
    for (unsigned seed = 0; seed < 10; ++seed) {
        const Vector u2 = testsupport::smooth_random(m2, 1.0, 100 + seed);
        const Vector v2 = testsupport::smooth_random(m2, 1.0, 200 + seed);
        CHECK(fd_error(ops2, u2, v2) < 1e-5);
        const Vector u3 = (testsupport::smooth_random(m3, 0.5, 300 + seed).array() + 1.0).matrix();
        const Vector v3 = testsupport::smooth_random(m3, 1.0, 400 + seed);
        CHECK(fd_error(ops3, u3, v3) < 1e-5);
    }
}

TEST_CASE("coupled jacobian is symmetric")
{
    const Mesh m = gen::ball(3);
    const OperatorSet ops = assemble_operators(m, random_background(m, 4));
    const Vector u = (testsupport::smooth_random(m, 0.5, 6).array() + 1.0).matrix();
    const LinearizedOperator lin = assemble_linearization(ops, u);
    CHECK(SparseMatrix(lin.coupled - SparseMatrix(lin.coupled.transpose())).norm() < 1e-12 * lin.coupled.norm());
    const Mesh d = gen::disk(5);
    const LinearizedOperator lin2 = assemble_linearization(assemble_operators(d, random_background(d, 9)),
                                                           testsupport::smooth_random(d, 1.0, 7));
    CHECK(SparseMatrix(lin2.coupled - SparseMatrix(lin2.coupled.transpose())).norm() < 1e-12 * lin2.coupled.norm());
}

TEST_CASE("linearization at trivial points")
{
    const Mesh cyl = gen::cylinder(16, 1.0);
    const BackgroundGeometry bg = BackgroundGeometry::from_angle_defects(cyl);
    const LinearizedOperator lin = assemble_linearization(cyl, bg, field(Vector::Zero(cyl.num_vertices())));
    CHECK(SparseMatrix(lin.coupled - assemble_stiffness(cyl)).norm() < 1e-12);
    const SingularPair sp = smallest_singular_value(lin);
    CHECK(sp.value < 1e-8);
    // The kernel is spanned by constants.
    CHECK(sp.vector.maxCoeff() - sp.vector.minCoeff() < 1e-6);

    const Mesh cube = gen::cube(2);
    const LinearizedOperator lin3 = assemble_linearization(cube, BackgroundGeometry::constant(cube, 0, 0),
                                                           field(Vector::Ones(cube.num_vertices())));
    CHECK(SparseMatrix(lin3.coupled - 8.0 * assemble_stiffness(cube)).norm() < 1e-12);
}

TEST_CASE("smallest singular value of simple matrices")
{
    SparseMatrix id(5, 5);
    id.setIdentity();
    CHECK(smallest_singular_value(id).value == doctest::Approx(1.0));
    SparseMatrix d(3, 3);
    d.insert(0, 0) = 4.0;
    d.insert(1, 1) = -0.5;
    d.insert(2, 2) = 2.0;
    CHECK(smallest_singular_value(d).value == doctest::Approx(0.5));
}
