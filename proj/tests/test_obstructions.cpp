#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "confcurv/generators.hpp"
#include "confcurv/obstructions.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace confcurv;

namespace {

constexpr double kPi = std::numbers::pi;

double theta(const Mesh& m, int i) { return std::atan2(m.vertices()(i, 1), m.vertices()(i, 0)); }

ScalarField zeros_on(const Mesh& m, Support s) { return ScalarField::constant(s, m.num_vertices(), 0.0); }

template <class F>
ScalarField on_boundary(const Mesh& m, F f)
{
    ScalarField k = zeros_on(m, Support::Boundary);
    for (int i : m.boundary_vertices()) {
        k[i] = f(i);
    }
    return k;
}

bool outer(const Mesh& m, int i) { return m.vertices().row(i).norm() > 0.75; }

// Length of the polygon through the boundary vertices at radius > 0.75.
double outer_perimeter(const Mesh& m)
{
    double len = 0.0;
    for (Eigen::Index f = 0; f < m.num_boundary_facets(); ++f) {
        const int a = m.boundary_facets()(f, 0);
        const int b = m.boundary_facets()(f, 1);
        if (outer(m, a) && outer(m, b)) {
            len += (m.vertices().row(a) - m.vertices().row(b)).norm();
        }
    }
    return len;
}

// Midpoint rule in (z, phi) on the unit sphere, where the area element is
// dz dphi.
template <class F>
double sphere_quadrature(F f, int n = 2000)
{
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = -1.0 + (i + 0.5) * 2.0 / n;
        const double rho = std::sqrt(1.0 - z * z);
        for (int j = 0; j < n; ++j) {
            const double phi = (j + 0.5) * 2.0 * kPi / n;
            s += f(rho * std::cos(phi), rho * std::sin(phi), z);
        }
    }
    return s * (2.0 / n) * (2.0 * kPi / n);
}

double integral(const std::vector<IntegralCondition>& c, const std::string& name)
{
    for (const auto& e : c) {
        if (e.name == name) {
            return e.value;
        }
    }
    FAIL("missing integral " << name);
    return 0.0;
}

} // namespace

TEST_CASE("sign condition follows the Euler characteristic")
{
    const Mesh d = gen::disk(4);
    const ScalarField bump = on_boundary(d, [&](int i) { return std::cos(theta(d, i)); });
    const ScalarField pos = on_boundary(d, [](int) { return 2.0; });
    const ScalarField neg = on_boundary(d, [](int) { return -1.0; });
    CHECK(sign_condition(1, bump));
    CHECK_FALSE(sign_condition(0, pos));
    CHECK(sign_condition(-1, neg));
    CHECK(sign_condition(0, zeros_on(d, Support::Boundary)));
    CHECK_FALSE(sign_condition(1, neg));
    CHECK_FALSE(sign_condition(-1, pos));
    for (double s : {1e-9, 0.5, 3.0, 1e7}) {
        for (int chi : {-1, 0, 1}) {
            for (const ScalarField* f : {&bump, &pos, &neg}) {
                ScalarField g = *f;
                g.values *= s;
                CHECK(sign_condition(chi, g) == sign_condition(chi, *f));
            }
        }
    }
    // min(h, h') stays negative somewhere.
    ScalarField h = bump;
    h.values = bump.values.cwiseMin(pos.values);
    CHECK(negative_somewhere(h));
}

TEST_CASE("dead-band ignores rounding-level values")
{
    const Mesh d = gen::disk(3);
    ScalarField f = on_boundary(d, [](int) { return 1.0; });
    f[d.boundary_vertices().front()] = -1e-14;
    CHECK_FALSE(changes_sign(f));
    f[d.boundary_vertices().front()] = -1e-6;
    CHECK(changes_sign(f));
}

TEST_CASE("integral conditions")
{
    const Mesh a = gen::annulus(48);
    const BackgroundGeometry bg = BackgroundGeometry::from_angle_defects(a);
    const ScalarField k = on_boundary(a, [&](int i) { return outer(a, i) ? std::sin(theta(a, i)) - 0.1 : 0.0; });
    const auto c = integral_conditions(a, bg, k, TargetSide::Boundary);
    CHECK(integral(c, "total") == doctest::Approx(-0.1 * outer_perimeter(a)).epsilon(1e-10));
    CHECK(integral(c, "total") == doctest::Approx(-0.2 * kPi).epsilon(1e-2));
    CHECK(c.front().pass);

    const auto z = integral_conditions(a, bg, zeros_on(a, Support::Boundary), TargetSide::Boundary);
    for (const auto& e : z) {
        CHECK(e.pass);
    }
    CHECK(integral(z, "total") == 0.0);
    CHECK(integral(z, "identically_zero") == 1.0);

    const Mesh cube = gen::cube(4);
    const BackgroundGeometry flat = BackgroundGeometry::constant(cube, 0.0, 0.0);
    const auto r = integral_conditions(cube, flat, ScalarField::constant(Support::All, cube.num_vertices(), 1.0),
                                       TargetSide::Interior);
    CHECK(integral(r, "total") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_FALSE(r.front().pass);
}

TEST_CASE("positivity witness on the disk with kappa_0 = -1")
{
    const Mesh d = gen::disk(10);
    const BackgroundGeometry bg = BackgroundGeometry::constant(d, 0.0, -1.0);
    const PositivityWitness one =
        positivity_witness(d, bg, on_boundary(d, [](int) { return -1.0; }), AuxiliaryKind::BoundaryRobin);
    CHECK(one.positive);
    CHECK((one.field.values.array() - 1.0).abs().maxCoeff() < 1e-10);

    // Harmonic phi = 1 + c r sin(theta) with d_nu phi + phi = 1 - 0.1 sin(theta)
    // on the unit circle gives c = -0.05 and min phi = 0.95.
    const PositivityWitness w = positivity_witness(
        d, bg, on_boundary(d, [&](int i) { return -1.0 + 0.1 * std::sin(theta(d, i)); }), AuxiliaryKind::BoundaryRobin);
    CHECK(w.positive == (w.minimum > 0.0));
    CHECK(w.minimum == doctest::Approx(0.95).epsilon(1e-2));
}

TEST_CASE("Robin recipe produces a target without positive witness")
{
    const Mesh d = gen::disk(10);
    const BackgroundGeometry bg = BackgroundGeometry::constant(d, 0.0, -1.0);
    const ScalarField psi = on_boundary(d, [&](int i) { return std::sin(theta(d, i)); });
    const double alpha = 0.5;
    const ScalarField kappa = robin_recipe_target(d, bg, psi, alpha);

    const Vector ext = harmonic_extension(d, psi.values);
    const PositivityWitness w = positivity_witness(d, bg, kappa, AuxiliaryKind::BoundaryRobin);
    CHECK_FALSE(w.positive);
    CHECK((w.field.values - (ext.array() + alpha).matrix()).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(w.minimum == doctest::Approx(-0.5).epsilon(1e-6));

    const auto c = integral_conditions(d, bg, kappa, TargetSide::Boundary);
    CHECK(integral(c, "total") < 0.0);

    const ObstructionVerdict v = trichotomy_dispatch(d, bg, kappa, Problem::PC0);
    CHECK(v.verdict == Verdict::NotExists);
    CHECK(v.witnesses.at("positivity_minimum") < 0.0);

    const ObstructionVerdict ok = trichotomy_dispatch(d, bg, on_boundary(d, [](int) { return -1.0; }), Problem::PC0);
    CHECK(ok.verdict == Verdict::Exists);
    REQUIRE(ok.report.has_value());
    CHECK(ok.report->converged());
}

TEST_CASE("harmonic extension reproduces linear functions")
{
    const Mesh d = gen::disk(6);
    const Vector x = d.vertices().col(0);
    Vector b = Vector::Zero(d.num_vertices());
    for (int i : d.boundary_vertices()) {
        b[i] = x[i];
    }
    CHECK((harmonic_extension(d, b) - x).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("Kazdan-Warner-Escobar integral on the ball")
{
    const Mesh ball = gen::ball(14);
    REQUIRE(is_round_ball(ball));
    const ScalarField h(Support::Boundary, ball.vertices().col(0));
    const KillingField rot = rotation_field(ball, Eigen::Vector3d(1, 0, 0));
    const KillingField conf = conformal_translation_field(ball, Eigen::Vector3d(1, 0, 0));

    // Tangency at the boundary sphere.
    for (int i : ball.boundary_vertices()) {
        const Eigen::RowVectorXd y = ball.vertices().row(i);
        CHECK(std::abs(rot.vectors.row(i).dot(y)) < 1e-10);
        CHECK(std::abs(conf.vectors.row(i).dot(y)) < 1e-10);
    }

    CHECK(std::abs(kazdan_warner_escobar(ball, h, rot)) < 1e-6);
    CHECK(std::abs(kazdan_warner_escobar(ball, ScalarField::constant(Support::Boundary, ball.num_vertices(), 3.0), conf))
          < 1e-10);

    // <X, grad x_1> = 1 - x_1^2 for X = e_1 - x_1 x.
    const double oracle = sphere_quadrature([](double x, double, double) { return 1.0 - x * x; });
    CHECK(oracle == doctest::Approx(8.0 * kPi / 3.0).epsilon(1e-5));
    const double value = kazdan_warner_escobar(ball, h, conf);
    CHECK(value > 0.0);
    CHECK(std::abs(value - oracle) < 0.01 * oracle);

    // Bilinearity.
    const ScalarField h2(Support::Boundary, ball.vertices().col(1).array().square().matrix());
    ScalarField mix = h;
    mix.values = 2.0 * h.values - 3.0 * h2.values;
    const double lin_h = kazdan_warner_escobar(ball, mix, conf) - 2.0 * value + 3.0 * kazdan_warner_escobar(ball, h2, conf);
    CHECK(std::abs(lin_h) < 1e-12 * std::max(1.0, std::abs(value)));
    KillingField sum = conf;
    sum.vectors = 0.5 * conf.vectors + 4.0 * rot.vectors;
    const double lin_x =
        kazdan_warner_escobar(ball, h2, sum) - 0.5 * kazdan_warner_escobar(ball, h2, conf) - 4.0 * kazdan_warner_escobar(ball, h2, rot);
    CHECK(std::abs(lin_x) < 1e-12 * 10.0);

    CHECK_THROWS_AS(kazdan_warner_escobar(gen::cube(3), h, conf), PreconditionError);
}

TEST_CASE("Kazdan-Warner-Escobar integral on the disk")
{
    const Mesh d = gen::disk(12);
    const ScalarField h(Support::Boundary, d.vertices().col(0));
    const KillingField conf = conformal_translation_field(d, Eigen::Vector2d(1, 0));
    // int over the unit circle of 1 - x^2.
    CHECK(kazdan_warner_escobar(d, h, conf) == doctest::Approx(kPi).epsilon(1e-2));
    CHECK(std::abs(kazdan_warner_escobar(d, h, rotation_field(d, Eigen::VectorXd()))) < 1e-6);
}

TEST_CASE("dispatch: surfaces")
{
    const Mesh d = gen::disk(8);
    const BackgroundGeometry bg = BackgroundGeometry::from_angle_defects(d);
    const ObstructionVerdict neg = trichotomy_dispatch(d, bg, on_boundary(d, [](int) { return -1.0; }), Problem::PC0);
    CHECK(neg.verdict == Verdict::NotExists);
    CHECK(neg.theorem == "gauss-bonnet-sign-condition");
    CHECK(neg.witnesses.at("sign_condition") == 0.0);
    CHECK(neg.witnesses.at("euler_characteristic_background") == 1.0);

    const ScalarField lin = on_boundary(d, [&](int i) { return d.vertices()(i, 0) + 2.0; });
    const ObstructionVerdict kw = trichotomy_dispatch(d, bg, lin, Problem::PC0);
    CHECK(kw.verdict == Verdict::NotExists);
    CHECK(kw.theorem == "kazdan-warner-escobar-integral");
    CHECK(kw.witnesses.count("kwe_integral_x") == 1);

    const ObstructionVerdict flat = trichotomy_dispatch(d, bg, on_boundary(d, [](int) { return 1.0; }), Problem::PC0);
    CHECK(flat.verdict == Verdict::Unknown);

    const ObstructionVerdict ce = trichotomy_dispatch(d, bg, lin, Problem::CE0);
    CHECK(ce.verdict == Verdict::Exists);
    CHECK_FALSE(ce.assumptions_checked.empty());

    const Mesh a = gen::annulus(48);
    const BackgroundGeometry abg = BackgroundGeometry::from_angle_defects(a);
    const ScalarField k = on_boundary(a, [&](int i) { return outer(a, i) ? std::sin(theta(a, i)) - 0.1 : 0.0; });
    const ObstructionVerdict v = trichotomy_dispatch(a, abg, k, Problem::PC0);
    CHECK(v.verdict == Verdict::Exists);
    CHECK(v.theorem == "euler-zero-weighted-integral-criterion");
    REQUIRE(v.report.has_value());
    CHECK(v.report->converged());

    const ObstructionVerdict pos = trichotomy_dispatch(a, abg, on_boundary(a, [](int) { return 1.0; }), Problem::PC0);
    CHECK(pos.verdict == Verdict::NotExists);
}

TEST_CASE("dispatch: dimension three")
{
    const Mesh cube = gen::cube(4);
    const BackgroundGeometry hneg = BackgroundGeometry::constant(cube, 0.0, -1.0);
    const ScalarField hpos = on_boundary(cube, [](int) { return 0.5; });
    const ObstructionVerdict ce = trichotomy_dispatch(cube, hneg, hpos, Problem::CE0);
    CHECK(ce.witnesses.at("lambda1_sign") == -1.0);
    CHECK(ce.verdict == Verdict::NotExists);
    CHECK(ce.theorem == "negative-eigenvalue-ce-characterization");

    // Negative target and background: constant barriers.
    const ScalarField half = on_boundary(cube, [](int) { return -0.5; });
    const ObstructionVerdict pc = trichotomy_dispatch(cube, hneg, half, Problem::PC0);
    CHECK(pc.verdict == Verdict::Exists);
    REQUIRE(pc.report.has_value());
    CHECK(pc.report->converged());

    const BackgroundGeometry flat = BackgroundGeometry::constant(cube, 0.0, 0.0);
    ScalarField r = ScalarField::constant(Support::All, cube.num_vertices(), 0.0);
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        r[i] = std::max(0.0, 0.3 - (cube.vertices().row(i) - Eigen::RowVector3d(0.5, 0.5, 0.5)).norm());
    }
    const ObstructionVerdict zero = trichotomy_dispatch(cube, flat, r, Problem::PC);
    CHECK(zero.witnesses.at("lambda1_sign") == 0.0);
    CHECK(zero.verdict == Verdict::NotExists);

    const Mesh ball = gen::ball(6);
    const BackgroundGeometry round = BackgroundGeometry::constant(ball, 0.0, 1.0);
    const ScalarField lin = on_boundary(ball, [&](int i) { return ball.vertices()(i, 0) + 2.0; });
    const ObstructionVerdict kw = trichotomy_dispatch(ball, round, lin, Problem::PC0);
    CHECK(kw.verdict == Verdict::NotExists);
    CHECK(kw.theorem == "kazdan-warner-escobar-integral");
    const ObstructionVerdict constant =
        trichotomy_dispatch(ball, round, on_boundary(ball, [](int) { return 2.0; }), Problem::PC0);
    CHECK(constant.verdict == Verdict::Unknown);
}

TEST_CASE("dispatch agrees with the constrained solver on random annulus targets")
{
    const Mesh a = gen::annulus(32);
    const BackgroundGeometry bg = BackgroundGeometry::from_angle_defects(a);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DispatchOptions opts;
    opts.solver.tol = 1e-8;
    for (int trial = 0; trial < 12; ++trial) {
        const double c0 = u(rng), c1 = u(rng), s1 = u(rng), c2 = u(rng), shift = 0.6 * u(rng);
        const ScalarField k = on_boundary(a, [&](int i) {
            const double t = theta(a, i);
            return shift + c0 * (outer(a, i) ? 1.0 : -1.0) + c1 * std::cos(t) + s1 * std::sin(t) + c2 * std::cos(2 * t);
        });
        const ObstructionVerdict v = trichotomy_dispatch(a, bg, k, Problem::PC0, opts);
        const SolveReport rep = minimize_constrained(a, bg, k, TargetSide::Boundary, opts.solver);
        if (rep.converged()) {
            CHECK(v.verdict != Verdict::NotExists);
        }
        if (v.report) {
            CHECK(v.report->converged());
        }
    }
}

TEST_CASE("names round-trip")
{
    for (Problem p : {Problem::PC, Problem::PC0, Problem::CE, Problem::CE0}) {
        CHECK(problem_from_string(to_string(p)) == p);
    }
    CHECK_THROWS_AS(problem_from_string("PX"), PreconditionError);
    CHECK(to_string(Verdict::NotExists) == "NotExists");
}
