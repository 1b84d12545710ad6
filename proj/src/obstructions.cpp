#include "confcurv/obstructions.hpp"

#include "confcurv/geometry.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace confcurv {

std::string to_string(Verdict v)
{
    switch (v) {
    case Verdict::Exists:
        return "Exists";
    case Verdict::NotExists:
        return "NotExists";
    case Verdict::Unknown:
        return "Unknown";
    }
    return "Unknown";
}

std::string to_string(Problem p)
{
    switch (p) {
    case Problem::PC:
        return "PC";
    case Problem::PC0:
        return "PC0";
    case Problem::CE:
        return "CE";
    case Problem::CE0:
        return "CE0";
    }
    return "PC";
}

Problem problem_from_string(const std::string& s)
{
    for (Problem p : {Problem::PC, Problem::PC0, Problem::CE, Problem::CE0}) {
        if (to_string(p) == s) {
            return p;
        }
    }
    throw PreconditionError("unknown problem '" + s + "' (expected PC, PC0, CE or CE0)");
}

bool prescribes_boundary(Problem p) { return p == Problem::PC0 || p == Problem::CE0; }

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Angle-defect curvature of a polygonal circle is constant only up to mesh
// irregularity.
constexpr double kRoundTolerance = 1e-2;

double sup(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double deadband(const ScalarField& t) { return 1e-12 * sup(t.values); }

// Boundary targets live on the D0 rows; interior targets on every vertex.
std::vector<bool> side_rows(const OperatorSet& ops, TargetSide side)
{
    if (side == TargetSide::Interior) {
        return std::vector<bool>(ops.boundary_rows.size(), true);
    }
    return ops.boundary_rows;
}

// Target with zeros outside the rows its equation lives on.
ScalarField restrict_to(const ScalarField& t, const std::vector<bool>& rows)
{
    ScalarField out(t.support, Vector::Zero(t.size()));
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        if (rows[static_cast<std::size_t>(i)]) {
            out[i] = t[i];
        }
    }
    return out;
}

Vector row_mass(const OperatorSet& ops, TargetSide side)
{
    return side == TargetSide::Boundary ? ops.mass_boundary : ops.mass_interior;
}

// Interior mass on the rows that carry the interior equation; the discrete
// Gauss-Bonnet identity and the potentials use this one.
Vector equation_mass(const OperatorSet& ops)
{
    Vector m = ops.mass_interior;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        if (ops.boundary_rows[static_cast<std::size_t>(i)]) {
            m[i] = 0.0;
        }
    }
    return m;
}

// Largest |field| over the given rows.
double sup_on(const Vector& v, const std::vector<bool>& rows)
{
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (rows[static_cast<std::size_t>(i)]) {
            s = std::max(s, std::abs(v[i]));
        }
    }
    return s;
}

// (min, max) over the given rows.
std::pair<double, double> range_on(const Vector& v, const std::vector<bool>& rows)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (rows[static_cast<std::size_t>(i)]) {
            lo = std::min(lo, v[i]);
            hi = std::max(hi, v[i]);
        }
    }
    return {lo, hi};
}

double curvature_scale(const BackgroundGeometry& bg) { return 1.0 + bg.sup_norm(); }

// The curvature that the problem keeps at zero vanishes on its rows.
bool vanishes_on(const Vector& curvature, const std::vector<bool>& rows, const BackgroundGeometry& bg)
{
    return sup_on(curvature, rows) <= 1e-8 * curvature_scale(bg);
}

bool constant_on(const Vector& curvature, const std::vector<bool>& rows, double* value, double tol = 1e-6)
{
    const auto [lo, hi] = range_on(curvature, rows);
    if (!std::isfinite(lo)) {
        return false;
    }
    *value = 0.5 * (lo + hi);
    return hi - lo <= tol * std::max(1.0, std::abs(*value));
}

ScalarField zeros(const Mesh& mesh) { return ScalarField::constant(Support::All, mesh.num_vertices(), 0.0); }

ScalarField scaled_by_exp(const ScalarField& t, const Vector& v, double p)
{
    ScalarField out = t;
    out.values = t.values.cwiseProduct((p * v).array().exp().matrix());
    return out;
}

void add_solver_note(ObstructionVerdict& out, const SolveReport& rep)
{
    out.witnesses["solver_residual_interior"] = rep.residual_interior;
    out.witnesses["solver_residual_boundary"] = rep.residual_boundary;
    if (rep.converged()) {
        out.report = rep;
    } else {
        out.assumptions_checked.push_back(rep.method + " did not converge (" + to_string(rep.status) +
                                          "); no report attached");
    }
}

} // namespace

bool identically_zero(const ScalarField& target) { return sup(target.values) == 0.0; }

bool positive_somewhere(const ScalarField& target)
{
    const double db = deadband(target);
    return (target.values.array() > db).any();
}

bool negative_somewhere(const ScalarField& target)
{
    const double db = deadband(target);
    return (target.values.array() < -db).any();
}

bool changes_sign(const ScalarField& target) { return positive_somewhere(target) && negative_somewhere(target); }

bool sign_condition(int chi, const ScalarField& target)
{
    if (chi > 0) {
        return positive_somewhere(target);
    }
    if (chi == 0) {
        return changes_sign(target) || identically_zero(target);
    }
    return negative_somewhere(target);
}

int background_euler_characteristic(const Mesh& mesh, const BackgroundGeometry& bg)
{
    if (bg.n != 2) {
        throw DimensionError("background Euler characteristic needs n = 2");
    }
    const OperatorSet ops = assemble_operators(mesh, bg);
    const Vector mi = equation_mass(ops);
    const double total = mi.dot(bg.interior_curvature.values) + ops.curvature_load_boundary.sum();
    return static_cast<int>(std::lround(total / kTwoPi));
}

std::vector<IntegralCondition> integral_conditions(const Mesh& mesh, const BackgroundGeometry& bg,
                                                   const ScalarField& target, TargetSide side)
{
    bg.validate(mesh);
    if (target.size() != mesh.num_vertices()) {
        throw PreconditionError("target must have one value per vertex");
    }
    const OperatorSet ops = assemble_operators(mesh, bg);
    const ScalarField t = restrict_to(target, side_rows(ops, side));
    const Vector w = row_mass(ops, side);
    std::vector<IntegralCondition> out;
    if (identically_zero(t)) {
        out.push_back({"total", 0.0, true});
        if (bg.n == 2) {
            out.push_back({"weighted", 0.0, true});
        }
        out.push_back({"identically_zero", 1.0, true});
        return out;
    }
    const double total = w.dot(t.values);
    out.push_back({"total", total, total < 0.0});
    if (bg.n == 2) {
        // Reduce to the constant-curvature background in the same class.
        double weighted = 0.0;
        if (side == TargetSide::Boundary) {
            const AuxiliaryResult v =
                solve_auxiliary_linear(mesh, bg, AuxiliaryKind::BoundaryFluxPotential, ScalarField());
            weighted = w.dot(scaled_by_exp(t, v.field.values, -1.0).values);
        } else {
            const AuxiliaryResult v = solve_auxiliary_linear(mesh, bg, AuxiliaryKind::InteriorPotential, ScalarField());
            weighted = w.dot(scaled_by_exp(t, v.field.values, 2.0).values);
        }
        out.push_back({"weighted", weighted, weighted < 0.0});
    }
    return out;
}

PositivityWitness positivity_witness(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& target,
                                     AuxiliaryKind kind)
{
    if (kind == AuxiliaryKind::BoundaryFluxPotential || kind == AuxiliaryKind::InteriorPotential
        || kind == AuxiliaryKind::ScalarPotential) {
        throw PreconditionError("positivity witness needs a Robin or Helmholtz problem");
    }
    const AuxiliaryResult r = solve_auxiliary_linear(mesh, bg, kind, target);
    PositivityWitness out;
    out.field = r.field;
    out.minimum = r.minimum;
    out.positive = r.positive;
    return out;
}

Vector harmonic_extension(const Mesh& mesh, const Vector& boundary_values)
{
    const Eigen::Index nv = mesh.num_vertices();
    if (boundary_values.size() != nv) {
        throw PreconditionError("boundary values must have one entry per vertex");
    }
    const Vector mb = mesh.boundary_vertex_measures(true);
    std::vector<Eigen::Index> free_index(static_cast<std::size_t>(nv), -1);
    Eigen::Index nf = 0;
    for (Eigen::Index i = 0; i < nv; ++i) {
        if (mb[i] <= 0.0) {
            free_index[static_cast<std::size_t>(i)] = nf++;
        }
    }
    if (nf == nv) {
        throw PreconditionError("harmonic extension needs a D0 boundary");
    }
    Vector out = Vector::Zero(nv);
    for (Eigen::Index i = 0; i < nv; ++i) {
        if (mb[i] > 0.0) {
            out[i] = boundary_values[i];
        }
    }
    if (nf == 0) {
        return out;
    }
    const SparseMatrix s = assemble_stiffness(mesh);
    std::vector<Triplet> trip;
    Vector rhs = Vector::Zero(nf);
    for (int k = 0; k < s.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(s, k); it; ++it) {
            const Eigen::Index r = free_index[static_cast<std::size_t>(it.row())];
            if (r < 0) {
                continue;
            }
            const Eigen::Index c = free_index[static_cast<std::size_t>(it.col())];
            if (c < 0) {
                rhs[r] -= it.value() * out[it.col()];
            } else {
                trip.emplace_back(r, c, it.value());
            }
        }
    }
    SparseMatrix a(nf, nf);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
    if (ldlt.info() != Eigen::Success) {
        throw SolverError("harmonic extension: interior block not factorizable");
    }
    const Vector x = ldlt.solve(rhs);
    for (Eigen::Index i = 0; i < nv; ++i) {
        const Eigen::Index r = free_index[static_cast<std::size_t>(i)];
        if (r >= 0) {
            out[i] = x[r];
        }
    }
    return out;
}

ScalarField robin_recipe_target(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& psi_boundary,
                                double alpha)
{
    bg.validate(mesh);
    if (bg.n != 2) {
        throw DimensionError("the Robin recipe is for surfaces");
    }
    const OperatorSet ops = assemble_operators(mesh, bg);
    const Vector& mb = ops.mass_boundary;
    // The recipe starts from boundary data of zero mean.
    Vector data = psi_boundary.values;
    const double mean = mb.dot(data) / mb.sum();
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        data[i] = mb[i] > 0.0 ? data[i] - mean : 0.0;
    }
    const Vector psi = harmonic_extension(mesh, data);
    const Vector spsi = ops.stiffness * psi;
    ScalarField kappa = ScalarField::constant(Support::Boundary, mesh.num_vertices(), 0.0);
    for (Eigen::Index i = 0; i < kappa.size(); ++i) {
        if (mb[i] > 0.0) {
            kappa[i] = -spsi[i] / mb[i] + bg.boundary_curvature[i] * (psi[i] + alpha);
        }
    }
    return kappa;
}

bool is_round_ball(const Mesh& mesh, double tol)
{
    const std::vector<bool> d0 = mesh.d0_vertex_mask();
    const Eigen::Index nv = mesh.num_vertices();
    Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(mesh.vertices().cols());
    int count = 0;
    for (Eigen::Index i = 0; i < nv; ++i) {
        if (d0[static_cast<std::size_t>(i)]) {
            c += mesh.vertices().row(i);
            ++count;
        }
    }
    if (count < mesh.dim() + 1 || mesh.vertices().cols() != mesh.dim()) {
        return false;
    }
    c /= count;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (Eigen::Index i = 0; i < nv; ++i) {
        if (d0[static_cast<std::size_t>(i)]) {
            const double r = (mesh.vertices().row(i) - c).norm();
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    }
    return hi > 0.0 && hi - lo <= tol * hi;
}

namespace {

struct Sphere {
    Eigen::RowVectorXd center;
    double radius = 0.0;
};

Sphere boundary_sphere(const Mesh& mesh)
{
    if (!is_round_ball(mesh)) {
        throw PreconditionError("mesh is not a round ball or disk");
    }
    const std::vector<bool> d0 = mesh.d0_vertex_mask();
    Sphere s;
    s.center = Eigen::RowVectorXd::Zero(mesh.vertices().cols());
    int count = 0;
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
        if (d0[static_cast<std::size_t>(i)]) {
            s.center += mesh.vertices().row(i);
            ++count;
        }
    }
    s.center /= count;
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
        if (d0[static_cast<std::size_t>(i)]) {
            s.radius += (mesh.vertices().row(i) - s.center).norm() / count;
        }
    }
    return s;
}

} // namespace

KillingField rotation_field(const Mesh& mesh, const Eigen::VectorXd& axis)
{
    const Sphere s = boundary_sphere(mesh);
    const int d = static_cast<int>(mesh.vertices().cols());
    KillingField out;
    out.kind = KillingKind::Rotation;
    out.vectors = Matrix::Zero(mesh.num_vertices(), d);
    Eigen::Vector3d a = Eigen::Vector3d::Zero();
    if (d == 3) {
        if (axis.size() != 3 || axis.norm() == 0.0) {
            throw PreconditionError("rotation axis must be a nonzero 3-vector");
        }
        a = axis.normalized();
        out.axis = a;
    } else {
        out.axis = Eigen::VectorXd::Zero(0);
    }
    const std::vector<bool> d0 = mesh.d0_vertex_mask();
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
        if (!d0[static_cast<std::size_t>(i)]) {
            continue;
        }
        const Eigen::RowVectorXd y = (mesh.vertices().row(i) - s.center) / s.radius;
        if (d == 3) {
            const Eigen::Vector3d x(y[0], y[1], y[2]);
            out.vectors.row(i) = a.cross(x).transpose();
        } else {
            out.vectors(i, 0) = -y[1];
            out.vectors(i, 1) = y[0];
        }
    }
    return out;
}

KillingField conformal_translation_field(const Mesh& mesh, const Eigen::VectorXd& direction)
{
    const Sphere s = boundary_sphere(mesh);
    const Eigen::Index d = mesh.vertices().cols();
    if (direction.size() != d || direction.norm() == 0.0) {
        throw PreconditionError("translation direction must be a nonzero vector of the ambient dimension");
    }
    KillingField out;
    out.kind = KillingKind::ConformalTranslation;
    out.axis = direction;
    out.vectors = Matrix::Zero(mesh.num_vertices(), d);
    const std::vector<bool> d0 = mesh.d0_vertex_mask();
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
        if (!d0[static_cast<std::size_t>(i)]) {
            continue;
        }
        const Eigen::VectorXd y = ((mesh.vertices().row(i) - s.center) / s.radius).transpose();
        out.vectors.row(i) = (direction - direction.dot(y) * y).transpose();
    }
    return out;
}

namespace {

// Sum of measure * <mean X, grad H> and of measure * |mean X| |grad H| over
// the D0 facets, gradients tangential to each facet.
std::pair<double, double> kwe_sums(const Mesh& mesh, const Vector& h, const Matrix& x)
{
    const IndexMatrix& facets = mesh.boundary_facets();
    const Matrix& p = mesh.vertices();
    const int k = static_cast<int>(facets.cols());
    double value = 0.0;
    double bound = 0.0;
    for (Eigen::Index f = 0; f < facets.rows(); ++f) {
        if (mesh.boundary_tags()[static_cast<std::size_t>(f)] != BoundaryTag::D0) {
            continue;
        }
        Matrix e(p.cols(), k - 1);
        Vector dh(k - 1);
        for (int j = 1; j < k; ++j) {
            e.col(j - 1) = (p.row(facets(f, j)) - p.row(facets(f, 0))).transpose();
            dh[j - 1] = h[facets(f, j)] - h[facets(f, 0)];
        }
        const Matrix gram = e.transpose() * e;
        const double measure = k == 2 ? std::sqrt(gram(0, 0)) : 0.5 * std::sqrt(gram.determinant());
        const Vector grad = e * gram.ldlt().solve(dh);
        Vector mean = Vector::Zero(p.cols());
        for (int j = 0; j < k; ++j) {
            mean += x.row(facets(f, j)).transpose();
        }
        mean /= k;
        value += measure * mean.dot(grad);
        bound += measure * mean.norm() * grad.norm();
    }
    return {value, bound};
}

} // namespace

double kazdan_warner_escobar(const Mesh& mesh, const ScalarField& h, const KillingField& x)
{
    boundary_sphere(mesh);
    if (h.size() != mesh.num_vertices() || x.vectors.rows() != mesh.num_vertices()
        || x.vectors.cols() != mesh.vertices().cols()) {
        throw PreconditionError("field sizes disagree with the mesh");
    }
    return kwe_sums(mesh, h.values, x.vectors).first;
}

namespace {

// Largest |integral| / Cauchy-Schwarz bound over the coordinate conformal
// translations. Rotations are divergence free and never obstruct.
double kwe_ratio(const Mesh& mesh, const ScalarField& h, std::map<std::string, double>& witnesses)
{
    const Eigen::Index d = mesh.vertices().cols();
    double worst = 0.0;
    const char* names[] = {"x", "y", "z"};
    for (Eigen::Index j = 0; j < d; ++j) {
        const KillingField x = conformal_translation_field(mesh, Eigen::VectorXd::Unit(d, j));
        const auto [value, bound] = kwe_sums(mesh, h.values, x.vectors);
        const double ratio = bound > 0.0 ? std::abs(value) / bound : 0.0;
        witnesses[std::string("kwe_integral_") + names[j]] = value;
        witnesses[std::string("kwe_ratio_") + names[j]] = ratio;
        worst = std::max(worst, ratio);
    }
    return worst;
}

struct Context {
    const Mesh& mesh;
    const BackgroundGeometry& bg;
    const DispatchOptions& opts;
    OperatorSet ops;
    TargetSide side;
    std::vector<bool> rows;
    std::vector<bool> other_rows;
    ScalarField t;
};

void record_sign(ObstructionVerdict& out, const ScalarField& t)
{
    out.witnesses["target_max"] = t.values.maxCoeff();
    out.witnesses["target_min"] = t.values.minCoeff();
    out.witnesses["changes_sign"] = changes_sign(t) ? 1.0 : 0.0;
}

void record_integrals(ObstructionVerdict& out, const std::vector<IntegralCondition>& conds)
{
    for (const IntegralCondition& c : conds) {
        out.witnesses["integral_" + c.name] = c.value;
    }
}

double integral_named(const std::vector<IntegralCondition>& conds, const std::string& name)
{
    for (const IntegralCondition& c : conds) {
        if (c.name == name) {
            return c.value;
        }
    }
    return 0.0;
}

CurvaturePair side_target(const Context& cx)
{
    const Vector zero = Vector::Zero(cx.mesh.num_vertices());
    return cx.side == TargetSide::Boundary ? make_target(cx.ops, zero, cx.t.values)
                                           : make_target(cx.ops, cx.t.values, zero);
}

ObstructionVerdict dispatch_surface(Context& cx, Problem problem)
{
    ObstructionVerdict out;
    const Mesh& mesh = cx.mesh;
    const BackgroundGeometry& bg = cx.bg;
    const Vector mi = equation_mass(cx.ops);
    const double total = mi.dot(bg.interior_curvature.values) + cx.ops.curvature_load_boundary.sum();
    const double chi_real = total / kTwoPi;
    const int chi_round = static_cast<int>(std::lround(chi_real));
    int chi = chi_round;
    out.witnesses["total_background_curvature"] = total;
    out.witnesses["euler_characteristic_background"] = chi_round;
    if (mesh.dim() == 2) {
        out.witnesses["euler_characteristic_mesh"] = euler_characteristic(mesh);
    }
    if (std::abs(chi_real - chi_round) > 1e-6) {
        // Only the sign of the total curvature constrains the target.
        chi = total > 0.0 ? 1 : (total < 0.0 ? -1 : 0);
        out.assumptions_checked.push_back("background total curvature is not a multiple of 2 pi; sign "
                                          "condition taken from its sign");
    }
    record_sign(out, cx.t);

    const bool sign_ok = sign_condition(chi, cx.t);
    out.witnesses["sign_condition"] = sign_ok ? 1.0 : 0.0;
    if (problem == Problem::CE || problem == Problem::CE0) {
        out.assumptions_checked.push_back("CE verdict from the sign predicate only; no diffeomorphism constructed");
        out.verdict = sign_ok ? Verdict::Exists : Verdict::NotExists;
        out.theorem = "surface-sign-condition-characterization";
        return out;
    }
    if (!sign_ok) {
        out.verdict = Verdict::NotExists;
        out.theorem = "gauss-bonnet-sign-condition";
        return out;
    }

    // PC0 needs a flat background, PC a geodesic boundary.
    const Vector& other = cx.side == TargetSide::Boundary ? bg.interior_curvature.values
                                                          : bg.boundary_curvature.values;
    const bool regular = vanishes_on(other, cx.other_rows, bg);
    out.assumptions_checked.push_back(cx.side == TargetSide::Boundary
                                          ? (regular ? "background is flat" : "background is not flat")
                                          : (regular ? "background boundary is geodesic"
                                                     : "background boundary is not geodesic"));
    if (!regular) {
        out.verdict = Verdict::Unknown;
        out.theorem = "no-decisive-criterion";
        return out;
    }

    if (chi == 0 && chi_round == 0) {
        const std::vector<IntegralCondition> conds = integral_conditions(mesh, bg, cx.t, cx.side);
        record_integrals(out, conds);
        out.theorem = "euler-zero-weighted-integral-criterion";
        if (identically_zero(cx.t)) {
            out.verdict = Verdict::Exists;
            return out;
        }
        if (integral_named(conds, "weighted") >= 0.0) {
            out.verdict = Verdict::NotExists;
            return out;
        }
        out.verdict = Verdict::Exists;
        if (cx.opts.run_solvers) {
            add_solver_note(out, minimize_constrained(mesh, bg, cx.t, cx.side, cx.opts.solver));
        }
        return out;
    }

    if (chi < 0) {
        const std::vector<IntegralCondition> conds = integral_conditions(mesh, bg, cx.t, cx.side);
        record_integrals(out, conds);
        if (integral_named(conds, "weighted") >= 0.0) {
            out.verdict = Verdict::NotExists;
            out.theorem = "euler-negative-weighted-integral";
            return out;
        }
        // Positivity witness on the constant-curvature representative.
        const double mean = cx.side == TargetSide::Boundary
                                ? cx.ops.curvature_load_boundary.sum() / cx.ops.mass_boundary.sum()
                                : mi.dot(bg.interior_curvature.values) / mi.sum();
        out.witnesses["background_mean_curvature"] = mean;
        ScalarField data;
        BackgroundGeometry reduced;
        AuxiliaryKind kind;
        if (cx.side == TargetSide::Boundary) {
            const AuxiliaryResult v =
                solve_auxiliary_linear(mesh, bg, AuxiliaryKind::BoundaryFluxPotential, ScalarField());
            data = scaled_by_exp(cx.t, v.field.values, -1.0);
            reduced = BackgroundGeometry::constant(mesh, 0.0, mean);
            kind = AuxiliaryKind::BoundaryRobin;
        } else {
            const AuxiliaryResult v = solve_auxiliary_linear(mesh, bg, AuxiliaryKind::InteriorPotential, ScalarField());
            data = scaled_by_exp(cx.t, v.field.values, 2.0);
            reduced = BackgroundGeometry::constant(mesh, mean, 0.0);
            kind = AuxiliaryKind::InteriorHelmholtz;
        }
        const PositivityWitness pw = positivity_witness(mesh, reduced, data, kind);
        out.witnesses["positivity_minimum"] = pw.minimum;
        if (!pw.positive) {
            out.verdict = Verdict::NotExists;
            out.theorem = "euler-negative-positivity-witness";
            return out;
        }
        out.theorem = "euler-negative-supersolution-criterion";
        if (!cx.opts.run_solvers) {
            out.verdict = Verdict::Unknown;
            return out;
        }
        const SolveReport rep = newton_solve(mesh, bg, side_target(cx), zeros(mesh), cx.opts.solver);
        add_solver_note(out, rep);
        out.verdict = rep.converged() ? Verdict::Exists : Verdict::Unknown;
        if (!rep.converged()) {
            out.theorem = "no-decisive-criterion";
        }
        return out;
    }

    // chi > 0: the only obstruction left is the one on the round disk.
    out.theorem = "no-decisive-criterion";
    out.verdict = Verdict::Unknown;
    double kappa0 = 0.0;
    if (cx.side == TargetSide::Boundary && chi_round == 1 && is_round_ball(mesh)
        && constant_on(bg.boundary_curvature.values, cx.rows, &kappa0, kRoundTolerance) && kappa0 > 0.0) {
        out.assumptions_checked.push_back("round disk with constant positive boundary curvature");
        const double ratio = kwe_ratio(mesh, cx.t, out.witnesses);
        if (ratio > cx.opts.kwe_tolerance) {
            out.verdict = Verdict::NotExists;
            out.theorem = "kazdan-warner-escobar-integral";
        }
    }
    return out;
}

ObstructionVerdict dispatch_higher(Context& cx, Problem problem)
{
    ObstructionVerdict out;
    const Mesh& mesh = cx.mesh;
    const BackgroundGeometry& bg = cx.bg;
    const EigenResult lam = lambda1(mesh, bg, cx.opts.eigen);
    out.witnesses["lambda1"] = lam.value;
    out.witnesses["lambda1_tolerance"] = lam.tolerance;
    out.witnesses["lambda1_sign"] = lam.sign_class == SignClass::Neg ? -1.0 : (lam.sign_class == SignClass::Pos ? 1.0 : 0.0);
    record_sign(out, cx.t);

    const bool zero_target = identically_zero(cx.t);
    bool sign_ok = false;
    switch (lam.sign_class) {
    case SignClass::Neg:
        sign_ok = negative_somewhere(cx.t);
        break;
    case SignClass::Zero:
        sign_ok = changes_sign(cx.t) || zero_target;
        break;
    case SignClass::Pos:
        sign_ok = positive_somewhere(cx.t);
        break;
    }
    out.witnesses["sign_condition"] = sign_ok ? 1.0 : 0.0;
    const std::string cls = to_string(lam.sign_class);
    if (problem == Problem::CE || problem == Problem::CE0) {
        out.assumptions_checked.push_back("CE verdict from the sign predicate only; no diffeomorphism constructed");
        out.verdict = sign_ok ? Verdict::Exists : Verdict::NotExists;
        out.theorem = lam.sign_class == SignClass::Neg   ? "negative-eigenvalue-ce-characterization"
                      : lam.sign_class == SignClass::Pos ? "positive-eigenvalue-ce-characterization"
                                                         : "zero-eigenvalue-ce-characterization";
        return out;
    }
    if (!sign_ok) {
        out.verdict = Verdict::NotExists;
        out.theorem = lam.sign_class == SignClass::Zero ? "zero-eigenvalue-sign-and-integral"
                                                        : "eigenvalue-sign-condition";
        return out;
    }

    const bool boundary = cx.side == TargetSide::Boundary;
    const Vector& own = boundary ? bg.boundary_curvature.values : bg.interior_curvature.values;
    const Vector& other = boundary ? bg.interior_curvature.values : bg.boundary_curvature.values;
    const bool other_zero = vanishes_on(other, cx.other_rows, bg);
    out.assumptions_checked.push_back(boundary ? (other_zero ? "background is scalar flat" : "background is not scalar flat")
                                               : (other_zero ? "background boundary is minimal"
                                                             : "background boundary is not minimal"));

    if (lam.sign_class == SignClass::Zero) {
        out.theorem = "zero-eigenvalue-sign-and-integral";
        if (zero_target) {
            out.verdict = Verdict::Exists;
            return out;
        }
        const bool normalized = other_zero && vanishes_on(own, cx.rows, bg);
        if (!normalized) {
            out.assumptions_checked.push_back("integral condition needs the scalar-flat, minimal representative");
            out.verdict = Verdict::Unknown;
            out.theorem = "no-decisive-criterion";
            return out;
        }
        const std::vector<IntegralCondition> conds = integral_conditions(mesh, bg, cx.t, cx.side);
        record_integrals(out, conds);
        if (integral_named(conds, "total") >= 0.0) {
            out.verdict = Verdict::NotExists;
            return out;
        }
        out.verdict = Verdict::Exists;
        if (cx.opts.run_solvers && !boundary) {
            try {
                const UpperBarrier up = zero_case_upper_barrier(mesh, bg, cx.t, cx.opts.solver);
                out.witnesses["upper_barrier_epsilon"] = up.epsilon;
                const LowerBarrier lo = zero_case_lower_barrier(mesh, bg, cx.t, up.u, cx.opts.solver);
                add_solver_note(out, monotone_iteration(mesh, bg, side_target(cx), lo.u, up.u, cx.opts.solver));
            } catch (const Error& e) {
                out.assumptions_checked.push_back(std::string("barrier construction failed: ") + e.what());
            }
        }
        return out;
    }

    if (lam.sign_class == SignClass::Neg) {
        double c0 = 0.0;
        const bool constant_bg = other_zero && constant_on(own, cx.rows, &c0) && c0 < 0.0;
        if (constant_bg) {
            out.assumptions_checked.push_back(boundary ? "constant negative mean curvature"
                                                       : "constant negative scalar curvature");
            const std::vector<IntegralCondition> conds = integral_conditions(mesh, bg, cx.t, cx.side);
            record_integrals(out, conds);
            if (integral_named(conds, "total") >= 0.0) {
                out.verdict = Verdict::NotExists;
                out.theorem = "negative-eigenvalue-integral-condition";
                return out;
            }
            const PositivityWitness pw = positivity_witness(
                mesh, bg, cx.t, boundary ? AuxiliaryKind::MeanCurvatureRobin : AuxiliaryKind::ScalarHelmholtz);
            out.witnesses["positivity_minimum"] = pw.minimum;
            if (!pw.positive) {
                out.verdict = Verdict::NotExists;
                out.theorem = "negative-eigenvalue-positivity-witness";
                return out;
            }
        }
        out.verdict = Verdict::Unknown;
        out.theorem = "no-decisive-criterion";
        // Constant barriers when the target and the background curvature are
        // both negative on the prescribed rows.
        const auto [tlo, thi] = range_on(cx.t.values, cx.rows);
        const auto [blo, bhi] = range_on(own, cx.rows);
        if (cx.opts.run_solvers && other_zero && thi < 0.0 && bhi < 0.0) {
            double rlo = std::numeric_limits<double>::infinity();
            double rhi = 0.0;
            for (Eigen::Index i = 0; i < cx.t.size(); ++i) {
                if (cx.rows[static_cast<std::size_t>(i)]) {
                    rlo = std::min(rlo, own[i] / cx.t[i]);
                    rhi = std::max(rhi, own[i] / cx.t[i]);
                }
            }
            const DimensionConstants dc = DimensionConstants::of(bg.n);
            const double p = boundary ? dc.b - 1.0 : dc.a - 1.0;
            const double lo = std::pow(rlo, 1.0 / p);
            const double hi = std::pow(rhi, 1.0 / p);
            out.witnesses["constant_lower_barrier"] = lo;
            out.witnesses["constant_upper_barrier"] = hi;
            const Eigen::Index nv = mesh.num_vertices();
            try {
                const SolveReport rep = monotone_iteration(mesh, bg, side_target(cx),
                                                           ScalarField::constant(Support::All, nv, lo),
                                                           ScalarField::constant(Support::All, nv, hi), cx.opts.solver);
                add_solver_note(out, rep);
                if (rep.converged()) {
                    out.verdict = Verdict::Exists;
                    out.theorem = "negative-eigenvalue-constant-barriers";
                }
            } catch (const PreconditionError& e) {
                out.assumptions_checked.push_back(std::string("constant barriers rejected: ") + e.what());
            }
        }
        return out;
    }

    // Positive class: the round-ball obstruction.
    out.verdict = Verdict::Unknown;
    out.theorem = "no-decisive-criterion";
    double h0 = 0.0;
    if (boundary && other_zero && is_round_ball(mesh) && constant_on(own, cx.rows, &h0, kRoundTolerance) && h0 > 0.0) {
        out.assumptions_checked.push_back("round ball, scalar flat, constant positive mean curvature");
        const double ratio = kwe_ratio(mesh, cx.t, out.witnesses);
        if (ratio > cx.opts.kwe_tolerance) {
            out.verdict = Verdict::NotExists;
            out.theorem = "kazdan-warner-escobar-integral";
        }
    }
    return out;
}

} // namespace

ObstructionVerdict trichotomy_dispatch(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& target,
                                       Problem problem, const DispatchOptions& opts)
{
    bg.validate(mesh);
    if (target.size() != mesh.num_vertices()) {
        throw PreconditionError("target must have one value per vertex");
    }
    Context cx{mesh, bg, opts, assemble_operators(mesh, bg),
               prescribes_boundary(problem) ? TargetSide::Boundary : TargetSide::Interior, {}, {}, {}};
    cx.rows = side_rows(cx.ops, cx.side);
    cx.other_rows = cx.ops.boundary_rows;
    if (cx.side == TargetSide::Boundary) {
        cx.other_rows.flip();
    }
    if (cx.side == TargetSide::Boundary && cx.ops.mass_boundary.sum() <= 0.0) {
        throw PreconditionError("boundary problems need a D0 boundary");
    }
    cx.t = restrict_to(target, cx.rows);
    ObstructionVerdict out = bg.n == 2 ? dispatch_surface(cx, problem) : dispatch_higher(cx, problem);
    out.witnesses["dimension"] = bg.n;
    return out;
}

} // namespace confcurv
