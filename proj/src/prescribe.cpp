#include "confcurv/prescribe.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <sstream>

namespace confcurv {

std::string to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Converged:
        return "Converged";
    case SolveStatus::Diverged:
        return "Diverged";
    case SolveStatus::NotAdmissible:
        return "NotAdmissible";
    case SolveStatus::SingularJacobian:
        return "SingularJacobian";
    }
    return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sup(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

bool is_boundary_row(const OperatorSet& ops, Eigen::Index i)
{
    return ops.boundary_rows[static_cast<std::size_t>(i)];
}

SparseMatrix diag(const Vector& d)
{
    SparseMatrix m(d.size(), d.size());
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(d.size()));
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        t.emplace_back(i, i, d[i]);
    }
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SparseMatrix identity(Eigen::Index n)
{
    SparseMatrix id(n, n);
    id.setIdentity();
    return id;
}

// Interior-row mass (zero on boundary rows).
Vector interior_row_mass(const OperatorSet& ops)
{
    Vector m = ops.mass_interior;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        if (is_boundary_row(ops, i)) {
            m[i] = 0.0;
        }
    }
    return m;
}

// Per-row model of the weak residual
//   n=2:  G_i = (S u)_i + ell_i - W_i t_i exp(e_i u_i)
//   n>=3: G_i = alpha (S u)_i + ell_i u_i - W_i t_i u_i^{e_i}
struct RowModel {
    int n = 2;
    double kappa = 1.0;
    Vector ell;
    Vector w;
    Vector t;
    Vector e;

    RowModel(const OperatorSet& ops, const CurvaturePair& target)
        : n(ops.n)
    {
        const Eigen::Index nv = ops.stiffness.rows();
        ell.resize(nv);
        w.resize(nv);
        t.resize(nv);
        e.resize(nv);
        double ratio = 1.0;
        double ea = 2.0;
        double eb = 1.0;
        if (n >= 3) {
            const DimensionConstants k = DimensionConstants::of(n);
            kappa = k.alpha;
            ratio = k.alpha / k.beta;
            ea = k.a;
            eb = k.b;
        }
        for (Eigen::Index i = 0; i < nv; ++i) {
            if (is_boundary_row(ops, i)) {
                ell[i] = ratio * ops.curvature_load_boundary[i];
                w[i] = ratio * ops.mass_boundary[i];
                t[i] = target.boundary[i];
                e[i] = eb;
            } else {
                ell[i] = ops.curvature_load_interior[i];
                w[i] = ops.mass_interior[i];
                t[i] = target.interior[i];
                e[i] = ea;
            }
        }
    }

    double nonlinear(Eigen::Index i, double u) const
    {
        if (n == 2) {
            return ell[i] - w[i] * t[i] * std::exp(e[i] * u);
        }
        return ell[i] * u - w[i] * t[i] * std::pow(u, e[i]);
    }

    double nonlinear_derivative(Eigen::Index i, double u) const
    {
        if (n == 2) {
            return -e[i] * w[i] * t[i] * std::exp(e[i] * u);
        }
        return ell[i] - e[i] * w[i] * t[i] * std::pow(u, e[i] - 1.0);
    }

    // Size of the terms in row i, used to judge the sign of G_i.
    double magnitude(Eigen::Index i, double su, double u) const
    {
        double lin = kappa * std::abs(su);
        if (n == 2) {
            return lin + std::abs(ell[i]) + std::abs(w[i] * t[i] * std::exp(e[i] * u));
        }
        return lin + std::abs(ell[i] * u) + std::abs(w[i] * t[i] * std::pow(u, e[i]));
    }

    Vector residual(const SparseMatrix& s, const Vector& u) const
    {
        Vector g = kappa * (s * u);
        for (Eigen::Index i = 0; i < u.size(); ++i) {
            g[i] += nonlinear(i, u[i]);
        }
        return g;
    }
};

// Solves K x = rhs subject to weights . x = 0 through a bordered system.
Vector solve_mean_zero(const SparseMatrix& k, const Vector& rhs, const Vector& weights)
{
    const Eigen::Index n = k.rows();
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(k.nonZeros() + 2 * n));
    for (int c = 0; c < k.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(k, c); it; ++it) {
            t.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (weights[i] != 0.0) {
            t.emplace_back(i, n, weights[i]);
            t.emplace_back(n, i, weights[i]);
        }
    }
    SparseMatrix b(n + 1, n + 1);
    b.setFromTriplets(t.begin(), t.end());
    Eigen::SparseLU<SparseMatrix> lu(b);
    if (lu.info() != Eigen::Success) {
        throw SolverError("bordered Neumann system is singular");
    }
    Vector r(n + 1);
    r.head(n) = rhs;
    r[n] = 0.0;
    const Vector x = lu.solve(r);
    if (!x.allFinite()) {
        throw SolverError("bordered Neumann solve produced non-finite values");
    }
    return x.head(n);
}

void check_target(const OperatorSet& ops, const CurvaturePair& target)
{
    const Eigen::Index nv = ops.stiffness.rows();
    if (target.interior.size() != nv || target.boundary.size() != nv) {
        throw PreconditionError("target fields must have one value per vertex");
    }
    if (!target.interior.all_finite() || !target.boundary.all_finite()) {
        throw PreconditionError("target fields must be finite");
    }
}

// Sum of mass-weighted squared density residuals.
double merit(const OperatorSet& ops, const Vector& u, const CurvaturePair& target)
{
    const CurvaturePair f = eval_F(ops, u);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double d = is_boundary_row(ops, i) ? ops.mass_boundary[i] * std::pow(f.boundary[i] - target.boundary[i], 2)
                                                 : ops.mass_interior[i] * std::pow(f.interior[i] - target.interior[i], 2);
        acc += d;
    }
    return acc;
}

double sigma_min(const OperatorSet& ops, const Vector& u)
{
    return smallest_singular_value(assemble_linearization(ops, u).coupled).value;
}

} // namespace

std::pair<double, double> density_residuals(const OperatorSet& ops, const Vector& u, const CurvaturePair& target)
{
    const CurvaturePair f = eval_F(ops, u);
    double ri = 0.0;
    double rb = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (is_boundary_row(ops, i)) {
            rb = std::max(rb, std::abs(f.boundary[i] - target.boundary[i]));
        } else {
            ri = std::max(ri, std::abs(f.interior[i] - target.interior[i]));
        }
    }
    if (!std::isfinite(ri) || !std::isfinite(rb)) {
        return {kInf, kInf};
    }
    return {ri, rb};
}

CurvaturePair make_target(const OperatorSet& ops, const Vector& interior, const Vector& boundary)
{
    const Eigen::Index nv = ops.stiffness.rows();
    CurvaturePair t{ScalarField::constant(Support::Interior, nv, 0.0),
                    ScalarField::constant(Support::Boundary, nv, 0.0)};
    for (Eigen::Index i = 0; i < nv; ++i) {
        if (is_boundary_row(ops, i)) {
            t.boundary[i] = boundary[i];
        } else {
            t.interior[i] = interior[i];
        }
    }
    return t;
}

// ---------------------------------------------------------------------------
// Newton

Vector boundary_distance(const Mesh& mesh)
{
    const Eigen::Index nv = mesh.num_vertices();
    std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(nv));
    for (Eigen::Index e = 0; e < mesh.num_edges(); ++e) {
        const int a = mesh.edges()(e, 0);
        const int b = mesh.edges()(e, 1);
        const double l = mesh.edge_lengths()[e];
        adj[static_cast<std::size_t>(a)].emplace_back(b, l);
        adj[static_cast<std::size_t>(b)].emplace_back(a, l);
    }
    Vector d = Vector::Constant(nv, kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    for (int v : mesh.boundary_vertices()) {
        d[v] = 0.0;
        queue.emplace(0.0, v);
    }
    while (!queue.empty()) {
        const auto [dist, v] = queue.top();
        queue.pop();
        if (dist > d[v]) {
            continue;
        }
        for (const auto& [w, l] : adj[static_cast<std::size_t>(v)]) {
            if (dist + l < d[w]) {
                d[w] = dist + l;
                queue.emplace(d[w], w);
            }
        }
    }
    return d;
}

PerturbationResult perturb_until_invertible(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& u,
                                            const SolverConfig& cfg)
{
    const OperatorSet ops = assemble_operators(mesh, bg);
    check_conformal_factor(ops.n, u.values, mesh.num_vertices());
    const SingularPair sp = smallest_singular_value(assemble_linearization(ops, u.values).coupled);
    if (sp.value >= cfg.sing_tol) {
        std::ostringstream msg;
        msg << "Jacobian is already invertible (smallest singular value " << sp.value << ")";
        throw PreconditionError(msg.str());
    }
    const Vector dist = boundary_distance(mesh);
    const double dmax = dist.maxCoeff();
    if (!(dmax > 0.0)) {
        throw SolverError("mesh has no vertex away from the boundary");
    }
    const Vector bump = dist / dmax;

    std::vector<std::pair<std::string, Vector>> candidates;
    const Vector& v1 = sp.vector;
    if (v1.maxCoeff() - v1.minCoeff() > 1e-6 * sup(v1)) {
        const Vector sq = v1.cwiseProduct(v1);
        const Vector lap = -(ops.stiffness * sq).cwiseQuotient(ops.mass_interior);
        Vector z = bump.cwiseProduct(lap);
        if (sup(z) > 0.0) {
            z /= sup(z);
            candidates.emplace_back("bump-laplacian", z);
        }
    }
    candidates.emplace_back("boundary-distance", bump);

    for (const auto& [branch, z] : candidates) {
        for (double t = cfg.t0; t <= cfg.t_max * (1.0 + 1e-12); t *= 2.0) {
            for (double sign : {1.0, -1.0}) {
                const Vector ut = u.values + sign * t * z;
                if (ops.n >= 3 && ut.minCoeff() <= 0.0) {
                    continue;
                }
                const double s = sigma_min(ops, ut);
                if (s > cfg.invertible_tol) {
                    return {ScalarField(Support::All, ut), sign * t, branch, s};
                }
            }
        }
    }
    throw SolverError("no perturbation up to t_max makes the Jacobian invertible");
}

SolveReport newton_solve(const Mesh& mesh, const BackgroundGeometry& bg, const CurvaturePair& target,
                         const ScalarField& u0, const SolverConfig& cfg)
{
    bg.validate(mesh);
    const OperatorSet ops = assemble_operators(mesh, bg);
    check_target(ops, target);
    check_conformal_factor(ops.n, u0.values, mesh.num_vertices());
    const Vector& f = target.interior.values;
    const Vector& h = target.boundary.values;

    SolveReport rep;
    rep.n = ops.n;
    rep.method = "newton";
    Vector u = u0.values;
    bool perturbed = false;
    bool tikhonov = false;

    for (int it = 0; it <= cfg.max_iterations; ++it) {
        const auto [ri, rb] = density_residuals(ops, u, target);
        rep.u = ScalarField(Support::All, u);
        rep.residual_interior = ri;
        rep.residual_boundary = rb;
        rep.iterations = it;
        if (ri < cfg.tol && rb < cfg.tol) {
            rep.status = SolveStatus::Converged;
            return rep;
        }
        if (it == cfg.max_iterations) {
            break;
        }
        const Vector g = weak_residual(ops, u, f, h);
        SparseMatrix c = assemble_linearization(ops, u).coupled;
        if (tikhonov) {
            c += (1e-8 * c.norm()) * identity(c.rows());
        }
        Eigen::SparseLU<SparseMatrix> lu(c);
        bool singular = lu.info() != Eigen::Success;
        if (!singular && it == 0 && !tikhonov) {
            singular = smallest_singular_value(c).value < cfg.sing_tol;
        }
        Vector step;
        if (!singular) {
            step = lu.solve(Vector(-g));
            singular = !step.allFinite();
        }
        if (singular) {
            if (!perturbed) {
                perturbed = true;
                try {
                    const PerturbationResult p = perturb_until_invertible(mesh, bg, ScalarField(Support::All, u), cfg);
                    u = p.u.values;
                    rep.perturbation_used = Perturbation{p.branch, p.t};
                    rep.diagnostics["perturbation_sigma_min"] = p.sigma_min;
                    rep.notes.push_back("singular Jacobian: perturbed along " + p.branch);
                } catch (const Error& e) {
                    tikhonov = true;
                    rep.notes.push_back(std::string("perturbation failed (") + e.what() + "); Tikhonov steps");
                }
                continue;
            }
            if (!tikhonov) {
                tikhonov = true;
                rep.notes.push_back("singular Jacobian after perturbation; Tikhonov steps");
                continue;
            }
            rep.status = SolveStatus::SingularJacobian;
            return rep;
        }

        // Armijo backtracking on the mass-weighted density residual; the
        // step is exact Newton for F, so it is a descent direction there.
        const double phi0 = merit(ops, u, target);
        double s = 1.0;
        bool accepted = false;
        while (s > 1e-12) {
            const Vector trial = u + s * step;
            if (ops.n >= 3 && trial.minCoeff() <= 0.0) {
                s *= 0.5;
                continue;
            }
            const double phi = merit(ops, trial, target);
            if (std::isfinite(phi) && phi <= (1.0 - 2.0 * cfg.armijo * s) * phi0) {
                u = trial;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted) {
            rep.status = SolveStatus::Diverged;
            rep.notes.push_back("line search failed to decrease the residual");
            return rep;
        }
    }
    rep.status = SolveStatus::Diverged;
    rep.notes.push_back("iteration cap reached");
    return rep;
}

// ---------------------------------------------------------------------------
// Constrained minimization (zero total curvature)

namespace {

// sum_i a_i exp(p x_i) without overflow, returned as (mantissa, shift) with
// value = mantissa * exp(shift).
std::pair<double, double> scaled_exp_sum(const Vector& a, const Vector& x, double p)
{
    double shift = -kInf;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] != 0.0) {
            shift = std::max(shift, p * x[i]);
        }
    }
    if (shift == -kInf) {
        return {0.0, 0.0};
    }
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a[i] != 0.0) {
            s += a[i] * std::exp(p * x[i] - shift);
        }
    }
    return {s, shift};
}

struct ConstraintProblem {
    SparseMatrix s;
    Vector a;     // W .* target
    Vector mass;  // vertex masses (mean-zero constraint)
    double p = 1.0;

    double energy(const Vector& w) const { return w.dot(s * w); }

    // Restores sum a e^{p w} = 0 along -a, then removes the mean.
    Vector restore(Vector w) const
    {
        const Vector dir = -a / sup(a);
        auto g = [&](double tau) { return scaled_exp_sum(a, w + tau * dir, p).first; };
        double lo = -1.0;
        double hi = 1.0;
        for (int k = 0; k < 200 && g(lo) <= 0.0; ++k) {
            lo *= 2.0;
        }
        for (int k = 0; k < 200 && g(hi) >= 0.0; ++k) {
            hi *= 2.0;
        }
        if (!(g(lo) > 0.0 && g(hi) < 0.0)) {
            throw SolverError("cannot restore the curvature constraint");
        }
        for (int k = 0; k < 200; ++k) {
            const double mid = 0.5 * (lo + hi);
            if (g(mid) > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
            if (hi - lo <= 1e-16 * std::max(1.0, std::abs(mid))) {
                break;
            }
        }
        w += 0.5 * (lo + hi) * dir;
        w.array() -= mass.dot(w) / mass.sum();
        return w;
    }
};

} // namespace

SolveReport minimize_constrained(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& target,
                                 TargetSide side, const SolverConfig& cfg)
{
    bg.validate(mesh);
    const OperatorSet ops = assemble_operators(mesh, bg);
    if (ops.n != 2) {
        throw DimensionError("minimize_constrained is a surface method");
    }
    const Eigen::Index nv = mesh.num_vertices();
    if (target.size() != nv) {
        throw PreconditionError("target must have one value per vertex");
    }
    SolveReport rep;
    rep.n = 2;
    rep.method = "constrained-minimization";

    // Reduction to a flat background with geodesic boundary: S v = -loads.
    Vector loads(nv);
    for (Eigen::Index i = 0; i < nv; ++i) {
        loads[i] = is_boundary_row(ops, i) ? ops.curvature_load_boundary[i] : ops.curvature_load_interior[i];
    }
    const double total = loads.sum();
    if (std::abs(total) > 1e-8 * std::max(1.0, loads.cwiseAbs().sum())) {
        throw PreconditionError("background total curvature must vanish (Euler characteristic 0)");
    }
    const Vector mass = mesh.vertex_measures();
    Vector v = Vector::Zero(nv);
    if (sup(loads) > 0.0) {
        v = solve_mean_zero(ops.stiffness, Vector(-loads), mass);
    }
    rep.diagnostics["reduction_potential_sup"] = sup(v);

    const double p = side == TargetSide::Boundary ? 1.0 : 2.0;
    ConstraintProblem prob;
    prob.s = ops.stiffness;
    prob.mass = mass;
    prob.p = p;
    prob.a = Vector::Zero(nv);
    Vector interior_target = Vector::Zero(nv);
    Vector boundary_target = Vector::Zero(nv);
    for (Eigen::Index i = 0; i < nv; ++i) {
        const bool brow = is_boundary_row(ops, i);
        if (side == TargetSide::Boundary && brow) {
            prob.a[i] = ops.mass_boundary[i] * target[i] * std::exp(p * v[i]);
            boundary_target[i] = target[i];
        } else if (side == TargetSide::Interior && !brow) {
            prob.a[i] = ops.mass_interior[i] * target[i] * std::exp(p * v[i]);
            interior_target[i] = target[i];
        }
    }
    const CurvaturePair tgt = make_target(ops, interior_target, boundary_target);

    const double amax = sup(prob.a);
    const double deadband = 1e-12 * amax;
    const double integral = prob.a.sum();
    rep.diagnostics["weighted_integral"] = integral;
    if (amax == 0.0) {
        rep.u = ScalarField(Support::All, v);
        std::tie(rep.residual_interior, rep.residual_boundary) = density_residuals(ops, v, tgt);
        rep.status = rep.residual_interior < cfg.tol && rep.residual_boundary < cfg.tol ? SolveStatus::Converged
                                                                                        : SolveStatus::Diverged;
        rep.notes.push_back("target identically zero");
        return rep;
    }
    const bool changes_sign = prob.a.maxCoeff() > deadband && prob.a.minCoeff() < -deadband;
    if (!changes_sign || integral >= 0.0) {
        rep.status = SolveStatus::NotAdmissible;
        rep.notes.push_back(changes_sign ? "weighted integral of the target is not negative"
                                         : "target does not change sign");
        return rep;
    }

    // Projected gradient in the H^1 inner product with exact restoration.
    const SparseMatrix hmat = SparseMatrix(prob.s + diag(mass));
    Eigen::SimplicialLDLT<SparseMatrix> hsolve(hmat);
    if (hsolve.info() != Eigen::Success) {
        throw SolverError("H1 Gram matrix factorization failed");
    }
    Vector w = prob.restore(Vector::Zero(nv));
    double energy = prob.energy(w);
    double step = 1.0;
    int pg = 0;
    for (; pg < 500; ++pg) {
        const Vector grad = 2.0 * (prob.s * w);
        const Vector q = p * prob.a.cwiseProduct((p * w).array().exp().matrix());
        Matrix cons(nv, 2);
        cons.col(0) = q / sup(q);
        cons.col(1) = mass;
        const Matrix y = hsolve.solve(cons);
        const Vector d = hsolve.solve(grad);
        const Eigen::Matrix2d gram = cons.transpose() * y;
        const Vector dp = d - y * gram.ldlt().solve(cons.transpose() * d);
        const double slope = grad.dot(dp);
        if (slope <= 1e-10 * std::max(1.0, energy)) {
            break;
        }
        bool accepted = false;
        for (int k = 0; k < 40; ++k) {
            const Vector trial = prob.restore(w - step * dp);
            const double e = prob.energy(trial);
            if (e <= energy - 1e-4 * step * slope) {
                w = trial;
                energy = e;
                accepted = true;
                step = std::min(1e6, 2.0 * step);
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            break;
        }
    }
    rep.diagnostics["projected_gradient_steps"] = pg;

    // Newton on the optimality system 2 S w + l1 mass + l2 a e^{p w} = 0.
    double l1 = 0.0;
    double l2 = 0.0;
    {
        const Vector q = prob.a.cwiseProduct((p * w).array().exp().matrix());
        Matrix basis(nv, 2);
        basis.col(0) = mass;
        basis.col(1) = q;
        const Eigen::Vector2d lam = basis.colPivHouseholderQr().solve(Vector(-2.0 * (prob.s * w)));
        l1 = lam[0];
        l2 = lam[1];
    }
    int kkt = 0;
    for (; kkt < 60; ++kkt) {
        const Vector q = prob.a.cwiseProduct((p * w).array().exp().matrix());
        Vector r(nv + 2);
        r.head(nv) = 2.0 * (prob.s * w) + l1 * mass + l2 * q;
        r[nv] = mass.dot(w);
        r[nv + 1] = q.sum();
        const double scale = std::max(1.0, sup(2.0 * (prob.s * w)));
        if (sup(r.head(nv)) < 1e-14 * scale && std::abs(r[nv + 1]) < 1e-15 * amax * nv) {
            break;
        }
        std::vector<Triplet> t;
        const SparseMatrix top = SparseMatrix(2.0 * prob.s + diag(Vector(l2 * p * q)));
        for (int c = 0; c < top.outerSize(); ++c) {
            for (SparseMatrix::InnerIterator itr(top, c); itr; ++itr) {
                t.emplace_back(itr.row(), itr.col(), itr.value());
            }
        }
        for (Eigen::Index i = 0; i < nv; ++i) {
            t.emplace_back(i, nv, mass[i]);
            t.emplace_back(nv, i, mass[i]);
            if (q[i] != 0.0) {
                t.emplace_back(i, nv + 1, q[i]);
                t.emplace_back(nv + 1, i, p * q[i]);
            }
        }
        SparseMatrix j(nv + 2, nv + 2);
        j.setFromTriplets(t.begin(), t.end());
        Eigen::SparseLU<SparseMatrix> lu(j);
        if (lu.info() != Eigen::Success) {
            rep.notes.push_back("optimality system singular");
            break;
        }
        const Vector dx = lu.solve(Vector(-r));
        if (!dx.allFinite()) {
            rep.notes.push_back("optimality step not finite");
            break;
        }
        w += dx.head(nv);
        l1 += dx[nv];
        l2 += dx[nv + 1];
    }
    rep.diagnostics["optimality_newton_steps"] = kkt;
    rep.multipliers = std::make_pair(l1, l2);
    rep.iterations = pg + kkt;
    if (!(l2 < 0.0)) {
        rep.status = SolveStatus::Diverged;
        rep.notes.push_back("boundary multiplier is not negative");
        rep.u = ScalarField(Support::All, w + v);
        return rep;
    }
    const Vector u = (w.array() + std::log(-0.5 * l2) / p).matrix() + v;
    rep.u = ScalarField(Support::All, u);
    std::tie(rep.residual_interior, rep.residual_boundary) = density_residuals(ops, u, tgt);

    // Integrated identity: sum of the target curvature form over the solved metric.
    double identity_value = 0.0;
    for (Eigen::Index i = 0; i < nv; ++i) {
        const bool brow = is_boundary_row(ops, i);
        if (side == TargetSide::Boundary && brow) {
            identity_value += ops.mass_boundary[i] * target[i] * std::exp(u[i]);
        } else if (side == TargetSide::Interior && !brow) {
            identity_value += ops.mass_interior[i] * target[i] * std::exp(2.0 * u[i]);
        }
    }
    rep.diagnostics["curvature_integral"] = identity_value;
    rep.status = rep.residual_interior < cfg.tol && rep.residual_boundary < cfg.tol ? SolveStatus::Converged
                                                                                    : SolveStatus::Diverged;
    return rep;
}

// ---------------------------------------------------------------------------
// Auxiliary linear problems

std::string to_string(AuxiliaryKind k)
{
    switch (k) {
    case AuxiliaryKind::BoundaryRobin:
        return "boundary_robin";
    case AuxiliaryKind::InteriorHelmholtz:
        return "interior_helmholtz";
    case AuxiliaryKind::BoundaryFluxPotential:
        return "boundary_flux_potential";
    case AuxiliaryKind::InteriorPotential:
        return "interior_potential";
    case AuxiliaryKind::MeanCurvatureRobin:
        return "mean_curvature_robin";
    case AuxiliaryKind::ScalarHelmholtz:
        return "scalar_helmholtz";
    case AuxiliaryKind::ScalarPotential:
        return "scalar_potential";
    }
    return "unknown";
}

AuxiliaryKind auxiliary_kind_from_string(const std::string& s)
{
    for (AuxiliaryKind k : {AuxiliaryKind::BoundaryRobin, AuxiliaryKind::InteriorHelmholtz,
                            AuxiliaryKind::BoundaryFluxPotential, AuxiliaryKind::InteriorPotential,
                            AuxiliaryKind::MeanCurvatureRobin, AuxiliaryKind::ScalarHelmholtz,
                            AuxiliaryKind::ScalarPotential}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw PreconditionError("unknown auxiliary kind '" + s + "'");
}

AuxiliaryResult solve_auxiliary_linear(const Mesh& mesh, const BackgroundGeometry& bg, AuxiliaryKind kind,
                                       const ScalarField& data, const SolverConfig& cfg)
{
    bg.validate(mesh);
    const OperatorSet ops = assemble_operators(mesh, bg);
    const Eigen::Index nv = mesh.num_vertices();
    const bool needs_data = kind != AuxiliaryKind::BoundaryFluxPotential && kind != AuxiliaryKind::InteriorPotential;
    if (needs_data && data.size() != nv) {
        throw PreconditionError("auxiliary data must have one value per vertex");
    }
    if ((kind == AuxiliaryKind::MeanCurvatureRobin || kind == AuxiliaryKind::ScalarHelmholtz
         || kind == AuxiliaryKind::ScalarPotential)
        && ops.n < 3) {
        throw DimensionError(to_string(kind) + " needs n >= 3");
    }
    const Vector mb = ops.mass_boundary;
    const Vector mi = interior_row_mass(ops);
    const Vector& k0 = bg.interior_curvature.values;
    const Vector& h0 = bg.boundary_curvature.values;

    SparseMatrix k = ops.stiffness;
    Vector rhs = Vector::Zero(nv);
    bool neumann = false;
    switch (kind) {
    case AuxiliaryKind::BoundaryRobin:
    case AuxiliaryKind::MeanCurvatureRobin:
        k -= diag(Vector(mb.cwiseProduct(h0)));
        rhs = -mb.cwiseProduct(data.values);
        break;
    case AuxiliaryKind::InteriorHelmholtz:
        k -= diag(Vector(mi.cwiseProduct(k0)));
        rhs = -mi.cwiseProduct(data.values);
        break;
    case AuxiliaryKind::ScalarHelmholtz: {
        const double q = 1.0 / (ops.n - 1);
        k -= diag(Vector(q * mi.cwiseProduct(k0)));
        rhs = -q * mi.cwiseProduct(data.values);
        break;
    }
    case AuxiliaryKind::BoundaryFluxPotential: {
        if (mb.sum() <= 0.0) {
            throw PreconditionError("boundary flux potential needs a D0 boundary");
        }
        const double mean = mb.dot(h0) / mb.sum();
        rhs = mb.cwiseProduct((h0.array() - mean).matrix());
        neumann = true;
        break;
    }
    case AuxiliaryKind::InteriorPotential: {
        const double mean = mi.dot(k0) / mi.sum();
        rhs = -mi.cwiseProduct((k0.array() - mean).matrix());
        neumann = true;
        break;
    }
    case AuxiliaryKind::ScalarPotential: {
        const double mean = mi.dot(data.values) / mi.sum();
        rhs = mi.cwiseProduct((data.values.array() - mean).matrix());
        neumann = true;
        break;
    }
    }

    AuxiliaryResult out;
    Vector x;
    if (neumann) {
        if (std::abs(rhs.sum()) > 1e-10 * std::max(1e-300, rhs.cwiseAbs().sum())) {
            throw PreconditionError("data incompatible with the Neumann problem");
        }
        x = solve_mean_zero(k, rhs, mesh.vertex_measures());
    } else {
        Eigen::SparseLU<SparseMatrix> lu(k);
        if (lu.info() != Eigen::Success) {
            throw SolverError("auxiliary operator is singular");
        }
        x = lu.solve(rhs);
        if (!x.allFinite()) {
            throw SolverError("auxiliary solve produced non-finite values");
        }
    }
    out.residual = (k * x - rhs).norm() / std::max(rhs.norm(), 1e-300);
    if (rhs.norm() == 0.0) {
        out.residual = (k * x).norm();
    }
    if (out.residual > std::max(cfg.linear_tol, 1e-8)) {
        throw SolverError("auxiliary solve residual above tolerance");
    }
    out.field = ScalarField(Support::All, x);
    out.minimum = x.minCoeff();
    out.positive = out.minimum > 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Sub/super-solutions

double barrier_violation(const OperatorSet& ops, const Vector& u, const CurvaturePair& target, bool upper)
{
    check_target(ops, target);
    const RowModel model(ops, target);
    const Vector su = ops.stiffness * u;
    // Rows where G vanishes exactly (e.g. S u = 0 on rows without load) are
    // judged up to the rounding error of S u.
    const Vector rounding = 4.0 * std::numeric_limits<double>::epsilon() * model.kappa *
                            (ops.stiffness.cwiseAbs() * u.cwiseAbs());
    double worst = -kInf;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double g = model.kappa * su[i] + model.nonlinear(i, u[i]);
        const double scale = model.magnitude(i, su[i], u[i]) + rounding[i] + 1e-300;
        worst = std::max(worst, ((upper ? -g : g) - rounding[i]) / scale);
    }
    return worst;
}

SolveReport monotone_iteration(const Mesh& mesh, const BackgroundGeometry& bg, const CurvaturePair& target,
                               const ScalarField& lower, const ScalarField& upper, const SolverConfig& cfg)
{
    bg.validate(mesh);
    const OperatorSet ops = assemble_operators(mesh, bg);
    check_target(ops, target);
    const Eigen::Index nv = mesh.num_vertices();
    check_conformal_factor(ops.n, lower.values, nv);
    check_conformal_factor(ops.n, upper.values, nv);
    for (Eigen::Index i = 0; i < nv; ++i) {
        if (lower[i] > upper[i]) {
            std::ostringstream msg;
            msg << "barrier ordering violated at vertex " << i;
            throw PreconditionError(msg.str());
        }
    }
    SolveReport rep;
    rep.n = ops.n;
    rep.method = "monotone-iteration";
    const double vu = barrier_violation(ops, upper.values, target, true);
    const double vl = barrier_violation(ops, lower.values, target, false);
    rep.diagnostics["upper_violation"] = vu;
    rep.diagnostics["lower_violation"] = vl;
    if (vu > 1e-10) {
        throw PreconditionError("upper barrier fails its inequality");
    }
    if (vl > 1e-10) {
        throw PreconditionError("lower barrier fails its inequality");
    }

    const RowModel model(ops, target);
    const Vector sdiag = ops.stiffness.diagonal();
    // Every iterate is again a super-solution, so the shift only has to
    // cover [lower, current]; it is re-tightened when it halves.
    auto shift_for = [&](const Vector& top) {
        Vector c(nv);
        for (Eigen::Index i = 0; i < nv; ++i) {
            const double need = std::max(model.nonlinear_derivative(i, lower[i]), model.nonlinear_derivative(i, top[i]));
            c[i] = std::max(need, 1e-8 * model.kappa * sdiag[i]);
        }
        return c;
    };
    Vector c = shift_for(upper.values);
    Eigen::SimplicialLDLT<SparseMatrix> solver;
    auto factor = [&]() {
        solver.compute(SparseMatrix(model.kappa * ops.stiffness + diag(c)));
        if (solver.info() != Eigen::Success) {
            throw SolverError("monotone iteration matrix factorization failed");
        }
    };
    factor();
    int refactors = 0;

    Vector u = upper.values;
    double clamp = 0.0;
    for (int it = 0; it <= cfg.monotone_max_iterations; ++it) {
        const auto [ri, rb] = density_residuals(ops, u, target);
        rep.iterations = it;
        rep.residual_interior = ri;
        rep.residual_boundary = rb;
        if (ri < cfg.tol && rb < cfg.tol) {
            rep.status = SolveStatus::Converged;
            break;
        }
        const Vector g = model.residual(ops.stiffness, u);
        Vector next = u - solver.solve(g);
        for (Eigen::Index i = 0; i < nv; ++i) {
            const double clamped = std::clamp(next[i], lower[i], upper[i]);
            clamp = std::max(clamp, std::abs(clamped - next[i]));
            next[i] = clamped;
        }
        if (sup(next - u) <= 1e-15 * sup(u)) {
            rep.notes.push_back("iteration stalled");
            u = next;
            break;
        }
        u = next;
        const Vector tighter = shift_for(u);
        if ((tighter.array() < 0.5 * c.array()).any()) {
            c = c.cwiseMin(tighter);
            factor();
            ++refactors;
        }
    }
    rep.diagnostics["refactorizations"] = refactors;
    if (rep.status != SolveStatus::Converged && rep.notes.empty()) {
        rep.notes.push_back("iteration cap reached");
    }
    rep.u = ScalarField(Support::All, u);
    rep.diagnostics["max_clamp"] = clamp;
    return rep;
}

UpperBarrier zero_case_upper_barrier(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& r,
                                     const SolverConfig& cfg)
{
    const OperatorSet ops = assemble_operators(mesh, bg);
    const DimensionConstants k = DimensionConstants::of(ops.n);
    const Vector psi = solve_auxiliary_linear(mesh, bg, AuxiliaryKind::ScalarPotential, r, cfg).field.values;
    const Eigen::Index nv = mesh.num_vertices();
    const CurvaturePair target = make_target(ops, r.values, Vector::Zero(nv));
    UpperBarrier best;
    best.violation = kInf;
    for (bool rescaled : {false, true}) {
        const Vector potential = rescaled ? Vector(k.c_n * psi) : psi;
        for (double eps = 1.0; eps >= std::ldexp(1.0, -40); eps *= 0.5) {
            const Vector u = (std::pow(eps, k.a) * potential).array() + eps;
            if (u.minCoeff() <= 0.0) {
                continue;
            }
            const double v = barrier_violation(ops, u, target, true);
            if (v < best.violation) {
                best = {ScalarField(Support::All, u), eps, rescaled, v};
            }
            if (v <= 1e-10) {
                return {ScalarField(Support::All, u), eps, rescaled, v};
            }
        }
    }
    std::ostringstream msg;
    msg << "no upper barrier found (smallest violation " << best.violation << ")";
    throw SolverError(msg.str());
}

LowerBarrier zero_case_lower_barrier(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& r,
                                     const ScalarField& upper, const SolverConfig& cfg)
{
    (void)cfg;
    const OperatorSet ops = assemble_operators(mesh, bg);
    const DimensionConstants k = DimensionConstants::of(ops.n);
    const Eigen::Index nv = mesh.num_vertices();
    const CurvaturePair target = make_target(ops, r.values, Vector::Zero(nv));
    const Vector mi = interior_row_mass(ops);

    // Weight eigenproblem on the same rows as the target problem.
    LowerBarrier out;
    GeneralizedPair pair;
    double m = 1.0;
    for (;; m *= 2.0) {
        if (m > 1e8) {
            throw SolverError("no weight makes the first eigenvalue negative");
        }
        const SparseMatrix kk = SparseMatrix(ops.stiffness - diag(Vector(m * mi.cwiseProduct(r.values))));
        pair = lowest_generalized_eigenpair(kk, mi);
        if (pair.value < -1e-12) {
            break;
        }
    }
    Vector phi = pair.vector;
    if (phi.sum() < 0.0) {
        phi = -phi;
    }
    if (phi.minCoeff() <= 0.0) {
        throw SolverError("weight eigenfunction is not positive");
    }
    phi *= 2.0 / phi.minCoeff();
    out.m = m;
    out.eigenvalue = pair.value;
    const double a = std::pow(k.c_n / m, (ops.n - 2) / 4.0);

    auto accept = [&](const Vector& u) {
        if (!u.allFinite() || u.minCoeff() <= 0.0) {
            return kInf;
        }
        for (Eigen::Index i = 0; i < nv; ++i) {
            if (u[i] > upper[i]) {
                return kInf;
            }
        }
        return barrier_violation(ops, u, target, false);
    };

    double best = kInf;
    for (double rr : {0.5, 0.25, 0.75, 0.1, 0.9}) {
        const double expo = 1.0 - std::log(rr) / rr;
        const double inner = (rr * rr - rr * std::log(rr)) * std::pow(1.0 - rr, -std::log(rr) / rr);
        for (double g = 1.0; g >= std::ldexp(1.0, -40); g *= 0.5) {
            Vector v(nv);
            for (Eigen::Index i = 0; i < nv; ++i) {
                v[i] = g * std::pow(std::pow(phi[i], rr * rr) - std::pow(rr, rr), expo)
                       + (ops.n - 2) / 4.0 * std::log(g * inner);
            }
            const Vector u = v.array().exp().matrix() / a;
            const double viol = accept(u);
            best = std::min(best, viol);
            if (viol <= 1e-10) {
                out.u = ScalarField(Support::All, u);
                out.gamma = g;
                out.r = rr;
                out.closed_form = true;
                out.violation = viol;
                return out;
            }
        }
    }
    out.closed_form_violation = best;
    for (double rr : {1.0, 2.0, 4.0, 8.0, 16.0, 0.5}) {
        for (double g = 1.0; g >= std::ldexp(1.0, -60); g *= 0.5) {
            const Vector u = g * phi.array().pow(rr).matrix();
            const double viol = accept(u);
            if (viol <= 1e-10) {
                out.u = ScalarField(Support::All, u);
                out.gamma = g;
                out.r = rr;
                out.closed_form = false;
                out.violation = viol;
                return out;
            }
        }
    }
    throw SolverError("no lower barrier found");
}

// ---------------------------------------------------------------------------
// Subcritical minimization

SolveReport minimize_subcritical(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& target,
                                 const SubcriticalParams& params, TargetSide side, const SolverConfig& cfg)
{
    bg.validate(mesh);
    const OperatorSet ops = assemble_operators(mesh, bg);
    if (ops.n != 2) {
        throw DimensionError("minimize_subcritical is a surface method");
    }
    const double gamma = params.gamma;
    if (!(gamma > 0.0 && gamma < 1.0)) {
        throw PreconditionError("gamma must lie in (0, 1)");
    }
    const Eigen::Index nv = mesh.num_vertices();
    if (target.size() != nv) {
        throw PreconditionError("target must have one value per vertex");
    }
    SolveReport rep;
    rep.n = 2;
    rep.method = "subcritical-minimization";

    Vector loads(nv);
    Vector a = Vector::Zero(nv);
    Vector weight = Vector::Zero(nv);
    for (Eigen::Index i = 0; i < nv; ++i) {
        const bool brow = is_boundary_row(ops, i);
        loads[i] = brow ? ops.curvature_load_boundary[i] : ops.curvature_load_interior[i];
        if (side == TargetSide::Boundary && brow) {
            weight[i] = ops.mass_boundary[i];
        } else if (side == TargetSide::Interior && !brow) {
            weight[i] = ops.mass_interior[i];
        }
        a[i] = weight[i] * target[i];
    }
    const double total = loads.sum();
    const double constraint = params.constraint_constant.value_or(total);
    rep.diagnostics["constraint_constant"] = constraint;
    rep.diagnostics["total_curvature"] = total;
    if (!(a.maxCoeff() > 1e-12 * sup(a)) || sup(a) == 0.0) {
        rep.status = SolveStatus::NotAdmissible;
        rep.notes.push_back("target is nowhere positive");
        return rep;
    }
    if (!(total > 0.0) || !(constraint > 0.0)) {
        throw PreconditionError("subcritical problem needs positive total curvature and constraint");
    }
    const Vector mass = mesh.vertex_measures();
    const SparseMatrix& s = ops.stiffness;

    // Reduced functional in w (constant direction removed).
    auto z_of = [&](const Vector& w) { return scaled_exp_sum(a, w, gamma); };
    auto reduced = [&](const Vector& w) {
        const auto [zm, shift] = z_of(w);
        if (!(zm > 0.0)) {
            return kInf;
        }
        return 0.5 * w.dot(s * w) + loads.dot(w) - total / gamma * (std::log(zm) + shift);
    };
    auto gradient = [&](const Vector& w, Vector& q, double& z) {
        const auto [zm, shift] = z_of(w);
        q = a.cwiseProduct((gamma * w.array() - shift).exp().matrix());
        z = zm;
        return Vector(s * w + loads - total * q / zm);
    };

    // Feasible start: lift the positive part of the target.
    Vector w = Vector::Zero(nv);
    for (double lift = 0.0; !(z_of(w).first > 0.0); lift += 1.0) {
        if (lift > 200.0) {
            rep.status = SolveStatus::NotAdmissible;
            rep.notes.push_back("no admissible start");
            return rep;
        }
        for (Eigen::Index i = 0; i < nv; ++i) {
            w[i] = a[i] > 0.0 ? lift : 0.0;
        }
    }
    w.array() -= mass.dot(w) / mass.sum();

    const SparseMatrix hmat = SparseMatrix(s + diag(mass));
    Eigen::SimplicialLDLT<SparseMatrix> precond(hmat);
    double value = reduced(w);
    int it = 0;
    for (; it < cfg.max_iterations; ++it) {
        Vector q;
        double z = 0.0;
        const Vector g = gradient(w, q, z);
        if (sup(g) < 1e-13 * std::max(1.0, sup(loads))) {
            break;
        }
        // Newton direction from the bordered Hessian
        //   [S - c diag(q)/z   q    mass]
        //   [q^T            -z^2/c    0 ]   c = total * gamma
        //   [mass^T             0     0 ]
        const double cc = total * gamma;
        std::vector<Triplet> t;
        const SparseMatrix h0 = SparseMatrix(s - diag(Vector(cc * q / z)));
        for (int col = 0; col < h0.outerSize(); ++col) {
            for (SparseMatrix::InnerIterator itr(h0, col); itr; ++itr) {
                t.emplace_back(itr.row(), itr.col(), itr.value());
            }
        }
        for (Eigen::Index i = 0; i < nv; ++i) {
            if (q[i] != 0.0) {
                t.emplace_back(i, nv, q[i]);
                t.emplace_back(nv, i, q[i]);
            }
            t.emplace_back(i, nv + 1, mass[i]);
            t.emplace_back(nv + 1, i, mass[i]);
        }
        t.emplace_back(nv, nv, -z * z / cc);
        SparseMatrix hb(nv + 2, nv + 2);
        hb.setFromTriplets(t.begin(), t.end());
        Vector dir;
        Eigen::SparseLU<SparseMatrix> lu(hb);
        if (lu.info() == Eigen::Success) {
            Vector rhs = Vector::Zero(nv + 2);
            rhs.head(nv) = -g;
            const Vector x = lu.solve(rhs);
            if (x.allFinite()) {
                dir = x.head(nv);
            }
        }
        if (dir.size() == 0 || g.dot(dir) >= 0.0) {
            dir = -precond.solve(g);
            dir.array() -= mass.dot(dir) / mass.sum();
        }
        const double slope = g.dot(dir);
        double step = 1.0;
        bool accepted = false;
        for (int k = 0; k < 60; ++k) {
            const Vector trial = w + step * dir;
            const double v = reduced(trial);
            if (v <= value + 1e-4 * step * slope) {
                w = trial;
                value = v;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            break;
        }
    }
    rep.iterations = it;

    const auto [zm, shift] = z_of(w);
    const double lift = (std::log(constraint) - std::log(zm) - shift) / gamma;
    const Vector u = (w.array() + lift).matrix();
    rep.u = ScalarField(Support::All, u);
    const Vector q = a.cwiseProduct((gamma * u).array().exp().matrix());
    const Vector eq = s * u + loads - q;
    double ri = 0.0;
    double rb = 0.0;
    for (Eigen::Index i = 0; i < nv; ++i) {
        if (weight[i] > 0.0) {
            rb = std::max(rb, std::abs(eq[i]) / weight[i]);
        } else {
            const double m = is_boundary_row(ops, i) ? ops.mass_boundary[i] : ops.mass_interior[i];
            ri = std::max(ri, std::abs(eq[i]) / m);
        }
    }
    if (side == TargetSide::Interior) {
        std::swap(ri, rb);
    }
    rep.residual_interior = ri;
    rep.residual_boundary = rb;
    const double constraint_residual = std::abs(q.sum() - constraint);
    rep.diagnostics["constraint_residual"] = constraint_residual;
    rep.multipliers = std::make_pair(0.0, -total / constraint);
    if (ri < cfg.tol && rb < cfg.tol && constraint_residual < cfg.tol) {
        rep.status = SolveStatus::Converged;
    } else {
        rep.status = SolveStatus::Diverged;
        rep.notes.push_back("no critical point found; the exponent-one limit is obstructed by the "
                            "Kazdan-Warner-Escobar integral");
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Bounded solutions

double admissible_shift(const Mesh& mesh, const ScalarField& h, const ScalarField& u)
{
    const SparseMatrix s = assemble_stiffness(mesh);
    const Vector mb = mesh.boundary_vertex_measures();
    const Vector su = s * u.values;
    double limit = kInf;
    for (Eigen::Index i = 0; i < mb.size(); ++i) {
        if (mb[i] <= 0.0 || h[i] >= 0.0) {
            continue;
        }
        const double q = su[i] + mb[i] * h[i] * u[i];
        if (q <= 0.0) {
            throw PreconditionError("u does not satisfy d_nu u + h u > 0");
        }
        limit = std::min(limit, q / (mb[i] * -h[i]));
    }
    return limit == kInf ? 1.0 : 0.5 * limit;
}

TransformResult bound_solution_transform(const Mesh& mesh, const ScalarField& h, const ScalarField& u, double alpha,
                                         double c0, const SolverConfig& cfg)
{
    const Eigen::Index nv = mesh.num_vertices();
    if (u.size() != nv || h.size() != nv) {
        throw PreconditionError("fields must have one value per vertex");
    }
    if (!(c0 > 0.0)) {
        throw PreconditionError("c must be positive");
    }
    const Vector v = (u.values.array() + alpha).matrix();
    if (!(v.minCoeff() > 0.0)) {
        throw PreconditionError("u + alpha must be positive");
    }
    const SparseMatrix s = assemble_stiffness(mesh);
    const Vector mb = mesh.boundary_vertex_measures();
    const Vector d = s.diagonal();
    for (double c = c0; c >= cfg.c_min; c *= 0.5) {
        const Vector w = (1.0 - (-c * v.array()).exp()).matrix();
        const Vector sw = s * w;
        double imin = kInf;
        double bmin = kInf;
        bool ok = true;
        for (Eigen::Index i = 0; i < nv; ++i) {
            if (mb[i] > 0.0) {
                const double val = sw[i] + mb[i] * h[i] * w[i];
                bmin = std::min(bmin, val);
                ok = ok && val > 0.0;
            } else {
                imin = std::min(imin, sw[i]);
                ok = ok && sw[i] >= -1e-12 * d[i] * std::abs(w[i]);
            }
        }
        if (ok) {
            TransformResult out;
            out.w = ScalarField(Support::All, w);
            out.c = c;
            out.alpha = alpha;
            out.lower_bound = 1.0 - std::exp(-c * alpha);
            out.upper_bound = 1.0;
            out.interior_min = imin;
            out.boundary_min = bmin;
            return out;
        }
    }
    throw SolverError("no admissible c above c_min");
}

bool mixed_admissibility(int n, const ScalarField& r, const ScalarField& h)
{
    const double bound = 1.0 / std::sqrt(static_cast<double>(n) * (n - 1));
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        if (!(r[i] < 0.0) || !(h[i] / std::sqrt(-r[i]) < bound)) {
            return false;
        }
    }
    return true;
}

} // namespace confcurv
