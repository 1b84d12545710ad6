#include "confcurv/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace confcurv {

std::string to_string(EigenKind k)
{
    switch (k) {
    case EigenKind::Lambda1Lg:
        return "lambda1_Lg";
    case EigenKind::Sigma1Bg:
        return "sigma1_Bg";
    case EigenKind::Mu1Domain:
        return "mu1_domain";
    case EigenKind::Sigma1Domain:
        return "sigma1_domain";
    case EigenKind::RobinMR:
        return "robin_mR";
    }
    return "unknown";
}

std::string to_string(SignClass s)
{
    switch (s) {
    case SignClass::Neg:
        return "NEG";
    case SignClass::Zero:
        return "ZERO";
    case SignClass::Pos:
        return "POS";
    }
    return "unknown";
}

SignClass classify_sign(double value, double tol)
{
    if (std::abs(value) <= tol) {
        return SignClass::Zero;
    }
    return value > 0.0 ? SignClass::Pos : SignClass::Neg;
}

double default_sign_tolerance(const Mesh& mesh, const BackgroundGeometry& bg)
{
    const double h = mesh.max_edge_length();
    return std::max(1e-8, 10.0 * h * h * bg.sup_norm());
}

double sigma1_sign_tolerance(const OperatorSet& ops, double lambda_tol)
{
    // Same band as lambda1 after rescaling by the ratio of the two Rayleigh
    // quotients at constants: sigma = (beta/alpha) |M| / |dM| lambda.
    double ratio = ops.mass_interior.sum() / ops.mass_boundary.sum();
    if (ops.n >= 3) {
        const DimensionConstants k = DimensionConstants::of(ops.n);
        ratio *= k.beta / k.alpha;
    }
    return std::max(1e-8, lambda_tol * ratio);
}

double rayleigh_quotient(const SparseMatrix& k, const Vector& b, const Vector& t)
{
    return t.dot(k * t) / t.dot(b.cwiseProduct(t));
}

namespace {

using DenseSolver = Eigen::SelfAdjointEigenSolver<Matrix>;

SparseMatrix diagonal(const Vector& d)
{
    SparseMatrix m(d.size(), d.size());
    std::vector<Triplet> t;
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d[i] != 0.0) {
            t.emplace_back(i, i, d[i]);
        }
    }
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

// Sub-block of a sparse matrix picked by row and column index maps
// (-1 = dropped).
SparseMatrix block(const SparseMatrix& a, const std::vector<int>& row_map, Eigen::Index rows,
                   const std::vector<int>& col_map, Eigen::Index cols)
{
    std::vector<Triplet> t;
    for (int k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            const int r = row_map[static_cast<std::size_t>(it.row())];
            const int c = col_map[static_cast<std::size_t>(it.col())];
            if (r >= 0 && c >= 0) {
                t.emplace_back(r, c, it.value());
            }
        }
    }
    SparseMatrix out(rows, cols);
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

bool positive_definite(const Eigen::SimplicialLDLT<SparseMatrix>& f)
{
    return f.info() == Eigen::Success && (f.vectorD().array() > 0.0).all();
}

GeneralizedPair dense_path(const SparseMatrix& k, const Vector& b)
{
    const Eigen::Index n = k.rows();
    std::vector<int> pmap(static_cast<std::size_t>(n), -1);
    std::vector<int> qmap(static_cast<std::size_t>(n), -1);
    std::vector<int> pidx;
    std::vector<int> qidx;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (b[i] > 0.0) {
            pmap[static_cast<std::size_t>(i)] = static_cast<int>(pidx.size());
            pidx.push_back(static_cast<int>(i));
        } else {
            qmap[static_cast<std::size_t>(i)] = static_cast<int>(qidx.size());
            qidx.push_back(static_cast<int>(i));
        }
    }
    const auto p = static_cast<Eigen::Index>(pidx.size());
    const auto q = static_cast<Eigen::Index>(qidx.size());
    Matrix reduced = Matrix(block(k, pmap, p, pmap, p));
    Matrix ext;
    if (q > 0) {
        const SparseMatrix kqq = block(k, qmap, q, qmap, q);
        const SparseMatrix kqp = block(k, qmap, q, pmap, p);
        Eigen::SimplicialLDLT<SparseMatrix> f(kqq);
        if (!positive_definite(f)) {
            throw SolverError("operator restricted to unweighted rows is not positive definite");
        }
        ext = f.solve(Matrix(kqp));
        reduced -= Matrix(kqp.transpose()) * ext;
    }
    Vector scale(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        scale[i] = 1.0 / std::sqrt(b[pidx[static_cast<std::size_t>(i)]]);
    }
    Matrix c = scale.asDiagonal() * reduced * scale.asDiagonal();
    c = 0.5 * (c + c.transpose()).eval();
    DenseSolver es(c);
    if (es.info() != Eigen::Success) {
        throw SolverError("dense symmetric eigensolver failed");
    }
    const Vector xp = scale.cwiseProduct(es.eigenvectors().col(0));
    GeneralizedPair out;
    out.value = es.eigenvalues()[0];
    out.vector = Vector::Zero(n);
    for (Eigen::Index i = 0; i < p; ++i) {
        out.vector[pidx[static_cast<std::size_t>(i)]] = xp[i];
    }
    if (q > 0) {
        const Vector xq = -ext * xp;
        for (Eigen::Index i = 0; i < q; ++i) {
            out.vector[qidx[static_cast<std::size_t>(i)]] = xq[i];
        }
    }
    out.method = q > 0 ? "dense-schur" : "dense";
    return out;
}

// B-orthonormal basis of the columns of x.
Matrix b_orthonormalize(const Matrix& x_in, const Vector& b)
{
    // Euclidean QR first so that widely different column scales do not
    // spoil the Gram matrix.
    Eigen::HouseholderQR<Matrix> qr(x_in);
    const Matrix x = qr.householderQ() * Matrix::Identity(x_in.rows(), x_in.cols());
    Matrix g = x.transpose() * b.asDiagonal() * x;
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success) {
        throw SolverError("iteration block lost rank");
    }
    return llt.matrixL().solve(x.transpose()).transpose();
}

GeneralizedPair iterative_path(const SparseMatrix& k, const Vector& b, const EigenOptions& opts)
{
    const Eigen::Index n = k.rows();
    const Eigen::Index support = (b.array() > 0.0).count();
    const Eigen::Index width = std::min<Eigen::Index>(4, support);
    const SparseMatrix bm = diagonal(b);

    // Start block: constants plus a few smooth deterministic variations.
    Matrix x(n, width);
    for (Eigen::Index j = 0; j < width; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            x(i, j) = j == 0 ? 1.0 : std::cos(0.37 * static_cast<double>(j * i) + 0.1 * j);
        }
    }
    // Shift below the spectrum: start from the Rayleigh quotient of the
    // constant vector and move left until K - sB is positive definite.
    const double rq = rayleigh_quotient(k, b, Vector::Ones(n));
    double gap = std::max(1.0, std::abs(rq));
    double shift = rq - gap;
    Eigen::SimplicialLDLT<SparseMatrix> f;
    for (int attempt = 0;; ++attempt) {
        f.compute(SparseMatrix(k - shift * bm));
        if (positive_definite(f)) {
            break;
        }
        if (attempt > 60) {
            throw SolverError("no shift below the spectrum found");
        }
        gap *= 2.0;
        shift = rq - gap;
    }

    GeneralizedPair out;
    double previous = std::numeric_limits<double>::infinity();
    bool refined = false;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        x = f.solve(Matrix(bm * x));
        x = b_orthonormalize(x, b);
        const Matrix kr = x.transpose() * (k * x);
        DenseSolver es(0.5 * (kr + kr.transpose()));
        x = x * es.eigenvectors();
        const double theta = es.eigenvalues()[0];
        out.iterations = it;
        const Vector r = k * x.col(0) - theta * b.cwiseProduct(x.col(0));
        const double scale = std::max(1.0, std::abs(theta));
        if (std::abs(theta - previous) <= opts.convergence * scale
            && r.norm() <= 1e-8 * scale * std::sqrt(b.maxCoeff())) {
            out.value = theta;
            out.vector = x.col(0);
            out.method = "block-inverse-iteration";
            return out;
        }
        previous = theta;
        // Once the Ritz values are informative, move the shift closer to the
        // lowest eigenvalue while staying below it.
        if (!refined && it >= 5 && width > 1) {
            const double candidate = theta - 0.5 * (es.eigenvalues()[1] - theta);
            if (candidate > shift) {
                Eigen::SimplicialLDLT<SparseMatrix> g(SparseMatrix(k - candidate * bm));
                if (positive_definite(g)) {
                    f.compute(SparseMatrix(k - candidate * bm));
                    shift = candidate;
                }
            }
            refined = true;
        }
    }
    throw SolverError("block inverse iteration did not converge");
}

void normalize_positive(GeneralizedPair& pair, const Vector& b, EigenKind kind)
{
    Vector& v = pair.vector;
    const double norm = std::sqrt(v.dot(b.cwiseProduct(v)));
    v /= norm;
    if (v.sum() < 0.0) {
        v = -v;
    }
    const double worst = v.minCoeff();
    if (worst < -1e-10) {
        std::ostringstream msg;
        msg << "first eigenfunction of " << to_string(kind) << " changes sign after normalization (min "
            << worst << ", max " << v.maxCoeff() << ")";
        throw SolverError(msg.str());
    }
}

EigenResult finish(EigenKind kind, GeneralizedPair pair, const Vector& b, double tol)
{
    normalize_positive(pair, b, kind);
    EigenResult out;
    out.kind = kind;
    out.value = pair.value;
    out.eigenfunction = ScalarField(Support::All, pair.vector);
    out.tolerance = tol;
    out.sign_class = classify_sign(pair.value, tol);
    out.method = pair.method;
    out.iterations = pair.iterations;
    return out;
}

double field_tolerance(const Mesh& mesh, const Vector& f)
{
    const double h = mesh.max_edge_length();
    return std::max(1e-8, 10.0 * h * h * (f.size() > 0 ? f.cwiseAbs().maxCoeff() : 0.0));
}

} // namespace

GeneralizedPair lowest_generalized_eigenpair(const SparseMatrix& k, const Vector& b, const EigenOptions& opts)
{
    if (k.rows() != k.cols() || b.size() != k.rows()) {
        throw PreconditionError("eigenproblem matrices have inconsistent sizes");
    }
    if ((b.array() < 0.0).any()) {
        throw PreconditionError("eigenproblem weight must be non-negative");
    }
    const Eigen::Index support = (b.array() > 0.0).count();
    if (support == 0) {
        throw PreconditionError("eigenproblem weight vanishes identically");
    }
    if (support <= opts.dense_limit) {
        return dense_path(k, b);
    }
    return iterative_path(k, b, opts);
}

EigenSystem lambda1_system(const OperatorSet& ops)
{
    double alpha = 1.0;
    double beta = 1.0;
    if (ops.n >= 3) {
        const DimensionConstants c = DimensionConstants::of(ops.n);
        alpha = c.alpha;
        beta = c.beta;
    }
    EigenSystem sys;
    sys.k = alpha * ops.stiffness
            + diagonal(ops.curvature_load_interior + (alpha / beta) * ops.curvature_load_boundary);
    sys.b = ops.mass_interior;
    return sys;
}

EigenSystem sigma1_system(const OperatorSet& ops)
{
    double alpha = 1.0;
    double beta = 1.0;
    if (ops.n >= 3) {
        const DimensionConstants c = DimensionConstants::of(ops.n);
        alpha = c.alpha;
        beta = c.beta;
    }
    EigenSystem sys;
    sys.k = beta * ops.stiffness
            + diagonal((beta / alpha) * ops.curvature_load_interior + ops.curvature_load_boundary);
    sys.b = ops.mass_boundary;
    return sys;
}

EigenResult lambda1(const Mesh& mesh, const BackgroundGeometry& bg, const EigenOptions& opts)
{
    const EigenSystem sys = lambda1_system(assemble_operators(mesh, bg));
    const double tol = opts.sign_tolerance.value_or(default_sign_tolerance(mesh, bg));
    return finish(EigenKind::Lambda1Lg, lowest_generalized_eigenpair(sys.k, sys.b, opts), sys.b, tol);
}

EigenResult sigma1(const Mesh& mesh, const BackgroundGeometry& bg, const EigenOptions& opts)
{
    const OperatorSet ops = assemble_operators(mesh, bg);
    const EigenSystem sys = sigma1_system(ops);
    if (sys.b.sum() <= 0.0) {
        throw PreconditionError("sigma1 needs a non-empty boundary");
    }
    const double tol = opts.sign_tolerance.value_or(sigma1_sign_tolerance(ops, default_sign_tolerance(mesh, bg)));
    return finish(EigenKind::Sigma1Bg, lowest_generalized_eigenpair(sys.k, sys.b, opts), sys.b, tol);
}

EigenResult sigma1_domain(const Mesh& mesh, const ScalarField& h, const EigenOptions& opts)
{
    if (h.size() != mesh.num_vertices()) {
        throw PreconditionError("h needs one value per vertex");
    }
    const Vector mb = mesh.boundary_vertex_measures(true);
    if (mb.sum() <= 0.0) {
        throw PreconditionError("sigma1_domain needs a non-empty D0 boundary");
    }
    const SparseMatrix k = assemble_stiffness(mesh) + diagonal(mb.cwiseProduct(h.values));
    const double tol = opts.sign_tolerance.value_or(field_tolerance(mesh, h.values));
    return finish(EigenKind::Sigma1Domain, lowest_generalized_eigenpair(k, mb, opts), mb, tol);
}

EigenResult mu1_domain(const Mesh& mesh, const ScalarField& f, const EigenOptions& opts)
{
    if (f.size() != mesh.num_vertices()) {
        throw PreconditionError("f needs one value per vertex");
    }
    const Vector m = mesh.vertex_measures();
    const SparseMatrix k = assemble_stiffness(mesh) + diagonal(m.cwiseProduct(f.values));
    const double tol = opts.sign_tolerance.value_or(field_tolerance(mesh, f.values));
    return finish(EigenKind::Mu1Domain, lowest_generalized_eigenpair(k, m, opts), m, tol);
}

EigenResult robin_mR(const Mesh& mesh, const ScalarField& r, double m, const EigenOptions& opts)
{
    EigenResult out = mu1_domain(mesh, ScalarField(Support::All, -m * r.values), opts);
    out.kind = EigenKind::RobinMR;
    return out;
}

std::pair<double, EigenResult> robin_mR_negative(const Mesh& mesh, const ScalarField& r, double m0, double m_max,
                                                 const EigenOptions& opts)
{
    // The zero band is fixed by R itself, not by the growing potential m R.
    EigenOptions fixed = opts;
    if (!fixed.sign_tolerance) {
        fixed.sign_tolerance = field_tolerance(mesh, r.values);
    }
    for (double m = m0; m <= m_max; m *= 2.0) {
        EigenResult e = robin_mR(mesh, r, m, fixed);
        if (e.sign_class == SignClass::Neg) {
            return {m, std::move(e)};
        }
    }
    throw SolverError("no m up to the cap makes the Robin eigenvalue negative");
}

} // namespace confcurv
