#include "confcurv/fem.hpp"

#include <Eigen/SparseLU>

#include <cmath>

namespace confcurv {

DimensionConstants DimensionConstants::of(int n)
{
    if (n < 3) {
        throw DimensionError("conformal Laplacian constants need n >= 3");
    }
    DimensionConstants k;
    const double nd = n;
    k.n = n;
    k.a = (nd + 2.0) / (nd - 2.0);
    k.b = nd / (nd - 2.0);
    k.beta = 2.0 / (nd - 2.0);
    k.alpha = 2.0 * (nd - 1.0) * k.beta;
    k.c_n = (nd - 2.0) / (4.0 * (nd - 1.0));
    return k;
}

namespace {

template <int D>
void add_cell_stiffness(const Mesh& mesh, Eigen::Index c, std::vector<Triplet>& out)
{
    Eigen::Matrix<double, D*(D + 1) / 2, 1> l;
    for (int k = 0; k < D * (D + 1) / 2; ++k) {
        l[k] = mesh.edge_lengths()[mesh.cell_edges()(c, k)];
    }
    const SimplexMetric<D> s(l);
    if (!s.valid) {
        throw DegenerateCellError("cell " + std::to_string(c) + " is degenerate", static_cast<int>(c));
    }
    const auto k = s.stiffness();
    for (int i = 0; i <= D; ++i) {
        for (int j = 0; j <= D; ++j) {
            out.emplace_back(mesh.cells()(c, i), mesh.cells()(c, j), k(i, j));
        }
    }
}

SparseMatrix diagonal(const Vector& d)
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

// Keeps the rows of `a` selected by `keep`.
SparseMatrix select_rows(const SparseMatrix& a, const std::vector<bool>& keep, bool value)
{
    std::vector<Triplet> t;
    for (int k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            if (keep[static_cast<std::size_t>(it.row())] == value) {
                t.emplace_back(it.row(), it.col(), it.value());
            }
        }
    }
    SparseMatrix out(a.rows(), a.cols());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

} // namespace

SparseMatrix assemble_stiffness(const Mesh& mesh)
{
    std::vector<Triplet> t;
    const int d = mesh.dim();
    t.reserve(static_cast<std::size_t>(mesh.num_cells() * (d + 1) * (d + 1)));
    for (Eigen::Index c = 0; c < mesh.num_cells(); ++c) {
        if (d == 2) {
            add_cell_stiffness<2>(mesh, c, t);
        } else {
            add_cell_stiffness<3>(mesh, c, t);
        }
    }
    SparseMatrix s(mesh.num_vertices(), mesh.num_vertices());
    s.setFromTriplets(t.begin(), t.end());
    s.makeCompressed();
    return s;
}

OperatorSet assemble_operators(const Mesh& mesh, const BackgroundGeometry& bg)
{
    bg.validate(mesh);
    OperatorSet ops;
    ops.n = bg.n;
    ops.stiffness = assemble_stiffness(mesh);
    ops.mass_interior = mesh.vertex_measures();
    ops.mass_boundary = mesh.boundary_vertex_measures(true);
    ops.curvature_load_interior = ops.mass_interior.cwiseProduct(bg.interior_curvature.values);
    ops.curvature_load_boundary = ops.mass_boundary.cwiseProduct(bg.boundary_curvature.values);
    ops.boundary_rows.resize(static_cast<std::size_t>(mesh.num_vertices()));
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
        ops.boundary_rows[static_cast<std::size_t>(i)] = ops.mass_boundary[i] > 0.0;
    }
    for (int k = 0; k < ops.stiffness.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(ops.stiffness, k); it; ++it) {
            if (it.row() < it.col() && it.value() > 0.0) {
                ++ops.negative_weight_edges;
            }
        }
    }
    return ops;
}

void check_conformal_factor(int n, const Vector& u, Eigen::Index num_vertices)
{
    if (u.size() != num_vertices) {
        throw PreconditionError("conformal factor needs one value per vertex");
    }
    if (!u.allFinite()) {
        throw PreconditionError("conformal factor has non-finite entries");
    }
    if (n >= 3 && (u.array() <= 0.0).any()) {
        throw PreconditionError("conformal factor must be positive for n >= 3");
    }
}

CurvaturePair eval_F(const OperatorSet& ops, const Vector& u)
{
    check_conformal_factor(ops.n, u, ops.stiffness.rows());
    const Eigen::Index nv = u.size();
    CurvaturePair out{ScalarField::constant(Support::Interior, nv, 0.0),
                      ScalarField::constant(Support::Boundary, nv, 0.0)};
    const Vector su = ops.stiffness * u;
    if (ops.n == 2) {
        for (Eigen::Index i = 0; i < nv; ++i) {
            if (ops.boundary_rows[static_cast<std::size_t>(i)]) {
                out.boundary[i] = std::exp(-u[i]) * (su[i] + ops.curvature_load_boundary[i]) / ops.mass_boundary[i];
            } else {
                out.interior[i] = std::exp(-2.0 * u[i]) * (su[i] + ops.curvature_load_interior[i]) / ops.mass_interior[i];
            }
        }
        return out;
    }
    const DimensionConstants k = DimensionConstants::of(ops.n);
    for (Eigen::Index i = 0; i < nv; ++i) {
        if (ops.boundary_rows[static_cast<std::size_t>(i)]) {
            out.boundary[i] = std::pow(u[i], -k.b)
                              * (k.beta * su[i] + ops.curvature_load_boundary[i] * u[i]) / ops.mass_boundary[i];
        } else {
            out.interior[i] = std::pow(u[i], -k.a)
                              * (k.alpha * su[i] + ops.curvature_load_interior[i] * u[i]) / ops.mass_interior[i];
        }
    }
    return out;
}

CurvaturePair eval_F(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& u)
{
    return eval_F(assemble_operators(mesh, bg), u.values);
}

Vector weak_residual(const OperatorSet& ops, const Vector& u, const Vector& f, const Vector& h)
{
    check_conformal_factor(ops.n, u, ops.stiffness.rows());
    const Eigen::Index nv = u.size();
    const Vector su = ops.stiffness * u;
    Vector g(nv);
    if (ops.n == 2) {
        for (Eigen::Index i = 0; i < nv; ++i) {
            if (ops.boundary_rows[static_cast<std::size_t>(i)]) {
                g[i] = su[i] + ops.curvature_load_boundary[i] - ops.mass_boundary[i] * h[i] * std::exp(u[i]);
            } else {
                g[i] = su[i] + ops.curvature_load_interior[i] - ops.mass_interior[i] * f[i] * std::exp(2.0 * u[i]);
            }
        }
        return g;
    }
    const DimensionConstants k = DimensionConstants::of(ops.n);
    for (Eigen::Index i = 0; i < nv; ++i) {
        if (ops.boundary_rows[static_cast<std::size_t>(i)]) {
            g[i] = (k.alpha / k.beta)
                   * (k.beta * su[i] + ops.curvature_load_boundary[i] * u[i]
                      - ops.mass_boundary[i] * h[i] * std::pow(u[i], k.b));
        } else {
            g[i] = k.alpha * su[i] + ops.curvature_load_interior[i] * u[i]
                   - ops.mass_interior[i] * f[i] * std::pow(u[i], k.a);
        }
    }
    return g;
}

LinearizedOperator assemble_linearization(const OperatorSet& ops, const Vector& u)
{
    check_conformal_factor(ops.n, u, ops.stiffness.rows());
    const Eigen::Index nv = u.size();
    const Vector su = ops.stiffness * u;
    LinearizedOperator lin;
    lin.boundary_rows = ops.boundary_rows;
    lin.row_scale.resize(nv);
    Vector da(nv);
    Vector db(nv);
    double b_weight = 1.0;
    double s_weight = 1.0;
    if (ops.n == 2) {
        for (Eigen::Index i = 0; i < nv; ++i) {
            da[i] = -2.0 * (su[i] + ops.curvature_load_interior[i]);
            db[i] = -(su[i] + ops.curvature_load_boundary[i]);
            lin.row_scale[i] = ops.boundary_rows[static_cast<std::size_t>(i)]
                                   ? std::exp(-u[i]) / ops.mass_boundary[i]
                                   : std::exp(-2.0 * u[i]) / ops.mass_interior[i];
        }
    } else {
        const DimensionConstants k = DimensionConstants::of(ops.n);
        s_weight = k.alpha;
        b_weight = k.alpha / k.beta;
        for (Eigen::Index i = 0; i < nv; ++i) {
            const double r = k.alpha * su[i] + ops.curvature_load_interior[i] * u[i];
            const double s = k.beta * su[i] + ops.curvature_load_boundary[i] * u[i];
            da[i] = ops.curvature_load_interior[i] - k.a * r / u[i];
            db[i] = b_weight * (ops.curvature_load_boundary[i] - k.b * s / u[i]);
            lin.row_scale[i] = ops.boundary_rows[static_cast<std::size_t>(i)]
                                   ? std::pow(u[i], -k.b) / ops.mass_boundary[i] / b_weight
                                   : std::pow(u[i], -k.a) / ops.mass_interior[i];
        }
    }
    const SparseMatrix scaled = s_weight * ops.stiffness;
    lin.A = scaled + diagonal(da);
    lin.B = scaled + diagonal(db);
    lin.coupled = select_rows(lin.A, ops.boundary_rows, false) + select_rows(lin.B, ops.boundary_rows, true);
    lin.coupled.makeCompressed();
    return lin;
}

LinearizedOperator assemble_linearization(const Mesh& mesh, const BackgroundGeometry& bg, const ScalarField& u)
{
    return assemble_linearization(assemble_operators(mesh, bg), u.values);
}

SingularPair smallest_singular_value(const SparseMatrix& c, int max_iterations, double tol)
{
    SingularPair out;
    const Eigen::Index n = c.rows();
    out.vector = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(c);
    if (lu.info() != Eigen::Success) {
        out.value = 0.0;
        return out;
    }
    // Deterministic start with components along every direction.
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x[i] = 1.0 + 0.5 * std::sin(1.0 + 3.7 * static_cast<double>(i));
    }
    x.normalize();
    double previous = -1.0;
    for (int it = 1; it <= max_iterations; ++it) {
        const Vector y = lu.transpose().solve(x);
        Vector z = lu.solve(y);
        const double growth = z.norm();
        if (!std::isfinite(growth) || growth == 0.0) {
            out.value = 0.0;
            out.iterations = it;
            return out;
        }
        z /= growth;
        // sigma^2 estimate from the Rayleigh quotient of (C^T C)^{-1}.
        const double sigma = (c * z).norm();
        x = z;
        out.iterations = it;
        if (previous >= 0.0 && std::abs(sigma - previous) <= tol * std::max(sigma, 1e-300)) {
            out.value = sigma;
            out.vector = x;
            return out;
        }
        if (sigma < 1e-13 * std::max(1.0, c.norm())) {
            out.value = sigma;
            out.vector = x;
            return out;
        }
        previous = sigma;
    }
    throw SolverError("smallest singular value iteration did not converge in "
                      + std::to_string(max_iterations) + " steps");
}

SingularPair smallest_singular_value(const LinearizedOperator& l)
{
    return smallest_singular_value(l.coupled);
}

} // namespace confcurv
