#include "confcurv/mesh.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace confcurv {

template <int D>
SimplexMetric<D>::SimplexMetric(const Eigen::Matrix<double, D*(D + 1) / 2, 1>& lengths)
{
    constexpr auto pairs = local_edges<D>();
    Eigen::Matrix<double, D + 1, D + 1> sq = Eigen::Matrix<double, D + 1, D + 1>::Zero();
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double l2 = lengths[static_cast<Eigen::Index>(k)] * lengths[static_cast<Eigen::Index>(k)];
        sq(pairs[k][0], pairs[k][1]) = l2;
        sq(pairs[k][1], pairs[k][0]) = l2;
    }
    for (int i = 0; i < D; ++i) {
        for (int j = 0; j < D; ++j) {
            gram(i, j) = 0.5 * (sq(0, i + 1) + sq(0, j + 1) - sq(i + 1, j + 1));
        }
    }
    if (!lengths.allFinite() || (lengths.array() <= 0.0).any()) {
        return;
    }
    Eigen::LLT<Gram> llt(gram);
    if (llt.info() != Eigen::Success) {
        return;
    }
    const double det = gram.determinant();
    if (!(det > 0.0)) {
        return;
    }
    double factorial = 1.0;
    for (int k = 2; k <= D; ++k) {
        factorial *= k;
    }
    measure = std::sqrt(det) / factorial;
    // Relative floor: a sliver whose measure is rounding noise is degenerate.
    const double scale = std::pow(lengths.maxCoeff(), D);
    valid = measure > 1e-14 * scale;
}

template <int D>
typename SimplexMetric<D>::Local SimplexMetric<D>::stiffness() const
{
    Eigen::Matrix<double, D, D + 1> grad_map;
    grad_map.col(0).setConstant(-1.0);
    grad_map.template rightCols<D>().setIdentity();
    const Gram ginv = gram.inverse();
    return measure * grad_map.transpose() * ginv * grad_map;
}

template struct SimplexMetric<1>;
template struct SimplexMetric<2>;
template struct SimplexMetric<3>;

namespace {

template <int D>
double measure_of(const IndexMatrix& cell_edges, const Vector& lengths, Eigen::Index c)
{
    Eigen::Matrix<double, D*(D + 1) / 2, 1> l;
    for (int k = 0; k < D * (D + 1) / 2; ++k) {
        l[k] = lengths[cell_edges(c, k)];
    }
    SimplexMetric<D> s(l);
    return s.valid ? s.measure : 0.0;
}

} // namespace

Mesh::Mesh(Matrix vertices, IndexMatrix cells)
    : vertices_(std::move(vertices)), cells_(std::move(cells))
{
    const int d = dim();
    if (d != 2 && d != 3) {
        throw DimensionError("cells must be triangles or tetrahedra");
    }
    const Eigen::Index nv = vertices_.rows();
    for (Eigen::Index c = 0; c < cells_.rows(); ++c) {
        for (Eigen::Index k = 0; k < cells_.cols(); ++k) {
            if (cells_(c, k) < 0 || cells_(c, k) >= nv) {
                throw ParseError("cell " + std::to_string(c) + " references vertex "
                                 + std::to_string(cells_(c, k)) + " out of range");
            }
        }
    }
    build_topology();
    edge_lengths_.resize(edges_.rows());
    for (Eigen::Index e = 0; e < edges_.rows(); ++e) {
        edge_lengths_[e] = (vertices_.row(edges_(e, 0)) - vertices_.row(edges_(e, 1))).norm();
    }
    compute_measures();
}

void Mesh::build_topology()
{
    const int d = dim();
    const int per_cell = d * (d + 1) / 2;
    std::vector<std::array<int, 2>> all;
    all.reserve(static_cast<std::size_t>(cells_.rows() * per_cell));
    for (Eigen::Index c = 0; c < cells_.rows(); ++c) {
        for (int i = 0; i <= d; ++i) {
            for (int j = i + 1; j <= d; ++j) {
                const int a = cells_(c, i);
                const int b = cells_(c, j);
                if (a == b) {
                    throw DegenerateCellError("cell " + std::to_string(c) + " repeats a vertex",
                                              static_cast<int>(c));
                }
                all.push_back({std::min(a, b), std::max(a, b)});
            }
        }
    }
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    edges_.resize(static_cast<Eigen::Index>(all.size()), 2);
    for (std::size_t e = 0; e < all.size(); ++e) {
        edges_(static_cast<Eigen::Index>(e), 0) = all[e][0];
        edges_(static_cast<Eigen::Index>(e), 1) = all[e][1];
    }
    cell_edges_.resize(cells_.rows(), per_cell);
    for (Eigen::Index c = 0; c < cells_.rows(); ++c) {
        int k = 0;
        for (int i = 0; i <= d; ++i) {
            for (int j = i + 1; j <= d; ++j) {
                cell_edges_(c, k++) = edge_index(cells_(c, i), cells_(c, j));
            }
        }
    }

    // Facets with a single incident cell.
    std::map<std::vector<int>, int> count;
    for (Eigen::Index c = 0; c < cells_.rows(); ++c) {
        for (int skip = 0; skip <= d; ++skip) {
            std::vector<int> f;
            for (int i = 0; i <= d; ++i) {
                if (i != skip) {
                    f.push_back(cells_(c, i));
                }
            }
            std::sort(f.begin(), f.end());
            ++count[f];
        }
    }
    std::vector<std::vector<int>> boundary;
    for (const auto& [f, k] : count) {
        if (k > 2) {
            throw ParseError("non-manifold facet shared by more than two cells");
        }
        if (k == 1) {
            boundary.push_back(f);
        }
    }
    boundary_facets_.resize(static_cast<Eigen::Index>(boundary.size()), d);
    boundary_mask_.assign(static_cast<std::size_t>(vertices_.rows()), false);
    for (std::size_t f = 0; f < boundary.size(); ++f) {
        for (int k = 0; k < d; ++k) {
            boundary_facets_(static_cast<Eigen::Index>(f), k) = boundary[f][static_cast<std::size_t>(k)];
            boundary_mask_[static_cast<std::size_t>(boundary[f][static_cast<std::size_t>(k)])] = true;
        }
    }
    boundary_tags_.assign(boundary.size(), BoundaryTag::D0);
}

void Mesh::compute_measures()
{
    cell_measures_.resize(cells_.rows());
    for (Eigen::Index c = 0; c < cells_.rows(); ++c) {
        const double m = dim() == 2 ? measure_of<2>(cell_edges_, edge_lengths_, c)
                                    : measure_of<3>(cell_edges_, edge_lengths_, c);
        if (!(m > 0.0)) {
            throw DegenerateCellError("cell " + std::to_string(c)
                                          + " is degenerate or violates the simplex inequalities",
                                      static_cast<int>(c));
        }
        cell_measures_[c] = m;
    }
}

int Mesh::edge_index(int a, int b) const
{
    if (a > b) {
        std::swap(a, b);
    }
    // Edges are sorted lexicographically, so a binary search finds the pair.
    Eigen::Index lo = 0;
    Eigen::Index hi = edges_.rows();
    while (lo < hi) {
        const Eigen::Index mid = (lo + hi) / 2;
        if (edges_(mid, 0) < a || (edges_(mid, 0) == a && edges_(mid, 1) < b)) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if (lo < edges_.rows() && edges_(lo, 0) == a && edges_(lo, 1) == b) {
        return static_cast<int>(lo);
    }
    return -1;
}

Mesh Mesh::with_edge_lengths(Vector lengths) const
{
    if (lengths.size() != edges_.rows()) {
        throw PreconditionError("edge length vector has wrong size");
    }
    Mesh out = *this;
    out.edge_lengths_ = std::move(lengths);
    out.compute_measures();
    return out;
}

Mesh Mesh::with_boundary_tags(std::vector<BoundaryTag> tags) const
{
    if (static_cast<Eigen::Index>(tags.size()) != boundary_facets_.rows()) {
        throw PreconditionError("expected one tag per boundary facet");
    }
    Mesh out = *this;
    out.boundary_tags_ = std::move(tags);
    return out;
}

bool Mesh::has_partition() const
{
    return std::any_of(boundary_tags_.begin(), boundary_tags_.end(),
                       [](BoundaryTag t) { return t == BoundaryTag::DM; });
}

std::vector<bool> Mesh::d0_vertex_mask() const
{
    std::vector<bool> mask(static_cast<std::size_t>(vertices_.rows()), false);
    for (Eigen::Index f = 0; f < boundary_facets_.rows(); ++f) {
        if (boundary_tags_[static_cast<std::size_t>(f)] != BoundaryTag::D0) {
            continue;
        }
        for (Eigen::Index k = 0; k < boundary_facets_.cols(); ++k) {
            mask[static_cast<std::size_t>(boundary_facets_(f, k))] = true;
        }
    }
    return mask;
}

std::vector<int> Mesh::boundary_vertices() const
{
    std::vector<int> out;
    for (std::size_t i = 0; i < boundary_mask_.size(); ++i) {
        if (boundary_mask_[i]) {
            out.push_back(static_cast<int>(i));
        }
    }
    return out;
}

std::vector<int> Mesh::interior_vertices() const
{
    std::vector<int> out;
    for (std::size_t i = 0; i < boundary_mask_.size(); ++i) {
        if (!boundary_mask_[i]) {
            out.push_back(static_cast<int>(i));
        }
    }
    return out;
}

double Mesh::facet_measure(Eigen::Index f) const
{
    if (dim() == 2) {
        return edge_lengths_[edge_index(boundary_facets_(f, 0), boundary_facets_(f, 1))];
    }
    Eigen::Vector3d l(edge_lengths_[edge_index(boundary_facets_(f, 0), boundary_facets_(f, 1))],
                      edge_lengths_[edge_index(boundary_facets_(f, 0), boundary_facets_(f, 2))],
                      edge_lengths_[edge_index(boundary_facets_(f, 1), boundary_facets_(f, 2))]);
    SimplexMetric<2> tri(l);
    return tri.measure;
}

Vector Mesh::vertex_measures() const
{
    Vector m = Vector::Zero(vertices_.rows());
    const double share = 1.0 / static_cast<double>(dim() + 1);
    for (Eigen::Index c = 0; c < cells_.rows(); ++c) {
        for (Eigen::Index k = 0; k < cells_.cols(); ++k) {
            m[cells_(c, k)] += share * cell_measures_[c];
        }
    }
    return m;
}

Vector Mesh::boundary_vertex_measures(bool d0_only) const
{
    Vector m = Vector::Zero(vertices_.rows());
    const double share = 1.0 / static_cast<double>(dim());
    for (Eigen::Index f = 0; f < boundary_facets_.rows(); ++f) {
        if (d0_only && boundary_tags_[static_cast<std::size_t>(f)] != BoundaryTag::D0) {
            continue;
        }
        const double a = facet_measure(f);
        for (Eigen::Index k = 0; k < boundary_facets_.cols(); ++k) {
            m[boundary_facets_(f, k)] += share * a;
        }
    }
    return m;
}

BackgroundGeometry BackgroundGeometry::constant(const Mesh& mesh, double interior, double boundary)
{
    BackgroundGeometry bg;
    bg.n = mesh.dim();
    const Eigen::Index nv = mesh.num_vertices();
    bg.interior_curvature = ScalarField::constant(Support::All, nv, interior);
    bg.boundary_curvature = ScalarField::constant(Support::Boundary, nv, 0.0);
    const auto& mask = mesh.boundary_vertex_mask();
    for (Eigen::Index i = 0; i < nv; ++i) {
        if (mask[static_cast<std::size_t>(i)]) {
            bg.boundary_curvature[i] = boundary;
        }
    }
    if (bg.n == 2) {
        bg.euler_characteristic = static_cast<int>(mesh.num_vertices() - mesh.num_edges() + mesh.num_cells());
    }
    return bg;
}

void BackgroundGeometry::validate(const Mesh& mesh) const
{
    if (n != mesh.dim()) {
        throw PreconditionError("background dimension " + std::to_string(n)
                                + " does not match mesh dimension " + std::to_string(mesh.dim()));
    }
    if (interior_curvature.size() != mesh.num_vertices()
        || boundary_curvature.size() != mesh.num_vertices()) {
        throw PreconditionError("background fields must have one value per vertex");
    }
    if (!interior_curvature.all_finite() || !boundary_curvature.all_finite()) {
        throw PreconditionError("background fields must be finite");
    }
}

double BackgroundGeometry::sup_norm() const
{
    double s = 0.0;
    if (interior_curvature.size() > 0) {
        s = std::max(s, interior_curvature.values.cwiseAbs().maxCoeff());
    }
    if (boundary_curvature.size() > 0) {
        s = std::max(s, boundary_curvature.values.cwiseAbs().maxCoeff());
    }
    return s;
}

} // namespace confcurv
