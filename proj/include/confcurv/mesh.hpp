#pragma once

#include "confcurv/types.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <vector>

namespace confcurv {

/// Simplicial complex (triangles for n=2, tetrahedra for n=3) carrying an
/// intrinsic discrete metric on its edges.
///
/// The metric is the vector of edge lengths. It defaults to the Euclidean
/// lengths of the vertex embedding but can be replaced, in which case the
/// vertex positions only serve as coordinates for evaluating target
/// expressions. All geometric quantities (cell measures, angles, stiffness)
/// are computed from edge lengths alone.
///
/// Boundary facets are the (n-1)-faces incident to exactly one cell. They are
/// stored with sorted vertex indices, in lexicographic order; that order is
/// the facet numbering used by tag files. Each boundary facet carries a tag,
/// D0 (part of the manifold boundary) or DM (an artificial cut), defaulting
/// to D0.
///
/// Meshes are immutable; the `with_*` members return modified copies.
class Mesh {
public:
    Mesh() = default;

    /// Builds the complex and validates it against the embedded lengths.
    /// Throws DegenerateCellError for zero-measure simplices.
    Mesh(Matrix vertices, IndexMatrix cells);

    /// Simplex dimension: 2 for triangle meshes, 3 for tetrahedral meshes.
    int dim() const { return static_cast<int>(cells_.cols()) - 1; }

    Eigen::Index num_vertices() const { return vertices_.rows(); }
    Eigen::Index num_cells() const { return cells_.rows(); }
    Eigen::Index num_edges() const { return edges_.rows(); }
    Eigen::Index num_boundary_facets() const { return boundary_facets_.rows(); }

    const Matrix& vertices() const { return vertices_; }
    const IndexMatrix& cells() const { return cells_; }
    /// Edges as sorted vertex pairs, lexicographically ordered.
    const IndexMatrix& edges() const { return edges_; }
    /// For every cell, the index of each local edge (pairs (i,j), i<j, in
    /// lexicographic order of local vertex indices).
    const IndexMatrix& cell_edges() const { return cell_edges_; }
    const Vector& edge_lengths() const { return edge_lengths_; }
    const IndexMatrix& boundary_facets() const { return boundary_facets_; }
    const std::vector<BoundaryTag>& boundary_tags() const { return boundary_tags_; }

    /// Index of the edge joining a and b, or -1.
    int edge_index(int a, int b) const;

    /// Copy with a replaced discrete metric. Throws DegenerateCellError naming
    /// the first cell whose lengths violate the simplex inequalities.
    Mesh with_edge_lengths(Vector lengths) const;

    /// Copy with replaced boundary tags (one per boundary facet).
    Mesh with_boundary_tags(std::vector<BoundaryTag> tags) const;

    bool has_partition() const;

    /// Vertex lies on some boundary facet.
    const std::vector<bool>& boundary_vertex_mask() const { return boundary_mask_; }
    /// Vertex lies on some D0 boundary facet.
    std::vector<bool> d0_vertex_mask() const;
    std::vector<int> boundary_vertices() const;
    std::vector<int> interior_vertices() const;

    /// Measure (area/volume) of a cell, from edge lengths.
    double cell_measure(Eigen::Index c) const { return cell_measures_[c]; }
    const Vector& cell_measures() const { return cell_measures_; }
    /// Measure (length/area) of a boundary facet, from edge lengths.
    double facet_measure(Eigen::Index f) const;

    /// Lumped vertex measure: each cell gives measure/(n+1) to its vertices.
    Vector vertex_measures() const;
    /// Lumped boundary measure: each facet gives measure/n to its vertices.
    /// With d0_only, DM facets are skipped.
    Vector boundary_vertex_measures(bool d0_only = true) const;

    double max_edge_length() const { return edge_lengths_.maxCoeff(); }
    double total_measure() const { return cell_measures_.sum(); }

    /// Centroid of the vertex positions.
    Eigen::RowVectorXd centroid() const { return vertices_.colwise().mean(); }

private:
    void build_topology();
    void compute_measures();

    Matrix vertices_;
    IndexMatrix cells_;
    IndexMatrix edges_;
    IndexMatrix cell_edges_;
    Vector edge_lengths_;
    Vector cell_measures_;
    IndexMatrix boundary_facets_;
    std::vector<BoundaryTag> boundary_tags_;
    std::vector<bool> boundary_mask_;
};

/// Intrinsic geometry of one simplex computed from its edge lengths.
///
/// Vertex 0 is put at the origin; the Gram matrix of the edge vectors
/// e_i = p_i - p_0 is G_ij = (l_0i^2 + l_0j^2 - l_ij^2) / 2. Barycentric
/// gradients then satisfy grad(l_i) . grad(l_j) = (G^-1)_ij for i,j >= 1.
template <int D>
struct SimplexMetric {
    using Gram = Eigen::Matrix<double, D, D>;
    using Local = Eigen::Matrix<double, D + 1, D + 1>;

    Gram gram;
    double measure = 0.0;
    bool valid = false;

    /// `lengths` are the edge lengths in local lexicographic pair order.
    explicit SimplexMetric(const Eigen::Matrix<double, D*(D + 1) / 2, 1>& lengths);

    /// Element stiffness: measure * grad(l_i) . grad(l_j).
    Local stiffness() const;
};

/// Local pair list (i,j), i<j, in lexicographic order.
template <int D>
constexpr std::array<std::array<int, 2>, D*(D + 1) / 2> local_edges()
{
    std::array<std::array<int, 2>, D*(D + 1) / 2> out{};
    int k = 0;
    for (int i = 0; i <= D; ++i) {
        for (int j = i + 1; j <= D; ++j) {
            out[k++] = {i, j};
        }
    }
    return out;
}

/// Intrinsic background data: curvature densities and topology.
///
/// For n=2 the interior field is the Gaussian curvature K_g and the boundary
/// field the geodesic curvature kappa_g; for n>=3 they are the scalar
/// curvature R_g and mean curvature H_g. Both are pointwise densities.
struct BackgroundGeometry {
    int n = 2;
    ScalarField interior_curvature;
    ScalarField boundary_curvature;
    std::optional<int> euler_characteristic;

    /// Densities from discrete angle defects (n=2): integrated defect divided
    /// by lumped vertex area (interior) or lumped boundary length.
    static BackgroundGeometry from_angle_defects(const Mesh& mesh);

    /// Constant densities; the interior value is stored on every vertex, the
    /// boundary value on boundary vertices.
    static BackgroundGeometry constant(const Mesh& mesh, double interior, double boundary);

    /// Throws PreconditionError when dimensions or field sizes disagree with
    /// the mesh.
    void validate(const Mesh& mesh) const;

    /// max(|interior|, |boundary|).
    double sup_norm() const;
};

} // namespace confcurv
