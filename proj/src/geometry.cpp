#include "confcurv/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace confcurv {

int euler_characteristic(const Mesh& mesh)
{
    if (mesh.dim() != 2) {
        throw DimensionError("Euler characteristic is only defined here for triangle meshes");
    }
    return static_cast<int>(mesh.num_vertices() - mesh.num_edges() + mesh.num_cells());
}

double corner_angle(const Mesh& mesh, Eigen::Index c, int k)
{
    const auto& cells = mesh.cells();
    const int i = cells(c, k);
    const int j = cells(c, (k + 1) % 3);
    const int l = cells(c, (k + 2) % 3);
    const auto& len = mesh.edge_lengths();
    const double a = len[mesh.edge_index(i, j)];
    const double b = len[mesh.edge_index(i, l)];
    const double opp = len[mesh.edge_index(j, l)];
    if (!(a + b > opp && a + opp > b && b + opp > a)) {
        throw DegenerateCellError("cell " + std::to_string(c) + " violates the triangle inequality",
                                  static_cast<int>(c));
    }
    const double q = std::clamp((a * a + b * b - opp * opp) / (2.0 * a * b), -1.0, 1.0);
    return std::acos(q);
}

AngleDefects angle_defect_curvatures(const Mesh& mesh)
{
    if (mesh.dim() != 2) {
        throw DimensionError("angle defects need a triangle mesh");
    }
    const Eigen::Index nv = mesh.num_vertices();
    Vector sums = Vector::Zero(nv);
    for (Eigen::Index c = 0; c < mesh.num_cells(); ++c) {
        for (int k = 0; k < 3; ++k) {
            sums[mesh.cells()(c, k)] += corner_angle(mesh, c, k);
        }
    }
    AngleDefects out{ScalarField::constant(Support::Interior, nv, 0.0),
                     ScalarField::constant(Support::Boundary, nv, 0.0)};
    const auto& mask = mesh.boundary_vertex_mask();
    for (Eigen::Index i = 0; i < nv; ++i) {
        if (mask[static_cast<std::size_t>(i)]) {
            out.boundary[i] = std::numbers::pi - sums[i];
        } else {
            out.interior[i] = 2.0 * std::numbers::pi - sums[i];
        }
    }
    return out;
}

double gauss_bonnet_residual(const Mesh& mesh)
{
    const AngleDefects d = angle_defect_curvatures(mesh);
    return d.interior.values.sum() + d.boundary.values.sum()
           - 2.0 * std::numbers::pi * euler_characteristic(mesh);
}

Mesh conformal_rescale_lengths(const Mesh& mesh, const ScalarField& u)
{
    if (mesh.dim() != 2) {
        throw DimensionError("conformal edge rescaling is implemented for triangle meshes");
    }
    if (u.size() != mesh.num_vertices()) {
        throw PreconditionError("conformal factor needs one value per vertex");
    }
    Vector lengths = mesh.edge_lengths();
    for (Eigen::Index e = 0; e < mesh.num_edges(); ++e) {
        lengths[e] *= std::exp(0.5 * (u[mesh.edges()(e, 0)] + u[mesh.edges()(e, 1)]));
    }
    return mesh.with_edge_lengths(std::move(lengths));
}

BackgroundGeometry BackgroundGeometry::from_angle_defects(const Mesh& mesh)
{
    const AngleDefects d = angle_defect_curvatures(mesh);
    const Vector area = mesh.vertex_measures();
    const Vector length = mesh.boundary_vertex_measures(false);
    BackgroundGeometry bg;
    bg.n = 2;
    bg.interior_curvature = ScalarField::constant(Support::Interior, mesh.num_vertices(), 0.0);
    bg.boundary_curvature = ScalarField::constant(Support::Boundary, mesh.num_vertices(), 0.0);
    const auto& mask = mesh.boundary_vertex_mask();
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
        if (mask[static_cast<std::size_t>(i)]) {
            bg.boundary_curvature[i] = d.boundary[i] / length[i];
        } else {
            bg.interior_curvature[i] = d.interior[i] / area[i];
        }
    }
    bg.euler_characteristic = confcurv::euler_characteristic(mesh);
    return bg;
}

} // namespace confcurv
