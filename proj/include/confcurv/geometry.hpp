#pragma once

#include "confcurv/mesh.hpp"

namespace confcurv {

/// V - E + F of a triangle mesh. Throws DimensionError for tetrahedra.
int euler_characteristic(const Mesh& mesh);

/// Integrated curvatures from angle sums computed by the law of cosines.
/// Interior vertices get 2*pi minus their angle sum (support Interior);
/// boundary vertices get pi minus their angle sum (support Boundary).
struct AngleDefects {
    ScalarField interior;
    ScalarField boundary;
};
AngleDefects angle_defect_curvatures(const Mesh& mesh);

/// Sum of all angle defects minus 2*pi*chi. Zero up to rounding on any
/// valid triangle mesh.
double gauss_bonnet_residual(const Mesh& mesh);

/// Edge lengths l_ij * exp((u_i + u_j) / 2). Throws DegenerateCellError
/// naming the first cell that becomes invalid.
Mesh conformal_rescale_lengths(const Mesh& mesh, const ScalarField& u);

/// Interior angle at local corner k of triangle c.
double corner_angle(const Mesh& mesh, Eigen::Index c, int k);

} // namespace confcurv
