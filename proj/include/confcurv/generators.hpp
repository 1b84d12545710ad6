#pragma once

#include "confcurv/mesh.hpp"

#include <string>

namespace confcurv::gen {

/// Unit disk: concentric rings, ring k has 6k vertices (`rings` rings).
Mesh disk(int rings);

/// Flat annulus r_inner <= |x| <= 1 with `around` vertices per circle and
/// geometrically spaced radii.
Mesh annulus(int around, double r_inner = 0.5);

/// [0,w] x [0,h] grid with nx by ny squares, each split along one diagonal.
Mesh rectangle(int nx, int ny, double w = 1.0, double h = 1.0);

/// Flat cylinder of circumference 2*pi and height `height`. Vertices sit on
/// the unit-radius cylinder in R^3; edge lengths are those of the unrolled
/// strip, so the metric is exactly flat with geodesic boundary circles.
Mesh cylinder(int around, double height);

/// Cylinder whose bottom circle (z=0) is tagged D0 and top circle DM.
Mesh half_cylinder(int around, double height);

/// Unit sphere with three disjoint caps removed (chi = -1). `level` is the
/// icosahedron subdivision depth.
Mesh sphere_minus_caps(int level, double cap_radius = 0.5);

/// Upper unit hemisphere with ring structure as in `disk`.
Mesh hemisphere(int rings);

/// Unit cube [0,1]^3, n^3 subcubes split into six tetrahedra each.
Mesh cube(int n);

/// Unit ball obtained by radially pushing a [-1,1]^3 grid onto the sphere.
Mesh ball(int n);

/// Generator by name: disk, annulus, rectangle, square, cylinder,
/// half_cylinder, pants, hemisphere, cube, ball.
Mesh by_name(const std::string& name, int resolution);

} // namespace confcurv::gen
