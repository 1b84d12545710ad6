#pragma once

#include "confcurv/mesh.hpp"

#include <iosfwd>
#include <string>

namespace confcurv::io {

/// Reads an ASCII OFF file. Faces with 3 indices are triangles, faces with 4
/// indices are read as tetrahedra. If every z coordinate is zero the mesh is
/// treated as planar and only x, y are kept.
Mesh load_mesh(const std::string& path);
Mesh read_off(std::istream& in);

void save_mesh(const Mesh& mesh, const std::string& path);
void write_off(const Mesh& mesh, std::ostream& out);

/// Sidecar tag file: one "<facet_index> <D0|DM>" per line, '#' starts a
/// comment. Facets not listed stay D0.
Mesh load_tags(const Mesh& mesh, const std::string& path);
void save_tags(const Mesh& mesh, const std::string& path);

/// CSV with header "vertex_index,value". Only the support vertices are
/// written.
void save_field(const Mesh& mesh, const ScalarField& f, const std::string& path);
ScalarField load_field(const Mesh& mesh, Support support, const std::string& path);

/// MatrixMarket coordinate real general format.
void save_matrix_market(const SparseMatrix& a, const std::string& path);

/// Support mask: interior, boundary, or all vertices.
std::vector<bool> support_mask(const Mesh& mesh, Support s);

} // namespace confcurv::io
