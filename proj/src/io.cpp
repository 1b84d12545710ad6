#include "confcurv/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace confcurv::io {

namespace {

// Next non-empty, non-comment line split into tokens.
bool next_tokens(std::istream& in, std::vector<std::string>& tokens)
{
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        std::istringstream ss(line);
        tokens.clear();
        std::string t;
        while (ss >> t) {
            tokens.push_back(t);
        }
        if (!tokens.empty()) {
            return true;
        }
    }
    return false;
}

double to_double(const std::string& s)
{
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + s + "'");
    }
    if (used != s.size()) {
        throw ParseError("expected a number, got '" + s + "'");
    }
    return v;
}

long to_int(const std::string& s)
{
    std::size_t used = 0;
    long v = 0;
    try {
        v = std::stol(s, &used);
    } catch (const std::exception&) {
        throw ParseError("expected an integer, got '" + s + "'");
    }
    if (used != s.size()) {
        throw ParseError("expected an integer, got '" + s + "'");
    }
    return v;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    return in;
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    out << std::setprecision(17);
    return out;
}

} // namespace

Mesh read_off(std::istream& in)
{
    std::vector<std::string> tok;
    if (!next_tokens(in, tok) || tok[0].rfind("OFF", 0) != 0) {
        throw ParseError("missing OFF header");
    }
    std::vector<std::string> counts(tok.begin() + 1, tok.end());
    if (counts.empty()) {
        if (!next_tokens(in, tok)) {
            throw ParseError("missing OFF counts line");
        }
        counts = tok;
    }
    if (counts.size() < 2) {
        throw ParseError("malformed OFF counts line");
    }
    const long nv = to_int(counts[0]);
    const long nf = to_int(counts[1]);
    if (nv <= 0 || nf <= 0) {
        throw ParseError("OFF file must contain vertices and faces");
    }
    Matrix v(nv, 3);
    for (long i = 0; i < nv; ++i) {
        if (!next_tokens(in, tok) || tok.size() < 3) {
            throw ParseError("vertex " + std::to_string(i) + " is malformed");
        }
        for (int d = 0; d < 3; ++d) {
            v(i, d) = to_double(tok[static_cast<std::size_t>(d)]);
        }
    }
    IndexMatrix cells;
    for (long f = 0; f < nf; ++f) {
        if (!next_tokens(in, tok)) {
            throw ParseError("face " + std::to_string(f) + " is missing");
        }
        const long k = to_int(tok[0]);
        if (k != 3 && k != 4) {
            throw ParseError("face " + std::to_string(f) + " must have 3 or 4 indices");
        }
        if (static_cast<long>(tok.size()) < k + 1) {
            throw ParseError("face " + std::to_string(f) + " is truncated");
        }
        if (f == 0) {
            cells.resize(nf, k);
        } else if (cells.cols() != k) {
            throw ParseError("mixed triangle and tetrahedron faces");
        }
        for (long j = 0; j < k; ++j) {
            const long idx = to_int(tok[static_cast<std::size_t>(j + 1)]);
            if (idx < 0 || idx >= nv) {
                throw ParseError("face " + std::to_string(f) + " index " + std::to_string(idx)
                                 + " out of range");
            }
            cells(f, j) = static_cast<int>(idx);
        }
    }
    if (cells.cols() == 3 && v.col(2).isZero(0.0)) {
        Matrix planar = v.leftCols(2);
        return Mesh(std::move(planar), std::move(cells));
    }
    return Mesh(std::move(v), std::move(cells));
}

Mesh load_mesh(const std::string& path)
{
    auto in = open_in(path);
    return read_off(in);
}

void write_off(const Mesh& mesh, std::ostream& out)
{
    out << std::setprecision(17);
    out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_cells() << " 0\n";
    for (Eigen::Index i = 0; i < mesh.num_vertices(); ++i) {
        for (int d = 0; d < 3; ++d) {
            out << (d < mesh.vertices().cols() ? mesh.vertices()(i, d) : 0.0) << (d < 2 ? ' ' : '\n');
        }
    }
    for (Eigen::Index c = 0; c < mesh.num_cells(); ++c) {
        out << mesh.cells().cols();
        for (Eigen::Index k = 0; k < mesh.cells().cols(); ++k) {
            out << ' ' << mesh.cells()(c, k);
        }
        out << '\n';
    }
}

void save_mesh(const Mesh& mesh, const std::string& path)
{
    auto out = open_out(path);
    write_off(mesh, out);
}

Mesh load_tags(const Mesh& mesh, const std::string& path)
{
    auto in = open_in(path);
    std::vector<BoundaryTag> tags(static_cast<std::size_t>(mesh.num_boundary_facets()), BoundaryTag::D0);
    std::vector<std::string> tok;
    while (next_tokens(in, tok)) {
        if (tok.size() != 2) {
            throw ParseError("tag lines need '<facet_index> <D0|DM>'");
        }
        const long f = to_int(tok[0]);
        if (f < 0 || f >= mesh.num_boundary_facets()) {
            throw ParseError("boundary facet " + tok[0] + " out of range");
        }
        if (tok[1] == "D0") {
            tags[static_cast<std::size_t>(f)] = BoundaryTag::D0;
        } else if (tok[1] == "DM") {
            tags[static_cast<std::size_t>(f)] = BoundaryTag::DM;
        } else {
            throw ParseError("unknown tag '" + tok[1] + "'");
        }
    }
    return mesh.with_boundary_tags(std::move(tags));
}

void save_tags(const Mesh& mesh, const std::string& path)
{
    auto out = open_out(path);
    out << "# facet_index tag\n";
    for (std::size_t f = 0; f < mesh.boundary_tags().size(); ++f) {
        out << f << ' ' << (mesh.boundary_tags()[f] == BoundaryTag::D0 ? "D0" : "DM") << '\n';
    }
}

std::vector<bool> support_mask(const Mesh& mesh, Support s)
{
    const auto& b = mesh.boundary_vertex_mask();
    std::vector<bool> mask(b.size(), true);
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (s == Support::Interior) {
            mask[i] = !b[i];
        } else if (s == Support::Boundary) {
            mask[i] = b[i];
        }
    }
    return mask;
}

void save_field(const Mesh& mesh, const ScalarField& f, const std::string& path)
{
    auto out = open_out(path);
    const auto mask = support_mask(mesh, f.support);
    out << "vertex_index,value\n";
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        if (mask[static_cast<std::size_t>(i)]) {
            out << i << ',' << f[i] << '\n';
        }
    }
}

ScalarField load_field(const Mesh& mesh, Support support, const std::string& path)
{
    auto in = open_in(path);
    ScalarField f = ScalarField::constant(support, mesh.num_vertices(), 0.0);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        if (header) {
            header = false;
            if (line.rfind("vertex_index", 0) == 0) {
                continue;
            }
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError("CSV line without comma: '" + line + "'");
        }
        const long i = to_int(line.substr(0, comma));
        if (i < 0 || i >= mesh.num_vertices()) {
            throw ParseError("vertex index " + std::to_string(i) + " out of range");
        }
        f[i] = to_double(line.substr(comma + 1));
    }
    return f;
}

void save_matrix_market(const SparseMatrix& a, const std::string& path)
{
    auto out = open_out(path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
    for (int k = 0; k < a.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
            out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
        }
    }
}

} // namespace confcurv::io
