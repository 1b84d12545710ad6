#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <stdexcept>
#include <string>

namespace confcurv {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using IndexMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file or expression.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset = 0)
        : Error(what), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// A simplex with non-positive measure, or edge lengths violating simplex inequalities.
class DegenerateCellError : public Error {
public:
    DegenerateCellError(const std::string& what, int cell) : Error(what), cell_(cell) {}
    int cell() const { return cell_; }

private:
    int cell_;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

enum class BoundaryTag { D0, DM };

/// Which vertices carry meaningful values in a ScalarField.
enum class Support { All, Interior, Boundary };

/// Nodal field. Values are stored for every vertex of the mesh; entries outside
/// the support are kept at zero.
struct ScalarField {
    Support support = Support::All;
    Vector values;

    ScalarField() = default;
    ScalarField(Support s, Vector v) : support(s), values(std::move(v)) {}

    static ScalarField constant(Support s, Eigen::Index size, double c)
    {
        return ScalarField(s, Vector::Constant(size, c));
    }

    Eigen::Index size() const { return values.size(); }
    double operator[](Eigen::Index i) const { return values[i]; }
    double& operator[](Eigen::Index i) { return values[i]; }
    bool all_finite() const { return values.allFinite(); }
};

} // namespace confcurv
