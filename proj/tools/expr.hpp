#pragma once

#include "confcurv/types.hpp"

#include <memory>
#include <string>
#include <vector>

namespace confcurv::cli {

/// Evaluation point. r and theta are polar coordinates of (x, y) about the
/// mesh centroid.
struct Point {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double r = 0.0;
    double theta = 0.0;
};

/// Non-finite or undefined value (log of a non-positive number, division by
/// zero, sqrt of a negative number).
class EvalError : public Error {
public:
    using Error::Error;
};

/// Arithmetic expression over x, y, z, r, theta and the constant pi.
///
/// Grammar, loosest first: + -, then * /, then unary -, then ^ (right
/// associative, binds tighter than unary minus so -2^2 = -4). Functions:
/// sin cos exp log abs sqrt (one argument), min max (two).
class Expr {
public:
    enum class Kind { Number, Variable, Negate, Binary, Call };

    static Expr parse(const std::string& src);

    double eval(const Point& p) const;

    /// Fully parenthesized form; parse(print()) gives the same tree.
    std::string print() const;

    bool operator==(const Expr& other) const;

    Kind kind() const { return kind_; }

private:
    friend class Parser;
    Kind kind_ = Kind::Number;
    double number_ = 0.0;
    /// variable name, function name, or operator symbol
    std::string name_;
    std::vector<Expr> args_;
};

} // namespace confcurv::cli
