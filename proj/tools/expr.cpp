#include "expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace confcurv::cli {

namespace {

const std::vector<std::string> kVariables = {"x", "y", "z", "r", "theta", "pi"};
const std::vector<std::string> kUnary = {"sin", "cos", "exp", "log", "abs", "sqrt"};
const std::vector<std::string> kBinary = {"min", "max"};

bool contains(const std::vector<std::string>& v, const std::string& s)
{
    return std::find(v.begin(), v.end(), s) != v.end();
}

} // namespace

class Parser {
public:
    explicit Parser(const std::string& src) : s_(src) {}

    Expr parse()
    {
        Expr e = expression();
        skip();
        if (pos_ != s_.size()) {
            fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        std::ostringstream msg;
        msg << "syntax error at offset " << pos_ << ": " << what;
        throw ParseError(msg.str(), pos_);
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static Expr binary(const std::string& op, Expr a, Expr b)
    {
        Expr e;
        e.kind_ = Expr::Kind::Binary;
        e.name_ = op;
        e.args_ = {std::move(a), std::move(b)};
        return e;
    }

    Expr expression()
    {
        Expr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = binary("+", std::move(lhs), term());
            } else if (accept('-')) {
                lhs = binary("-", std::move(lhs), term());
            } else {
                return lhs;
            }
        }
    }

    Expr term()
    {
        Expr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = binary("*", std::move(lhs), unary());
            } else if (accept('/')) {
                lhs = binary("/", std::move(lhs), unary());
            } else {
                return lhs;
            }
        }
    }

    Expr unary()
    {
        if (accept('-')) {
            Expr e;
            e.kind_ = Expr::Kind::Negate;
            e.args_ = {unary()};
            return e;
        }
        if (accept('+')) {
            return unary();
        }
        return power();
    }

    Expr power()
    {
        Expr base = primary();
        if (accept('^')) {
            return binary("^", std::move(base), unary());
        }
        return base;
    }

    Expr primary()
    {
        skip();
        if (pos_ >= s_.size()) {
            fail("expected an expression");
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            return identifier();
        }
        if (accept('(')) {
            Expr e = expression();
            if (!accept(')')) {
                fail("expected ')'");
            }
            return e;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Expr number()
    {
        std::size_t end = pos_;
        while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.')) {
            ++end;
        }
        if (end < s_.size() && (s_[end] == 'e' || s_[end] == 'E')) {
            std::size_t k = end + 1;
            if (k < s_.size() && (s_[k] == '+' || s_[k] == '-')) {
                ++k;
            }
            if (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) {
                end = k;
                while (end < s_.size() && std::isdigit(static_cast<unsigned char>(s_[end]))) {
                    ++end;
                }
            }
        }
        Expr e;
        e.kind_ = Expr::Kind::Number;
        const auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + end, e.number_);
        if (ec != std::errc() || ptr != s_.data() + end) {
            fail("malformed number");
        }
        pos_ = end;
        return e;
    }

    Expr identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
            ++pos_;
        }
        const std::string id = s_.substr(start, pos_ - start);
        const bool unary_fn = contains(kUnary, id);
        const bool binary_fn = contains(kBinary, id);
        if (unary_fn || binary_fn) {
            if (!accept('(')) {
                fail("expected '(' after " + id);
            }
            Expr e;
            e.kind_ = Expr::Kind::Call;
            e.name_ = id;
            e.args_.push_back(expression());
            if (binary_fn) {
                if (!accept(',')) {
                    fail(id + " takes two arguments");
                }
                e.args_.push_back(expression());
            }
            if (!accept(')')) {
                fail("expected ')'");
            }
            return e;
        }
        if (!contains(kVariables, id)) {
            pos_ = start;
            fail("unknown identifier '" + id + "'");
        }
        Expr e;
        e.kind_ = Expr::Kind::Variable;
        e.name_ = id;
        return e;
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

Expr Expr::parse(const std::string& src) { return Parser(src).parse(); }

double Expr::eval(const Point& p) const
{
    switch (kind_) {
    case Kind::Number:
        return number_;
    case Kind::Variable:
        if (name_ == "x") {
            return p.x;
        }
        if (name_ == "y") {
            return p.y;
        }
        if (name_ == "z") {
            return p.z;
        }
        if (name_ == "r") {
            return p.r;
        }
        if (name_ == "theta") {
            return p.theta;
        }
        return std::numbers::pi;
    case Kind::Negate:
        return -args_[0].eval(p);
    case Kind::Binary: {
        const double a = args_[0].eval(p);
        const double b = args_[1].eval(p);
        double v = 0.0;
        switch (name_[0]) {
        case '+':
            v = a + b;
            break;
        case '-':
            v = a - b;
            break;
        case '*':
            v = a * b;
            break;
        case '/':
            if (b == 0.0) {
                throw EvalError("division by zero");
            }
            v = a / b;
            break;
        default:
            v = std::pow(a, b);
            break;
        }
        if (!std::isfinite(v)) {
            throw EvalError("non-finite result of '" + name_ + "'");
        }
        return v;
    }
    case Kind::Call: {
        const double a = args_[0].eval(p);
        if (name_ == "min") {
            return std::min(a, args_[1].eval(p));
        }
        if (name_ == "max") {
            return std::max(a, args_[1].eval(p));
        }
        if (name_ == "log" && a <= 0.0) {
            throw EvalError("log of a non-positive value");
        }
        if (name_ == "sqrt" && a < 0.0) {
            throw EvalError("sqrt of a negative value");
        }
        double v = 0.0;
        if (name_ == "sin") {
            v = std::sin(a);
        } else if (name_ == "cos") {
            v = std::cos(a);
        } else if (name_ == "exp") {
            v = std::exp(a);
        } else if (name_ == "log") {
            v = std::log(a);
        } else if (name_ == "abs") {
            v = std::abs(a);
        } else {
            v = std::sqrt(a);
        }
        if (!std::isfinite(v)) {
            throw EvalError("non-finite result of " + name_);
        }
        return v;
    }
    }
    return 0.0;
}

std::string Expr::print() const
{
    switch (kind_) {
    case Kind::Number: {
        char buf[64];
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), number_);
        return std::string(buf, ptr);
    }
    case Kind::Variable:
        return name_;
    case Kind::Negate:
        return "(-" + args_[0].print() + ")";
    case Kind::Binary:
        return "(" + args_[0].print() + " " + name_ + " " + args_[1].print() + ")";
    case Kind::Call:
        return name_ + "(" + args_[0].print() + (args_.size() > 1 ? ", " + args_[1].print() : "") + ")";
    }
    return "";
}

bool Expr::operator==(const Expr& other) const
{
    return kind_ == other.kind_ && name_ == other.name_ && args_ == other.args_
           && (kind_ != Kind::Number || number_ == other.number_);
}

} // namespace confcurv::cli
