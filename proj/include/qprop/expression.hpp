#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>

namespace qprop::expr {

// Scalar expressions of the time variable `t`, used for the Hamiltonian
// coefficients c(t), e(t) and the general-Lagrangian inputs. Trees are
// immutable after construction and safe to share between threads.

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Func { Sin, Cos, Exp, Sqrt, Log };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Constant, Time, Parameter, Negate, Binary, Call };

    Kind kind = Kind::Constant;
    double value = 0.0;            // Constant
    std::string name;              // Parameter
    BinaryOp op = BinaryOp::Add;   // Binary
    Func func = Func::Sin;         // Call
    NodePtr a, b;                  // Binary: both; Negate/Call: a only
};

using Bindings = std::map<std::string, double>;

class Expr {
public:
    Expr() = default;
    explicit Expr(NodePtr root) : root_(std::move(root)) {}

    bool valid() const { return root_ != nullptr; }
    const Node& root() const;

private:
    NodePtr root_;
};

// Node builders.
Expr constant(double value);
Expr time_variable();
Expr parameter(std::string name);
Expr negate(const Expr& a);
Expr binary(BinaryOp op, const Expr& a, const Expr& b);
Expr call(Func f, const Expr& a);

// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' factor)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')'
// `t` is the time variable, `pi` a built-in constant; recognized functions are
// sin, cos, exp, sqrt, log. `^` is right-associative and binds tightest.
// Throws ParseError (with byte offset) on malformed input.
Expr parse_expression(std::string_view src);

// Exact symbolic derivative with respect to t; parameters are constants.
// Total on the grammar; no simplification is performed on the result.
Expr differentiate(const Expr& ast);

// Throws UnboundParameterError or DomainError (sqrt/log of a negative
// argument, division by zero, non-finite result).
double eval_expression(const Expr& ast, double t, const Bindings& bindings = {});

// Replaces every parameter node by its bound constant, so later evaluations
// touch no lookup tables. Throws UnboundParameterError.
Expr substitute(const Expr& ast, const Bindings& bindings);

// Coefficient reduction of the general quadratic Lagrangian
// L = m x'^2/2 + a1 x x' + a2 x^2/2 + a3 x' + a4 x:
// returns c = d(a1)/dt - a2 and e = d(a3)/dt - a4.
std::pair<Expr, Expr> reduce_lagrangian(const Expr& a1, const Expr& a2, const Expr& a3,
                                        const Expr& a4);

} // namespace qprop::expr
