#include "qprop/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "qprop/errors.hpp"

namespace qprop::expr {

namespace {

Expr wrap(NodePtr n) { return Expr(std::move(n)); }

NodePtr node_constant(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Constant;
    n->value = v;
    return n;
}

NodePtr node_time() {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Time;
    return n;
}

NodePtr node_parameter(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Parameter;
    n->name = std::move(name);
    return n;
}

NodePtr node_negate(NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Negate;
    n->a = std::move(a);
    return n;
}

NodePtr node_binary(BinaryOp op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Binary;
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr node_call(Func f, NodePtr a) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Call;
    n->func = f;
    n->a = std::move(a);
    return n;
}

// ---------------------------------------------------------------------------
// Lexer

struct Token {
    enum class Kind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

    Kind kind = Kind::End;
    std::size_t offset = 0;
    double number = 0.0;
    std::string text;
};

const char* token_name(Token::Kind k) {
    switch (k) {
        case Token::Kind::Number: return "number";
        case Token::Kind::Ident: return "identifier";
        case Token::Kind::Plus: return "'+'";
        case Token::Kind::Minus: return "'-'";
        case Token::Kind::Star: return "'*'";
        case Token::Kind::Slash: return "'/'";
        case Token::Kind::Caret: return "'^'";
        case Token::Kind::LParen: return "'('";
        case Token::Kind::RParen: return "')'";
        case Token::Kind::End: return "end of input";
    }
    return "?";
}

std::string token_display(const Token& tok) {
    if (tok.kind == Token::Kind::End) return "end of input";
    if (tok.kind == Token::Kind::Number || tok.kind == Token::Kind::Ident)
        return "'" + tok.text + "'";
    return token_name(tok.kind);
}

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    const std::size_t n = src.size();
    while (i < n) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token tok;
        tok.offset = i;
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < n && src[j] == '.') {
                ++j;
                while (j < n && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (j < n && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < n && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < n && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    ++k;
                    while (k < n && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
                    j = k;
                }
            }
            tok.kind = Token::Kind::Number;
            tok.text.assign(src.substr(i, j - i));
            auto res = std::from_chars(src.data() + i, src.data() + j, tok.number);
            if (res.ec != std::errc()) throw ParseError(i, "number", "'" + tok.text + "'");
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < n && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            tok.kind = Token::Kind::Ident;
            tok.text.assign(src.substr(i, j - i));
            i = j;
        } else {
            switch (c) {
                case '+': tok.kind = Token::Kind::Plus; break;
                case '-': tok.kind = Token::Kind::Minus; break;
                case '*': tok.kind = Token::Kind::Star; break;
                case '/': tok.kind = Token::Kind::Slash; break;
                case '^': tok.kind = Token::Kind::Caret; break;
                case '(': tok.kind = Token::Kind::LParen; break;
                case ')': tok.kind = Token::Kind::RParen; break;
                default:
                    throw ParseError(i, "expression", std::string("'") + c + "'");
            }
            ++i;
        }
        out.push_back(std::move(tok));
    }
    Token end;
    end.kind = Token::Kind::End;
    end.offset = n;
    out.push_back(end);
    return out;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    NodePtr run() {
        NodePtr e = parse_expr();
        if (cur().kind != Token::Kind::End)
            throw ParseError(cur().offset, "end of input", token_display(cur()));
        return e;
    }

private:
    const Token& cur() const { return tokens_[pos_]; }
    void advance() { ++pos_; }

    void expect(Token::Kind kind) {
        if (cur().kind != kind)
            throw ParseError(cur().offset, token_name(kind), token_display(cur()));
        advance();
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        while (cur().kind == Token::Kind::Plus || cur().kind == Token::Kind::Minus) {
            const BinaryOp op =
                cur().kind == Token::Kind::Plus ? BinaryOp::Add : BinaryOp::Sub;
            advance();
            lhs = node_binary(op, std::move(lhs), parse_term());
        }
        return lhs;
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_factor();
        while (cur().kind == Token::Kind::Star || cur().kind == Token::Kind::Slash) {
            const BinaryOp op =
                cur().kind == Token::Kind::Star ? BinaryOp::Mul : BinaryOp::Div;
            advance();
            lhs = node_binary(op, std::move(lhs), parse_factor());
        }
        return lhs;
    }

    NodePtr parse_factor() {
        if (cur().kind == Token::Kind::Minus) {
            advance();
            return node_negate(parse_factor());
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (cur().kind == Token::Kind::Caret) {
            advance();
            return node_binary(BinaryOp::Pow, std::move(base), parse_factor());
        }
        return base;
    }

    NodePtr parse_atom() {
        const Token tok = cur();
        switch (tok.kind) {
            case Token::Kind::Number:
                advance();
                return node_constant(tok.number);
            case Token::Kind::Ident: {
                advance();
                if (cur().kind == Token::Kind::LParen) {
                    Func f;
                    if (tok.text == "sin") f = Func::Sin;
                    else if (tok.text == "cos") f = Func::Cos;
                    else if (tok.text == "exp") f = Func::Exp;
                    else if (tok.text == "sqrt") f = Func::Sqrt;
                    else if (tok.text == "log") f = Func::Log;
                    else
                        throw ParseError(tok.offset, "known function (sin, cos, exp, sqrt, log)",
                                         "'" + tok.text + "'");
                    advance();
                    NodePtr arg = parse_expr();
                    expect(Token::Kind::RParen);
                    return node_call(f, std::move(arg));
                }
                if (tok.text == "t") return node_time();
                if (tok.text == "pi") return node_constant(std::numbers::pi);
                return node_parameter(tok.text);
            }
            case Token::Kind::LParen: {
                advance();
                NodePtr e = parse_expr();
                expect(Token::Kind::RParen);
                return e;
            }
            default:
                throw ParseError(tok.offset, "expression", token_display(tok));
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Differentiation

NodePtr diff(const NodePtr& n);

NodePtr diff_binary(const Node& n) {
    const NodePtr& u = n.a;
    const NodePtr& v = n.b;
    switch (n.op) {
        case BinaryOp::Add:
            return node_binary(BinaryOp::Add, diff(u), diff(v));
        case BinaryOp::Sub:
            return node_binary(BinaryOp::Sub, diff(u), diff(v));
        case BinaryOp::Mul:
            return node_binary(BinaryOp::Add, node_binary(BinaryOp::Mul, diff(u), v),
                               node_binary(BinaryOp::Mul, u, diff(v)));
        case BinaryOp::Div:
            // (u'v - uv') / v^2
            return node_binary(
                BinaryOp::Div,
                node_binary(BinaryOp::Sub, node_binary(BinaryOp::Mul, diff(u), v),
                            node_binary(BinaryOp::Mul, u, diff(v))),
                node_binary(BinaryOp::Mul, v, v));
        case BinaryOp::Pow:
            if (v->kind == Node::Kind::Constant) {
                // c * u^(c-1) * u' -- avoids log(u), so integer powers of
                // negative bases differentiate cleanly.
                return node_binary(
                    BinaryOp::Mul,
                    node_binary(BinaryOp::Mul, node_constant(v->value),
                                node_binary(BinaryOp::Pow, u, node_constant(v->value - 1.0))),
                    diff(u));
            }
            // u^v * (v' log u + v u'/u)
            return node_binary(
                BinaryOp::Mul, node_binary(BinaryOp::Pow, u, v),
                node_binary(BinaryOp::Add,
                            node_binary(BinaryOp::Mul, diff(v), node_call(Func::Log, u)),
                            node_binary(BinaryOp::Div, node_binary(BinaryOp::Mul, v, diff(u)),
                                        u)));
    }
    return node_constant(0.0);
}

NodePtr diff_call(const Node& n) {
    const NodePtr& u = n.a;
    NodePtr inner = diff(u);
    switch (n.func) {
        case Func::Sin:
            return node_binary(BinaryOp::Mul, node_call(Func::Cos, u), std::move(inner));
        case Func::Cos:
            return node_binary(BinaryOp::Mul,
                               node_negate(node_call(Func::Sin, u)), std::move(inner));
        case Func::Exp:
            return node_binary(BinaryOp::Mul, node_call(Func::Exp, u), std::move(inner));
        case Func::Sqrt:
            return node_binary(BinaryOp::Div, std::move(inner),
                               node_binary(BinaryOp::Mul, node_constant(2.0),
                                           node_call(Func::Sqrt, u)));
        case Func::Log:
            return node_binary(BinaryOp::Div, std::move(inner), u);
    }
    return node_constant(0.0);
}

NodePtr diff(const NodePtr& n) {
    switch (n->kind) {
        case Node::Kind::Constant:
        case Node::Kind::Parameter:
            return node_constant(0.0);
        case Node::Kind::Time:
            return node_constant(1.0);
        case Node::Kind::Negate:
            return node_negate(diff(n->a));
        case Node::Kind::Binary:
            return diff_binary(*n);
        case Node::Kind::Call:
            return diff_call(*n);
    }
    return node_constant(0.0);
}

// ---------------------------------------------------------------------------
// Evaluation

double eval_node(const Node& n, double t, const Bindings& bindings) {
    switch (n.kind) {
        case Node::Kind::Constant:
            return n.value;
        case Node::Kind::Time:
            return t;
        case Node::Kind::Parameter: {
            auto it = bindings.find(n.name);
            if (it == bindings.end()) throw UnboundParameterError(n.name);
            return it->second;
        }
        case Node::Kind::Negate:
            return -eval_node(*n.a, t, bindings);
        case Node::Kind::Binary: {
            const double a = eval_node(*n.a, t, bindings);
            const double b = eval_node(*n.b, t, bindings);
            switch (n.op) {
                case BinaryOp::Add: return a + b;
                case BinaryOp::Sub: return a - b;
                case BinaryOp::Mul: return a * b;
                case BinaryOp::Div:
                    if (b == 0.0) throw DomainError("division by zero", t);
                    return a / b;
                case BinaryOp::Pow: {
                    const double r = std::pow(a, b);
                    if (!std::isfinite(r))
                        throw DomainError("pow produced a non-finite value", t);
                    return r;
                }
            }
            return 0.0;
        }
        case Node::Kind::Call: {
            const double a = eval_node(*n.a, t, bindings);
            switch (n.func) {
                case Func::Sin: return std::sin(a);
                case Func::Cos: return std::cos(a);
                case Func::Exp: {
                    const double r = std::exp(a);
                    if (!std::isfinite(r)) throw DomainError("exp overflow", t);
                    return r;
                }
                case Func::Sqrt:
                    if (a < 0.0) throw DomainError("sqrt of negative argument", t);
                    return std::sqrt(a);
                case Func::Log:
                    if (a <= 0.0) throw DomainError("log of non-positive argument", t);
                    return std::log(a);
            }
            return 0.0;
        }
    }
    return 0.0;
}

NodePtr substitute_node(const NodePtr& n, const Bindings& bindings) {
    switch (n->kind) {
        case Node::Kind::Constant:
        case Node::Kind::Time:
            return n;
        case Node::Kind::Parameter: {
            auto it = bindings.find(n->name);
            if (it == bindings.end()) throw UnboundParameterError(n->name);
            return node_constant(it->second);
        }
        case Node::Kind::Negate:
            return node_negate(substitute_node(n->a, bindings));
        case Node::Kind::Binary:
            return node_binary(n->op, substitute_node(n->a, bindings),
                               substitute_node(n->b, bindings));
        case Node::Kind::Call:
            return node_call(n->func, substitute_node(n->a, bindings));
    }
    return n;
}

} // namespace

const Node& Expr::root() const {
    if (!root_) throw Error("empty expression");
    return *root_;
}

namespace {
// Shallow copy of the root node; children stay shared.
NodePtr share(const Expr& e) { return std::make_shared<Node>(e.root()); }
} // namespace

Expr constant(double value) { return wrap(node_constant(value)); }
Expr time_variable() { return wrap(node_time()); }
Expr parameter(std::string name) { return wrap(node_parameter(std::move(name))); }
Expr negate(const Expr& a) { return wrap(node_negate(share(a))); }

Expr binary(BinaryOp op, const Expr& a, const Expr& b) {
    return wrap(node_binary(op, share(a), share(b)));
}

Expr call(Func f, const Expr& a) { return wrap(node_call(f, share(a))); }

Expr parse_expression(std::string_view src) {
    if (src.empty()) throw ParseError(0, "expression", "end of input");
    Parser parser(lex(src));
    return wrap(parser.run());
}

Expr differentiate(const Expr& ast) { return wrap(diff(share(ast))); }

double eval_expression(const Expr& ast, double t, const Bindings& bindings) {
    const double r = eval_node(ast.root(), t, bindings);
    if (!std::isfinite(r)) throw DomainError("non-finite expression value", t);
    return r;
}

Expr substitute(const Expr& ast, const Bindings& bindings) {
    return wrap(substitute_node(share(ast), bindings));
}

std::pair<Expr, Expr> reduce_lagrangian(const Expr& a1, const Expr& a2, const Expr& a3,
                                        const Expr& a4) {
    Expr c = binary(BinaryOp::Sub, differentiate(a1), a2);
    Expr e = binary(BinaryOp::Sub, differentiate(a3), a4);
    return {std::move(c), std::move(e)};
}

} // namespace qprop::expr
