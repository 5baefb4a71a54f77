#include "hycurv/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace hycurv::expr {

namespace {

struct Parser {
    const std::string& text;
    int n;
    size_t pos = 0;
    std::vector<Node>* nodes;
    bool depends_on_u = false;

    [[noreturn]] void fail(const std::string& what, size_t at) const {
        throw Error(Errc::parse_error,
                    "parse error at offset " + std::to_string(at) + ": " + what)
            .with_offset(static_cast<long>(at));
    }

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool peek_is(char c) {
        skip_ws();
        return pos < text.size() && text[pos] == c;
    }

    bool consume(char c) {
        if (peek_is(c)) {
            ++pos;
            return true;
        }
        return false;
    }

    int push(Node nd) {
        nodes->push_back(nd);
        return static_cast<int>(nodes->size()) - 1;
    }

    double parse_number_token(size_t& at) {
        skip_ws();
        at = pos;
        size_t p = pos;
        bool neg = false;
        if (p < text.size() && text[p] == '-') {
            neg = true;
            ++p;
        }
        size_t digits_start = p;
        while (p < text.size() && (std::isdigit(static_cast<unsigned char>(text[p])) || text[p] == '.'))
            ++p;
        if (p == digits_start) fail("expected a number", pos);
        if (p < text.size() && (text[p] == 'e' || text[p] == 'E')) {
            size_t q = p + 1;
            if (q < text.size() && (text[q] == '+' || text[q] == '-')) ++q;
            if (q < text.size() && std::isdigit(static_cast<unsigned char>(text[q]))) {
                ++q;
                while (q < text.size() && std::isdigit(static_cast<unsigned char>(text[q]))) ++q;
                p = q;
            }
        }
        double value = 0.0;
        const auto res = std::from_chars(text.data() + digits_start, text.data() + p, value);
        if (res.ec != std::errc() || res.ptr != text.data() + p)
            fail("malformed number", digits_start);
        pos = p;
        return neg ? -value : value;
    }

    int parse_expr() {
        int lhs = parse_term();
        for (;;) {
            skip_ws();
            if (pos >= text.size()) break;
            const char c = text[pos];
            if (c != '+' && c != '-') break;
            const size_t at = pos;
            ++pos;
            const int rhs = parse_term();
            Node nd;
            nd.kind = NodeKind::binary;
            nd.bop = (c == '+') ? BinaryOp::add : BinaryOp::sub;
            nd.child0 = lhs;
            nd.child1 = rhs;
            nd.offset = static_cast<long>(at);
            lhs = push(nd);
        }
        return lhs;
    }

    int parse_term() {
        int lhs = parse_factor();
        for (;;) {
            skip_ws();
            if (pos >= text.size()) break;
            const char c = text[pos];
            if (c != '*' && c != '/') break;
            const size_t at = pos;
            ++pos;
            const int rhs = parse_factor();
            Node nd;
            nd.kind = NodeKind::binary;
            nd.bop = (c == '*') ? BinaryOp::mul : BinaryOp::div;
            nd.child0 = lhs;
            nd.child1 = rhs;
            nd.offset = static_cast<long>(at);
            lhs = push(nd);
        }
        return lhs;
    }

    int parse_factor() {
        int base = parse_unary();
        skip_ws();
        if (pos < text.size() && text[pos] == '^') {
            const size_t at = pos;
            ++pos;
            size_t num_at = 0;
            const double expo = parse_number_token(num_at);
            Node nd;
            nd.kind = NodeKind::power;
            nd.child0 = base;
            nd.constant = expo;
            nd.offset = static_cast<long>(at);
            base = push(nd);
        }
        return base;
    }

    int parse_unary() {
        skip_ws();
        if (pos < text.size() && text[pos] == '-') {
            const size_t at = pos;
            ++pos;
            const int child = parse_atom();
            Node nd;
            nd.kind = NodeKind::unary;
            nd.uop = UnaryOp::neg;
            nd.child0 = child;
            nd.offset = static_cast<long>(at);
            return push(nd);
        }
        return parse_atom();
    }

    int parse_atom() {
        skip_ws();
        if (pos >= text.size()) fail("expected an operand", pos);
        const char c = text[pos];
        if (c == '(') {
            ++pos;
            const int inner = parse_expr();
            if (!consume(')')) fail("expected ')'", pos);
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const size_t at = pos;
            size_t num_at = 0;
            const double v = parse_number_token(num_at);
            Node nd;
            nd.kind = NodeKind::constant;
            nd.constant = v;
            nd.offset = static_cast<long>(at);
            return push(nd);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const size_t at = pos;
            size_t p = pos;
            while (p < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[p])) || text[p] == '_'))
                ++p;
            const std::string ident = text.substr(pos, p - pos);
            pos = p;
            skip_ws();
            const bool is_call = pos < text.size() && text[pos] == '(';

            if (is_call) {
                UnaryOp op;
                if (ident == "sqrt")
                    op = UnaryOp::sqrt_fn;
                else if (ident == "exp")
                    op = UnaryOp::exp_fn;
                else if (ident == "log")
                    op = UnaryOp::log_fn;
                else
                    fail("'" + ident + "' is not a function", at);
                ++pos; // '('
                const int arg = parse_expr();
                if (!consume(')')) fail("expected ')'", pos);
                Node nd;
                nd.kind = NodeKind::unary;
                nd.uop = op;
                nd.child0 = arg;
                nd.offset = static_cast<long>(at);
                return push(nd);
            }

            Node nd;
            nd.kind = NodeKind::variable;
            nd.offset = static_cast<long>(at);
            if (ident == "u") {
                nd.var = -1;
                depends_on_u = true;
                return push(nd);
            }
            if (ident.size() >= 2 && ident[0] == 'x') {
                int idx = 0;
                const auto res =
                    std::from_chars(ident.data() + 1, ident.data() + ident.size(), idx);
                if (res.ec == std::errc() && res.ptr == ident.data() + ident.size() &&
                    idx >= 1 && idx <= n) {
                    nd.var = idx - 1;
                    return push(nd);
                }
            }
            fail("unknown identifier '" + ident + "'", at);
        }
        fail(std::string("unexpected character '") + c + "'", pos);
    }
};

struct Dual {
    double v;
    double d;
};

[[noreturn]] void eval_fail(const Node& nd, const std::string& what) {
    throw Error(Errc::domain,
                "evaluation error at offset " + std::to_string(nd.offset) + ": " + what)
        .with_offset(nd.offset);
}

Dual eval_node(const std::vector<Node>& nodes, int idx, const SmallVec& x, double u,
               bool want_du) {
    const Node& nd = nodes[static_cast<size_t>(idx)];
    switch (nd.kind) {
        case NodeKind::constant:
            return {nd.constant, 0.0};
        case NodeKind::variable:
            if (nd.var == -1) return {u, want_du ? 1.0 : 0.0};
            return {x[nd.var], 0.0};
        case NodeKind::unary: {
            const Dual a = eval_node(nodes, nd.child0, x, u, want_du);
            switch (nd.uop) {
                case UnaryOp::neg:
                    return {-a.v, -a.d};
                case UnaryOp::sqrt_fn: {
                    if (a.v < 0.0) eval_fail(nd, "sqrt of negative value");
                    const double r = std::sqrt(a.v);
                    double dr = 0.0;
                    if (a.d != 0.0) {
                        if (r == 0.0) eval_fail(nd, "sqrt derivative at zero");
                        dr = a.d / (2.0 * r);
                    }
                    return {r, dr};
                }
                case UnaryOp::exp_fn: {
                    const double r = std::exp(a.v);
                    return {r, a.d * r};
                }
                case UnaryOp::log_fn: {
                    if (!(a.v > 0.0)) eval_fail(nd, "log of non-positive value");
                    return {std::log(a.v), a.d / a.v};
                }
            }
            eval_fail(nd, "bad unary op");
        }
        case NodeKind::binary: {
            const Dual a = eval_node(nodes, nd.child0, x, u, want_du);
            const Dual b = eval_node(nodes, nd.child1, x, u, want_du);
            switch (nd.bop) {
                case BinaryOp::add:
                    return {a.v + b.v, a.d + b.d};
                case BinaryOp::sub:
                    return {a.v - b.v, a.d - b.d};
                case BinaryOp::mul:
                    return {a.v * b.v, a.d * b.v + a.v * b.d};
                case BinaryOp::div:
                    if (b.v == 0.0) eval_fail(nd, "division by zero");
                    return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
            }
            eval_fail(nd, "bad binary op");
        }
        case NodeKind::power: {
            const Dual a = eval_node(nodes, nd.child0, x, u, want_du);
            const double c = nd.constant;
            const double r = std::pow(a.v, c);
            if (!std::isfinite(r)) eval_fail(nd, "power produced a non-finite value");
            double dr = 0.0;
            if (a.d != 0.0) {
                const double slope = c * std::pow(a.v, c - 1.0);
                if (!std::isfinite(slope)) eval_fail(nd, "power derivative is non-finite");
                dr = a.d * slope;
            }
            return {r, dr};
        }
    }
    eval_fail(nodes[static_cast<size_t>(idx)], "bad node kind");
}

void print_node(const std::vector<Node>& nodes, int idx, std::string& out) {
    const Node& nd = nodes[static_cast<size_t>(idx)];
    switch (nd.kind) {
        case NodeKind::constant: {
            char buf[32];
            snprintf(buf, sizeof buf, "%.17g", nd.constant);
            out += buf;
            return;
        }
        case NodeKind::variable:
            if (nd.var == -1)
                out += "u";
            else
                out += "x" + std::to_string(nd.var + 1);
            return;
        case NodeKind::unary:
            switch (nd.uop) {
                case UnaryOp::neg:
                    out += "(-";
                    print_node(nodes, nd.child0, out);
                    out += ")";
                    return;
                case UnaryOp::sqrt_fn: out += "sqrt("; break;
                case UnaryOp::exp_fn: out += "exp("; break;
                case UnaryOp::log_fn: out += "log("; break;
            }
            print_node(nodes, nd.child0, out);
            out += ")";
            return;
        case NodeKind::binary: {
            out += "(";
            print_node(nodes, nd.child0, out);
            switch (nd.bop) {
                case BinaryOp::add: out += " + "; break;
                case BinaryOp::sub: out += " - "; break;
                case BinaryOp::mul: out += " * "; break;
                case BinaryOp::div: out += " / "; break;
            }
            print_node(nodes, nd.child1, out);
            out += ")";
            return;
        }
        case NodeKind::power: {
            out += "(";
            print_node(nodes, nd.child0, out);
            out += ")^";
            char buf[32];
            snprintf(buf, sizeof buf, "%.17g", nd.constant);
            out += buf;
            return;
        }
    }
}

} // namespace

Ast parse(const std::string& text, int n) {
    if (n < 1 || n > kMaxDim)
        throw Error(Errc::config_error, "expression dimension out of range");
    Ast ast;
    ast.dim_ = n;
    ast.source_ = text;
    Parser p{text, n, 0, &ast.nodes_};
    ast.root_ = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size())
        p.fail("trailing input", p.pos);
    ast.depends_on_u_ = p.depends_on_u;
    return ast;
}

double Ast::eval(const SmallVec& x, double u) const {
    if (root_ < 0) throw Error(Errc::parse_error, "eval of empty expression");
    return eval_node(nodes_, root_, x, u, false).v;
}

Ast::ValueAndDu Ast::eval_with_du(const SmallVec& x, double u) const {
    if (root_ < 0) throw Error(Errc::parse_error, "eval of empty expression");
    const Dual r = eval_node(nodes_, root_, x, u, true);
    return {r.v, r.d};
}

std::string Ast::to_string() const {
    std::string out;
    if (root_ >= 0) print_node(nodes_, root_, out);
    return out;
}

} // namespace hycurv::expr
