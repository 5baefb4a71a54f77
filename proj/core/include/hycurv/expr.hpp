#pragma once

#include "hycurv/error.hpp"
#include "hycurv/smallmat.hpp"

#include <string>
#include <vector>

namespace hycurv::expr {

/// Minimal arithmetic expression language hosting psi(x, u) and ubar(x).
///
/// Grammar (whitespace-insensitive):
///   expr   -> term (('+'|'-') term)*
///   term   -> factor (('*'|'/') factor)*
///   factor -> unary ('^' number)?
///   unary  -> ('-')? atom
///   atom   -> number | ident | ident '(' expr ')' | '(' expr ')'
/// Identifiers: x1..x<n>, u, and the functions sqrt, exp, log.
/// '^' takes a constant exponent only, so d/du stays total.
enum class NodeKind : unsigned char { constant, variable, unary, binary, power };
enum class UnaryOp : unsigned char { neg, sqrt_fn, exp_fn, log_fn };
enum class BinaryOp : unsigned char { add, sub, mul, div };

struct Node {
    NodeKind kind;
    UnaryOp uop = UnaryOp::neg;
    BinaryOp bop = BinaryOp::add;
    double constant = 0.0;  // constant value or power exponent
    int var = -2;           // 0..n-1 for x_{i+1}, -1 for u
    int child0 = -1;
    int child1 = -1;
    long offset = 0;        // byte offset in the source text, for diagnostics
};

class Ast {
public:
    Ast() = default;

    int dimension() const { return dim_; }
    bool empty() const { return nodes_.empty(); }
    bool depends_on_u() const { return depends_on_u_; }
    const std::string& source() const { return source_; }

    double eval(const SmallVec& x, double u) const;

    struct ValueAndDu {
        double value;
        double du;
    };
    /// Forward-mode value and exact d/du of the expression.
    ValueAndDu eval_with_du(const SmallVec& x, double u) const;

    /// Canonical fully-parenthesized rendering; parsing it again yields a
    /// structurally identical tree.
    std::string to_string() const;

    friend Ast parse(const std::string& text, int n);

private:
    std::vector<Node> nodes_;
    int root_ = -1;
    int dim_ = 0;
    bool depends_on_u_ = false;
    std::string source_;
};

/// Parse `text` over variables x1..xn and u. Throws a parse error carrying
/// the byte offset of the first offending token.
Ast parse(const std::string& text, int n);

} // namespace hycurv::expr
