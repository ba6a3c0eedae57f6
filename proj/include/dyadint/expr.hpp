#ifndef DYADINT_EXPR_HPP
#define DYADINT_EXPR_HPP

#include "dyadint/interval.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dyadint {

enum class NodeKind : std::uint8_t {
    Constant,
    Variable,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Abs,
    Min,
    Max,
    Pow,
    Sqrt,
    Sin,
    Cos,
    Exp,
};

struct Node {
    NodeKind kind = NodeKind::Constant;
    // Constant: nearest double and a rigorous enclosure of the literal.
    double value = 0.0;
    Interval enclosure{};
    // Constant: source literal when the value is not exactly a double.
    std::string text;
    // Variable: zero-based axis. Pow: exponent.
    std::uint32_t index = 0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

using NodePtr = std::shared_ptr<const Node>;

// Arithmetic expression over x1..xm. Immutable; copies share the tree.
class Expr {
public:
    Expr() = default;
    Expr(NodePtr root, std::size_t dim);

    // Grammar (see docs/expression-grammar.md):
    //   expr   := term (('+'|'-') term)*
    //   term   := factor (('*'|'/') factor)*
    //   factor := '-'? atom ('^' uint)?
    //   atom   := number | 'x' uint | 'pi' | '(' expr ')' | func '(' expr (',' expr)? ')'
    static Expr parse(std::string_view source, std::size_t dim);

    static Expr constant(double value, std::size_t dim);
    static Expr variable(std::size_t axis, std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    const NodePtr& root() const noexcept { return root_; }
    bool empty() const noexcept { return root_ == nullptr; }

    // Highest variable axis used, plus one (0 for constant expressions).
    std::size_t variables_used() const;
    // True if the tree contains a Div node.
    bool has_division() const;

    double eval_point(std::span<const double> point) const;

    // Outer enclosure of the range over the closed box.
    Interval eval_interval(std::span<const Interval> box) const;

    // Variable axis j becomes axis mapping[j] in a space of new_dim dimensions.
    Expr remap(std::span<const std::size_t> mapping, std::size_t new_dim) const;

    // Structural form, e.g. "Add(Abs(Sub(Var 1, Const 0.5)), Const 1)".
    std::string to_string() const;
    // Infix text that parses back to an equivalent expression.
    std::string to_source() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    Expr operator-() const;

private:
    NodePtr root_;
    std::size_t dim_ = 0;
};

std::string node_to_string(const Node& node);

Expr make_unary(NodeKind kind, const Expr& a);
Expr make_binary(NodeKind kind, const Expr& a, const Expr& b);
Expr make_pow(const Expr& a, std::uint32_t exponent);

// Linear program form of an Expr used by the batch evaluator. Slot i holds
// the value of instruction i; operands refer to earlier slots.
enum class Op : std::uint8_t {
    Const,
    Var,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Abs,
    Min,
    Max,
    Pow,
    Sqrt,
    Sin,
    Cos,
    Exp,
};

struct Instr {
    Op op = Op::Const;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::uint32_t n = 0; // Var axis or Pow exponent
    Interval c{};        // Const enclosure
};

struct Tape {
    std::vector<Instr> code;
    std::size_t dim = 0;
};

Tape compile(const Expr& e);

} // namespace dyadint

#endif
