#include "dyadint/expr.hpp"

#include "dyadint/dyadic_rational.hpp"
#include "dyadint/errors.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <unordered_map>

namespace dyadint {

namespace {

std::string shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

NodePtr make_node(NodeKind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr, std::uint32_t index = 0) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    n->index = index;
    return n;
}

NodePtr make_constant(double value, Interval enclosure, std::string_view text = {}) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Constant;
    n->value = value;
    n->enclosure = enclosure;
    n->text = std::string(text);
    return n;
}

// Enclosure of a decimal or p/q literal.
NodePtr constant_from_literal(std::string_view text) {
    try {
        const auto d = DyadicRational::parse(text);
        if (auto exact = d.exact_double()) {
            return make_constant(*exact, Interval::point(*exact));
        }
    } catch (const ParseError&) {
        // not exactly dyadic; fall through
    }
    const auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        const double p = std::strtod(std::string(text.substr(0, slash)).c_str(), nullptr);
        const double q = std::strtod(std::string(text.substr(slash + 1)).c_str(), nullptr);
        if (q == 0.0) {
            throw ParseError("zero denominator in literal '" + std::string(text) + "'");
        }
        // p and q are exact when they are modest integers; otherwise widen.
        Interval pe = Interval::point(p);
        Interval qe = Interval::point(q);
        if (std::fabs(p) > 9007199254740992.0 || p != std::floor(p)) {
            pe = {rounding::next_down(p), rounding::next_up(p)};
        }
        if (std::fabs(q) > 9007199254740992.0 || q != std::floor(q)) {
            qe = {rounding::next_down(q), rounding::next_up(q)};
        }
        bool bad = false;
        const Interval e = ia::div(pe, qe, bad);
        return make_constant(p / q, e, text);
    }
    const double v = std::strtod(std::string(text).c_str(), nullptr);
    return make_constant(v, {rounding::next_down(v), rounding::next_up(v)}, text);
}

class Parser {
public:
    Parser(std::string_view src, std::size_t dim) : src_(src), dim_(dim) {}

    NodePtr parse() {
        auto e = expr();
        skip_ws();
        if (pos_ != src_.size()) {
            throw ParseError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
        }
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])) != 0) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    bool peek_digit(std::size_t at) const {
        return at < src_.size() && std::isdigit(static_cast<unsigned char>(src_[at])) != 0;
    }

    std::uint32_t uint_literal() {
        skip_ws();
        const auto start = pos_;
        std::uint64_t v = 0;
        while (peek_digit(pos_)) {
            v = v * 10 + static_cast<std::uint64_t>(src_[pos_] - '0');
            if (v > 1'000'000) {
                throw ParseError("integer too large", start);
            }
            ++pos_;
        }
        if (pos_ == start) {
            throw ParseError("expected unsigned integer", pos_);
        }
        return static_cast<std::uint32_t>(v);
    }

    NodePtr expr() {
        auto lhs = term();
        while (true) {
            if (accept('+')) {
                lhs = make_node(NodeKind::Add, lhs, term());
            } else if (accept('-')) {
                lhs = make_node(NodeKind::Sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        auto lhs = factor();
        while (true) {
            if (accept('*')) {
                lhs = make_node(NodeKind::Mul, lhs, factor());
            } else if (accept('/')) {
                lhs = make_node(NodeKind::Div, lhs, factor());
            } else {
                return lhs;
            }
        }
    }

    NodePtr factor() {
        const bool negate = accept('-');
        auto a = atom();
        if (accept('^')) {
            a = make_node(NodeKind::Pow, a, nullptr, uint_literal());
        }
        return negate ? make_node(NodeKind::Neg, a) : a;
    }

    NodePtr number() {
        const auto start = pos_;
        while (peek_digit(pos_)) {
            ++pos_;
        }
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (peek_digit(pos_)) {
                ++pos_;
            }
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            auto p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '-' || src_[p] == '+')) {
                ++p;
            }
            if (peek_digit(p)) {
                pos_ = p;
                while (peek_digit(pos_)) {
                    ++pos_;
                }
            }
        }
        // Integer p immediately followed by /q is a rational literal.
        const auto text = src_.substr(start, pos_ - start);
        if (text.find_first_of(".eE") == std::string_view::npos && pos_ < src_.size() &&
            src_[pos_] == '/' && peek_digit(pos_ + 1)) {
            const auto slash = pos_;
            ++pos_;
            while (peek_digit(pos_)) {
                ++pos_;
            }
            auto after = pos_;
            while (after < src_.size() && std::isspace(static_cast<unsigned char>(src_[after])) != 0) {
                ++after;
            }
            // "p/q^n" keeps the usual precedence: p / (q^n).
            if (after < src_.size() && src_[after] == '^') {
                pos_ = slash;
                return constant_from_literal(text);
            }
            return constant_from_literal(src_.substr(start, pos_ - start));
        }
        if (text == ".") {
            throw ParseError("malformed number", start);
        }
        return constant_from_literal(text);
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= src_.size()) {
            throw ParseError("unexpected end of expression", pos_);
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '.') {
            return number();
        }
        if (c == '(') {
            ++pos_;
            auto e = expr();
            expect(')');
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) != 0) {
            const auto start = pos_;
            while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_])) != 0) {
                ++pos_;
            }
            const auto name = src_.substr(start, pos_ - start);
            if (name == "x") {
                const auto idx = uint_literal();
                if (idx == 0 || idx > dim_) {
                    throw DimensionError("variable x" + std::to_string(idx) +
                                         " exceeds dimension " + std::to_string(dim_) +
                                         " (position " + std::to_string(start) + ")");
                }
                return make_node(NodeKind::Variable, nullptr, nullptr, idx - 1);
            }
            if (name == "pi") {
                return make_constant(std::numbers::pi, {std::numbers::pi, rounding::next_up(std::numbers::pi)}, "pi");
            }
            NodeKind kind{};
            bool binary = false;
            if (name == "abs") {
                kind = NodeKind::Abs;
            } else if (name == "sqrt") {
                kind = NodeKind::Sqrt;
            } else if (name == "sin") {
                kind = NodeKind::Sin;
            } else if (name == "cos") {
                kind = NodeKind::Cos;
            } else if (name == "exp") {
                kind = NodeKind::Exp;
            } else if (name == "min") {
                kind = NodeKind::Min;
                binary = true;
            } else if (name == "max") {
                kind = NodeKind::Max;
                binary = true;
            } else {
                throw ParseError("unknown identifier '" + std::string(name) + "'", start);
            }
            expect('(');
            auto a = expr();
            NodePtr b;
            if (binary) {
                expect(',');
                b = expr();
            }
            expect(')');
            return make_node(kind, a, b);
        }
        throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
    }

    std::string_view src_;
    std::size_t dim_;
    std::size_t pos_ = 0;
};

double eval_node(const Node& n, std::span<const double> p) {
    switch (n.kind) {
    case NodeKind::Constant:
        return n.value;
    case NodeKind::Variable:
        return p[n.index];
    case NodeKind::Neg:
        return -eval_node(*n.lhs, p);
    case NodeKind::Add:
        return eval_node(*n.lhs, p) + eval_node(*n.rhs, p);
    case NodeKind::Sub:
        return eval_node(*n.lhs, p) - eval_node(*n.rhs, p);
    case NodeKind::Mul:
        return eval_node(*n.lhs, p) * eval_node(*n.rhs, p);
    case NodeKind::Div: {
        const double d = eval_node(*n.rhs, p);
        if (d == 0.0) {
            throw DomainError("division by zero in " + node_to_string(n));
        }
        return eval_node(*n.lhs, p) / d;
    }
    case NodeKind::Abs:
        return std::fabs(eval_node(*n.lhs, p));
    case NodeKind::Min:
        return std::min(eval_node(*n.lhs, p), eval_node(*n.rhs, p));
    case NodeKind::Max:
        return std::max(eval_node(*n.lhs, p), eval_node(*n.rhs, p));
    case NodeKind::Pow: {
        const double x = eval_node(*n.lhs, p);
        double r = 1.0;
        for (std::uint32_t i = 0; i < n.index; ++i) {
            r *= x;
        }
        return r;
    }
    case NodeKind::Sqrt: {
        const double x = eval_node(*n.lhs, p);
        if (x < 0.0) {
            throw DomainError("square root of negative value in " + node_to_string(n));
        }
        return std::sqrt(x);
    }
    case NodeKind::Sin:
        return std::sin(eval_node(*n.lhs, p));
    case NodeKind::Cos:
        return std::cos(eval_node(*n.lhs, p));
    case NodeKind::Exp:
        return std::exp(eval_node(*n.lhs, p));
    }
    return 0.0;
}

Interval eval_node(const Node& n, std::span<const Interval> box) {
    bool bad = false;
    Interval r{};
    switch (n.kind) {
    case NodeKind::Constant:
        return n.enclosure;
    case NodeKind::Variable:
        return box[n.index];
    case NodeKind::Neg:
        return ia::neg(eval_node(*n.lhs, box));
    case NodeKind::Add:
        return ia::add(eval_node(*n.lhs, box), eval_node(*n.rhs, box));
    case NodeKind::Sub:
        return ia::sub(eval_node(*n.lhs, box), eval_node(*n.rhs, box));
    case NodeKind::Mul:
        return ia::mul(eval_node(*n.lhs, box), eval_node(*n.rhs, box));
    case NodeKind::Div:
        r = ia::div(eval_node(*n.lhs, box), eval_node(*n.rhs, box), bad);
        if (bad) {
            throw DomainError("divisor enclosure contains zero in " + node_to_string(n));
        }
        return r;
    case NodeKind::Abs:
        return ia::abs(eval_node(*n.lhs, box));
    case NodeKind::Min:
        return ia::min(eval_node(*n.lhs, box), eval_node(*n.rhs, box));
    case NodeKind::Max:
        return ia::max(eval_node(*n.lhs, box), eval_node(*n.rhs, box));
    case NodeKind::Pow:
        return ia::pow(eval_node(*n.lhs, box), n.index);
    case NodeKind::Sqrt:
        r = ia::sqrt(eval_node(*n.lhs, box), bad);
        if (bad) {
            throw DomainError("square root of negative enclosure in " + node_to_string(n));
        }
        return r;
    case NodeKind::Sin:
        return ia::sin(eval_node(*n.lhs, box));
    case NodeKind::Cos:
        return ia::cos(eval_node(*n.lhs, box));
    case NodeKind::Exp:
        return ia::exp(eval_node(*n.lhs, box));
    }
    return r;
}

const char* kind_name(NodeKind k) {
    switch (k) {
    case NodeKind::Constant:
        return "Const";
    case NodeKind::Variable:
        return "Var";
    case NodeKind::Neg:
        return "Neg";
    case NodeKind::Add:
        return "Add";
    case NodeKind::Sub:
        return "Sub";
    case NodeKind::Mul:
        return "Mul";
    case NodeKind::Div:
        return "Div";
    case NodeKind::Abs:
        return "Abs";
    case NodeKind::Min:
        return "Min";
    case NodeKind::Max:
        return "Max";
    case NodeKind::Pow:
        return "Pow";
    case NodeKind::Sqrt:
        return "Sqrt";
    case NodeKind::Sin:
        return "Sin";
    case NodeKind::Cos:
        return "Cos";
    case NodeKind::Exp:
        return "Exp";
    }
    return "?";
}

NodePtr remap_node(const NodePtr& n, std::span<const std::size_t> mapping,
                   std::unordered_map<const Node*, NodePtr>& memo) {
    if (!n) {
        return nullptr;
    }
    if (auto it = memo.find(n.get()); it != memo.end()) {
        return it->second;
    }
    NodePtr out;
    if (n->kind == NodeKind::Variable) {
        out = make_node(NodeKind::Variable, nullptr, nullptr,
                        static_cast<std::uint32_t>(mapping[n->index]));
    } else if (n->kind == NodeKind::Constant) {
        out = n;
    } else {
        auto copy = std::make_shared<Node>(*n);
        copy->lhs = remap_node(n->lhs, mapping, memo);
        copy->rhs = remap_node(n->rhs, mapping, memo);
        out = copy;
    }
    memo.emplace(n.get(), out);
    return out;
}

void walk(const Node& n, auto&& fn) {
    fn(n);
    if (n.lhs) {
        walk(*n.lhs, fn);
    }
    if (n.rhs) {
        walk(*n.rhs, fn);
    }
}

} // namespace

std::string node_to_string(const Node& n) {
    switch (n.kind) {
    case NodeKind::Constant:
        return "Const " + shortest(n.value);
    case NodeKind::Variable:
        return "Var " + std::to_string(n.index + 1);
    case NodeKind::Pow:
        return "Pow(" + node_to_string(*n.lhs) + ", " + std::to_string(n.index) + ")";
    default:
        break;
    }
    std::string s = std::string(kind_name(n.kind)) + "(" + node_to_string(*n.lhs);
    if (n.rhs) {
        s += ", " + node_to_string(*n.rhs);
    }
    return s + ")";
}

Expr::Expr(NodePtr root, std::size_t dim) : root_(std::move(root)), dim_(dim) {
    if (dim_ == 0) {
        throw DimensionError("expression dimension must be at least 1");
    }
    if (root_ && variables_used() > dim_) {
        throw DimensionError("expression uses x" + std::to_string(variables_used()) +
                             " beyond dimension " + std::to_string(dim_));
    }
}

Expr Expr::parse(std::string_view source, std::size_t dim) {
    if (dim == 0) {
        throw DimensionError("expression dimension must be at least 1");
    }
    Parser p(source, dim);
    return {p.parse(), dim};
}

Expr Expr::constant(double value, std::size_t dim) {
    return {make_constant(value, Interval::point(value)), dim};
}

Expr Expr::variable(std::size_t axis, std::size_t dim) {
    return {make_node(NodeKind::Variable, nullptr, nullptr, static_cast<std::uint32_t>(axis)), dim};
}

std::size_t Expr::variables_used() const {
    std::size_t used = 0;
    if (root_) {
        walk(*root_, [&](const Node& n) {
            if (n.kind == NodeKind::Variable) {
                used = std::max<std::size_t>(used, n.index + 1);
            }
        });
    }
    return used;
}

bool Expr::has_division() const {
    bool found = false;
    if (root_) {
        walk(*root_, [&](const Node& n) { found = found || n.kind == NodeKind::Div; });
    }
    return found;
}

double Expr::eval_point(std::span<const double> point) const {
    if (point.size() != dim_) {
        throw DimensionError("point has " + std::to_string(point.size()) + " coordinates, expected " +
                             std::to_string(dim_));
    }
    return eval_node(*root_, point);
}

Interval Expr::eval_interval(std::span<const Interval> box) const {
    if (box.size() != dim_) {
        throw DimensionError("box has " + std::to_string(box.size()) + " axes, expected " +
                             std::to_string(dim_));
    }
    return eval_node(*root_, box);
}

Expr Expr::remap(std::span<const std::size_t> mapping, std::size_t new_dim) const {
    if (mapping.size() < variables_used()) {
        throw DimensionError("variable mapping too short");
    }
    for (auto m : mapping) {
        if (m >= new_dim) {
            throw DimensionError("variable mapping exceeds new dimension");
        }
    }
    std::unordered_map<const Node*, NodePtr> memo;
    return {remap_node(root_, mapping, memo), new_dim};
}

std::string Expr::to_string() const { return root_ ? node_to_string(*root_) : "<empty>"; }

namespace {

std::string node_to_source(const Node& n) {
    const auto bin = [&](const char* op) {
        return "(" + node_to_source(*n.lhs) + " " + op + " " + node_to_source(*n.rhs) + ")";
    };
    const auto call = [&](const char* f) {
        std::string s = std::string(f) + "(" + node_to_source(*n.lhs);
        if (n.rhs) {
            s += ", " + node_to_source(*n.rhs);
        }
        return s + ")";
    };
    switch (n.kind) {
    case NodeKind::Constant: {
        if (!n.text.empty()) {
            return "(" + n.text + ")";
        }
        const std::string v = DyadicRational::from_double(n.value).to_string();
        return n.value < 0 ? "(" + v + ")" : v;
    }
    case NodeKind::Variable:
        return "x" + std::to_string(n.index + 1);
    case NodeKind::Neg:
        return "(-" + node_to_source(*n.lhs) + ")";
    case NodeKind::Add:
        return bin("+");
    case NodeKind::Sub:
        return bin("-");
    case NodeKind::Mul:
        return bin("*");
    case NodeKind::Div:
        return bin("/");
    case NodeKind::Pow:
        return "(" + node_to_source(*n.lhs) + ")^" + std::to_string(n.index);
    case NodeKind::Abs:
        return call("abs");
    case NodeKind::Min:
        return call("min");
    case NodeKind::Max:
        return call("max");
    case NodeKind::Sqrt:
        return call("sqrt");
    case NodeKind::Sin:
        return call("sin");
    case NodeKind::Cos:
        return call("cos");
    case NodeKind::Exp:
        return call("exp");
    }
    return {};
}

} // namespace

std::string Expr::to_source() const { return root_ ? node_to_source(*root_) : std::string(); }

Expr make_unary(NodeKind kind, const Expr& a) { return {make_node(kind, a.root()), a.dim()}; }

Expr make_binary(NodeKind kind, const Expr& a, const Expr& b) {
    if (a.dim() != b.dim()) {
        throw DimensionError("operands have different dimensions");
    }
    return {make_node(kind, a.root(), b.root()), a.dim()};
}

Expr make_pow(const Expr& a, std::uint32_t exponent) {
    return {make_node(NodeKind::Pow, a.root(), nullptr, exponent), a.dim()};
}

Expr operator+(const Expr& a, const Expr& b) { return make_binary(NodeKind::Add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return make_binary(NodeKind::Sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return make_binary(NodeKind::Mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return make_binary(NodeKind::Div, a, b); }
Expr Expr::operator-() const { return make_unary(NodeKind::Neg, *this); }

Tape compile(const Expr& e) {
    Tape tape;
    tape.dim = e.dim();
    std::unordered_map<const Node*, std::uint32_t> slot_of;
    auto emit = [&](auto&& self, const Node& n) -> std::uint32_t {
        if (auto it = slot_of.find(&n); it != slot_of.end()) {
            return it->second;
        }
        Instr ins;
        if (n.lhs) {
            ins.a = self(self, *n.lhs);
        }
        if (n.rhs) {
            ins.b = self(self, *n.rhs);
        }
        switch (n.kind) {
        case NodeKind::Constant:
            ins.op = Op::Const;
            ins.c = n.enclosure;
            break;
        case NodeKind::Variable:
            ins.op = Op::Var;
            ins.n = n.index;
            break;
        case NodeKind::Pow:
            ins.op = Op::Pow;
            ins.n = n.index;
            break;
        default:
            ins.op = static_cast<Op>(static_cast<std::uint8_t>(n.kind));
            break;
        }
        tape.code.push_back(ins);
        const auto slot = static_cast<std::uint32_t>(tape.code.size() - 1);
        slot_of.emplace(&n, slot);
        return slot;
    };
    if (!e.empty()) {
        emit(emit, *e.root());
    }
    return tape;
}

std::string Interval::to_string() const { return "[" + shortest(lo) + ", " + shortest(hi) + "]"; }

} // namespace dyadint
