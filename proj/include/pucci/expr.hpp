#pragma once

// Scalar expressions in one variable t with late-bound named parameters.
//
// Grammar (recursive descent):
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := unary ('^' factor)?          '^' is right-associative
//   unary   := '-'? primary                 so -t^2 parses as (-t)^2
//   primary := number | 't' | ident | ident '(' args ')' | '(' expr ')'
//
// Identifiers that are not function names are parameters, except `euler`
// which is the constant e.

#include "pucci/error.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pucci {

using Params = std::map<std::string, double, std::less<>>;

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset, std::vector<std::string> expected)
        : Error(what), offset_(offset), expected_(std::move(expected)) {}

    /// Byte offset into the source text.
    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class UnboundParameter : public Error {
public:
    explicit UnboundParameter(std::string name)
        : Error("unbound parameter '" + name + "'"), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class Func { Exp, Log, Sqrt, Abs, Sinh, Cosh, Tanh, Pow, Min, Max };

namespace detail {

struct FuncInfo {
    Func func;
    std::string_view name;
    int arity;
};

inline constexpr std::array<FuncInfo, 10> kFunctions{{
    {Func::Exp, "exp", 1},
    {Func::Log, "log", 1},
    {Func::Sqrt, "sqrt", 1},
    {Func::Abs, "abs", 1},
    {Func::Sinh, "sinh", 1},
    {Func::Cosh, "cosh", 1},
    {Func::Tanh, "tanh", 1},
    {Func::Pow, "pow", 2},
    {Func::Min, "min", 2},
    {Func::Max, "max", 2},
}};

inline const FuncInfo* find_function(std::string_view name) {
    for (const auto& f : kFunctions)
        if (f.name == name) return &f;
    return nullptr;
}

inline const FuncInfo& function_info(Func fn) {
    for (const auto& f : kFunctions)
        if (f.func == fn) return f;
    return kFunctions[0];
}

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    struct Number { double value; };
    struct Variable {};
    struct Euler {};
    struct Parameter { std::string name; };
    struct Negate { NodePtr operand; };
    struct Binary { BinaryOp op; NodePtr lhs, rhs; };
    struct Call { Func func; std::vector<NodePtr> args; };

    std::variant<Number, Variable, Euler, Parameter, Negate, Binary, Call> kind;
};

inline bool structurally_equal(const Node& a, const Node& b) {
    if (a.kind.index() != b.kind.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.kind);
            if constexpr (std::is_same_v<T, Node::Number>) {
                return x.value == y.value;
            } else if constexpr (std::is_same_v<T, Node::Parameter>) {
                return x.name == y.name;
            } else if constexpr (std::is_same_v<T, Node::Negate>) {
                return structurally_equal(*x.operand, *y.operand);
            } else if constexpr (std::is_same_v<T, Node::Binary>) {
                return x.op == y.op && structurally_equal(*x.lhs, *y.lhs) &&
                       structurally_equal(*x.rhs, *y.rhs);
            } else if constexpr (std::is_same_v<T, Node::Call>) {
                if (x.func != y.func || x.args.size() != y.args.size()) return false;
                for (std::size_t i = 0; i < x.args.size(); ++i)
                    if (!structurally_equal(*x.args[i], *y.args[i])) return false;
                return true;
            } else {
                return true;
            }
        },
        a.kind);
}

/// Fully parenthesized rendering; parsing it back gives a structurally equal tree.
inline std::string to_string(const Node& node) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Node::Number>) {
                return detail::format_number(x.value);
            } else if constexpr (std::is_same_v<T, Node::Variable>) {
                return "t";
            } else if constexpr (std::is_same_v<T, Node::Euler>) {
                return "euler";
            } else if constexpr (std::is_same_v<T, Node::Parameter>) {
                return x.name;
            } else if constexpr (std::is_same_v<T, Node::Negate>) {
                return "(-" + to_string(*x.operand) + ")";
            } else if constexpr (std::is_same_v<T, Node::Binary>) {
                static constexpr std::array<const char*, 5> sym{" + ", " - ", " * ", " / ", " ^ "};
                return "(" + to_string(*x.lhs) + sym[static_cast<int>(x.op)] + to_string(*x.rhs) +
                       ")";
            } else {
                std::string s{detail::function_info(x.func).name};
                s += '(';
                for (std::size_t i = 0; i < x.args.size(); ++i) {
                    if (i) s += ", ";
                    s += to_string(*x.args[i]);
                }
                return s + ')';
            }
        },
        node.kind);
}

class BoundExpr;

/// Immutable parsed expression. Copies share the tree.
class Expr {
public:
    Expr() = default;
    Expr(NodePtr root, std::string source) : root_(std::move(root)), source_(std::move(source)) {}

    static Expr parse(std::string_view text);
    static Expr constant(double v);

    const Node& root() const { return *root_; }
    bool empty() const noexcept { return !root_; }
    const std::string& source() const noexcept { return source_; }
    std::string to_string() const { return root_ ? pucci::to_string(*root_) : std::string{}; }

    /// Names of all parameters referenced by the tree.
    std::set<std::string> parameters() const {
        std::set<std::string> out;
        if (root_) collect(*root_, out);
        return out;
    }

    /// Resolves parameters and flattens the tree for repeated evaluation.
    BoundExpr bind(const Params& params) const;

    double eval(double t, const Params& params) const;

    /// True when the expression is a literal zero, e.g. g = "0".
    bool is_literal_zero() const {
        if (!root_) return false;
        const auto* n = std::get_if<Node::Number>(&root_->kind);
        return n && n->value == 0.0;
    }

    friend bool structurally_equal(const Expr& a, const Expr& b) {
        return a.root_ && b.root_ && structurally_equal(*a.root_, *b.root_);
    }

private:
    static void collect(const Node& n, std::set<std::string>& out) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Node::Parameter>) {
                    out.insert(x.name);
                } else if constexpr (std::is_same_v<T, Node::Negate>) {
                    collect(*x.operand, out);
                } else if constexpr (std::is_same_v<T, Node::Binary>) {
                    collect(*x.lhs, out);
                    collect(*x.rhs, out);
                } else if constexpr (std::is_same_v<T, Node::Call>) {
                    for (const auto& a : x.args) collect(*a, out);
                }
            },
            n.kind);
    }

    NodePtr root_;
    std::string source_;
};

namespace detail {

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse_all() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != src_.size()) fail({"operator", "end of input"});
        return e;
    }

private:
    template <class T>
    static NodePtr make(T&& x) {
        return std::make_shared<const Node>(Node{std::forward<T>(x)});
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        std::string what = "syntax error at offset " + std::to_string(pos_) + ": expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) what += i + 1 == expected.size() ? " or " : ", ";
            what += expected[i];
        }
        if (pos_ < src_.size())
            what += ", found '" + std::string(1, src_[pos_]) + "'";
        else
            what += ", found end of input";
        throw ParseError(what, pos_, std::move(expected));
    }

    void skip_ws() {
        while (pos_ < src_.size() &&
               (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' || src_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = make(Node::Binary{BinaryOp::Add, lhs, term()});
            else if (accept('-'))
                lhs = make(Node::Binary{BinaryOp::Sub, lhs, term()});
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (accept('*'))
                lhs = make(Node::Binary{BinaryOp::Mul, lhs, factor()});
            else if (accept('/'))
                lhs = make(Node::Binary{BinaryOp::Div, lhs, factor()});
            else
                return lhs;
        }
    }

    NodePtr factor() {
        NodePtr base = unary();
        if (accept('^')) return make(Node::Binary{BinaryOp::Pow, base, factor()});
        return base;
    }

    NodePtr unary() {
        if (accept('-')) return make(Node::Negate{primary()});
        return primary();
    }

    static bool ident_start(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    }
    static bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }
    static bool digit(char c) { return c >= '0' && c <= '9'; }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail({"number", "identifier", "'('"});
        const char c = src_[pos_];
        if (digit(c) || c == '.') return number();
        if (ident_start(c)) return identifier();
        if (accept('(')) {
            NodePtr e = expr();
            if (!accept(')')) fail({"')'"});
            return e;
        }
        fail({"number", "identifier", "'('"});
    }

    NodePtr number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && digit(src_[pos_])) ++pos_;
        }
        if (pos_ == start + 1 && src_[start] == '.') {
            pos_ = start;
            fail({"digit"});
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t p = pos_ + 1;
            if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
            if (p < src_.size() && digit(src_[p])) {
                while (p < src_.size() && digit(src_[p])) ++p;
                pos_ = p;
            } else {
                pos_ = p;
                fail({"exponent digits"});
            }
        }
        const std::string lit(src_.substr(start, pos_ - start));
        double v = 0.0;
        const auto res = std::from_chars(lit.data(), lit.data() + lit.size(), v);
        if (res.ec != std::errc{} || res.ptr != lit.data() + lit.size() || !std::isfinite(v)) {
            pos_ = start;
            fail({"finite number literal"});
        }
        return make(Node::Number{v});
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
        const std::string name(src_.substr(start, pos_ - start));
        skip_ws();
        const bool call = pos_ < src_.size() && src_[pos_] == '(';
        if (call) {
            const FuncInfo* fi = find_function(name);
            if (!fi) {
                std::vector<std::string> names;
                for (const auto& f : kFunctions) names.emplace_back(f.name);
                throw ParseError("unknown function '" + name + "' at offset " +
                                     std::to_string(start),
                                 start, std::move(names));
            }
            ++pos_;
            std::vector<NodePtr> args;
            args.push_back(expr());
            while (accept(',')) args.push_back(expr());
            if (!accept(')')) fail({"','", "')'"});
            if (static_cast<int>(args.size()) != fi->arity) {
                throw ParseError("function '" + name + "' takes " + std::to_string(fi->arity) +
                                     " argument(s), got " + std::to_string(args.size()),
                                 start, {std::to_string(fi->arity) + " argument(s)"});
            }
            return make(Node::Call{fi->func, std::move(args)});
        }
        if (name == "t") return make(Node::Variable{});
        if (name == "euler") return make(Node::Euler{});
        if (find_function(name)) {
            fail({"'(' after function name '" + name + "'"});
        }
        return make(Node::Parameter{name});
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr Expr::parse(std::string_view text) {
    detail::Parser p(text);
    return Expr(p.parse_all(), std::string(text));
}

inline Expr Expr::constant(double v) {
    return Expr(std::make_shared<const Node>(Node{Node::Number{v}}), detail::format_number(v));
}

/// Expression with parameters resolved, flattened to postfix for fast repeated
/// evaluation. Evaluation is reentrant.
class BoundExpr {
public:
    BoundExpr() = default;

    double operator()(double t) const {
        if (code_.empty()) throw InvalidInput("evaluating an empty expression");
        std::array<double, 32> small;
        std::vector<double> big;
        double* stack = small.data();
        if (depth_ > small.size()) {
            big.resize(depth_);
            stack = big.data();
        }
        std::size_t sp = 0;
        for (const Instr& in : code_) {
            switch (in.code) {
                case Code::Push: stack[sp++] = in.value; break;
                case Code::Var: stack[sp++] = t; break;
                case Code::Neg: stack[sp - 1] = -stack[sp - 1]; break;
                case Code::Add: --sp; stack[sp - 1] = check(in, stack[sp - 1] + stack[sp], stack[sp - 1]); break;
                case Code::Sub: --sp; stack[sp - 1] = check(in, stack[sp - 1] - stack[sp], stack[sp - 1]); break;
                case Code::Mul: --sp; stack[sp - 1] = check(in, stack[sp - 1] * stack[sp], stack[sp - 1]); break;
                case Code::Div: --sp; stack[sp - 1] = check(in, stack[sp - 1] / stack[sp], stack[sp - 1]); break;
                case Code::Pow:
                case Code::PowCall:
                    --sp;
                    stack[sp - 1] = check(in, std::pow(stack[sp - 1], stack[sp]), stack[sp - 1]);
                    break;
                case Code::Min: --sp; stack[sp - 1] = std::fmin(stack[sp - 1], stack[sp]); break;
                case Code::Max: --sp; stack[sp - 1] = std::fmax(stack[sp - 1], stack[sp]); break;
                case Code::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
                case Code::Log:
                    if (!(stack[sp - 1] > 0.0)) domain(in, stack[sp - 1], "log of non-positive argument");
                    stack[sp - 1] = std::log(stack[sp - 1]);
                    break;
                case Code::Sqrt:
                    if (stack[sp - 1] < 0.0) domain(in, stack[sp - 1], "sqrt of negative argument");
                    stack[sp - 1] = std::sqrt(stack[sp - 1]);
                    break;
                case Code::Abs: stack[sp - 1] = std::abs(stack[sp - 1]); break;
                case Code::Sinh: stack[sp - 1] = std::sinh(stack[sp - 1]); break;
                case Code::Cosh: stack[sp - 1] = std::cosh(stack[sp - 1]); break;
                case Code::Tanh: stack[sp - 1] = std::tanh(stack[sp - 1]); break;
            }
        }
        return stack[0];
    }

private:
    friend class Expr;

    enum class Code { Push, Var, Neg, Add, Sub, Mul, Div, Pow, PowCall, Min, Max, Exp, Log, Sqrt, Abs, Sinh, Cosh, Tanh };

    struct Instr {
        Code code;
        double value = 0.0;
        const Node* node = nullptr;  // for error messages
    };

    // NaN produced from non-NaN operands is reported as a domain error.
    static double check(const Instr& in, double result, double lhs) {
        if (std::isnan(result)) domain(in, lhs, "operation produced NaN");
        return result;
    }

    [[noreturn]] static void domain(const Instr& in, double arg, const char* why) {
        const std::string sub = in.node ? to_string(*in.node) : std::string{};
        throw DomainError(std::string("domain error: ") + why + " in '" + sub +
                              "' (argument " + detail::format_number(arg) + ")",
                          sub, arg);
    }

    void emit(const Node& n, const Params& params, std::size_t depth) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Node::Number>) {
                    code_.push_back({Code::Push, x.value, &n});
                    depth_ = std::max(depth_, depth + 1);
                } else if constexpr (std::is_same_v<T, Node::Variable>) {
                    code_.push_back({Code::Var, 0.0, &n});
                    depth_ = std::max(depth_, depth + 1);
                } else if constexpr (std::is_same_v<T, Node::Euler>) {
                    code_.push_back({Code::Push, std::exp(1.0), &n});
                    depth_ = std::max(depth_, depth + 1);
                } else if constexpr (std::is_same_v<T, Node::Parameter>) {
                    auto it = params.find(x.name);
                    if (it == params.end()) throw UnboundParameter(x.name);
                    code_.push_back({Code::Push, it->second, &n});
                    depth_ = std::max(depth_, depth + 1);
                } else if constexpr (std::is_same_v<T, Node::Negate>) {
                    emit(*x.operand, params, depth);
                    code_.push_back({Code::Neg, 0.0, &n});
                } else if constexpr (std::is_same_v<T, Node::Binary>) {
                    emit(*x.lhs, params, depth);
                    emit(*x.rhs, params, depth + 1);
                    static constexpr std::array<Code, 5> map{Code::Add, Code::Sub, Code::Mul,
                                                             Code::Div, Code::Pow};
                    code_.push_back({map[static_cast<int>(x.op)], 0.0, &n});
                } else {
                    for (std::size_t i = 0; i < x.args.size(); ++i) emit(*x.args[i], params, depth + i);
                    Code c = Code::Exp;
                    switch (x.func) {
                        case Func::Exp: c = Code::Exp; break;
                        case Func::Log: c = Code::Log; break;
                        case Func::Sqrt: c = Code::Sqrt; break;
                        case Func::Abs: c = Code::Abs; break;
                        case Func::Sinh: c = Code::Sinh; break;
                        case Func::Cosh: c = Code::Cosh; break;
                        case Func::Tanh: c = Code::Tanh; break;
                        case Func::Pow: c = Code::PowCall; break;
                        case Func::Min: c = Code::Min; break;
                        case Func::Max: c = Code::Max; break;
                    }
                    code_.push_back({c, 0.0, &n});
                }
            },
            n.kind);
    }

    NodePtr keep_alive_;
    std::vector<Instr> code_;
    std::size_t depth_ = 0;
};

inline BoundExpr Expr::bind(const Params& params) const {
    if (!root_) throw InvalidInput("binding an empty expression");
    BoundExpr b;
    b.keep_alive_ = root_;
    b.emit(*root_, params, 0);
    return b;
}

inline double Expr::eval(double t, const Params& params) const { return bind(params)(t); }

}  // namespace pucci
