#pragma once

#include "rivulet/common.hpp"
#include "rivulet/context.hpp"
#include "rivulet/managed.hpp"

#include <memory>
#include <string>
#include <type_traits>
#include <vector>

namespace rivulet {

enum class UnaryOp { Neg, Abs, Sqrt, Sin, Cos, Exp };
enum class BinaryOp { Add, Sub, Mul, Div, Min, Max };

const char* to_string(UnaryOp op);
const char* to_string(BinaryOp op);

// Immutable node of a symbolic expression DAG over managed values and
// constants. Building one performs no computation.
struct ExprNode {
    enum class Kind { Leaf, Constant, Unary, Binary };

    Kind        kind = Kind::Constant;
    std::size_t len  = 1;

    // Leaf
    std::weak_ptr<detail::ManagedState> leaf;
    ObjectId                            leaf_id = kUnknownId;

    // Constant
    double value = 0.0;

    // Unary / Binary
    UnaryOp                         uop = UnaryOp::Neg;
    BinaryOp                        bop = BinaryOp::Add;
    std::shared_ptr<const ExprNode> lhs;
    std::shared_ptr<const ExprNode> rhs;
};

using ExprNodePtr = std::shared_ptr<const ExprNode>;

// Composable handle over an ExprNode. Any mix of Expr, Managed and arithmetic
// constants combines through the overloaded operators below.
class Expr {
public:
    Expr(const Managed& m);
    Expr(double constant);
    Expr(int constant) : Expr(static_cast<double>(constant)) {}

    static Expr constant(double v) { return Expr(v); }

    explicit Expr(ExprNodePtr node) : node_(std::move(node)) {}

    const ExprNodePtr& node() const { return node_; }
    std::size_t        len() const { return node_->len; }

private:
    ExprNodePtr node_;
};

namespace detail {

template <typename T>
inline constexpr bool is_expr_operand_v =
    std::is_same_v<std::decay_t<T>, Expr> || std::is_same_v<std::decay_t<T>, Managed> ||
    std::is_arithmetic_v<std::decay_t<T>>;

template <typename L, typename R>
inline constexpr bool forms_expression_v =
    is_expr_operand_v<L> && is_expr_operand_v<R> &&
    (std::is_same_v<std::decay_t<L>, Expr> || std::is_same_v<std::decay_t<L>, Managed> ||
     std::is_same_v<std::decay_t<R>, Expr> || std::is_same_v<std::decay_t<R>, Managed>);

} // namespace detail

Expr make_unary(UnaryOp op, Expr child);
Expr make_binary(BinaryOp op, Expr lhs, Expr rhs);

template <typename L, typename R>
    requires detail::forms_expression_v<L, R>
Expr operator+(L&& lhs, R&& rhs)
{
    return make_binary(BinaryOp::Add, Expr(std::forward<L>(lhs)), Expr(std::forward<R>(rhs)));
}

template <typename L, typename R>
    requires detail::forms_expression_v<L, R>
Expr operator-(L&& lhs, R&& rhs)
{
    return make_binary(BinaryOp::Sub, Expr(std::forward<L>(lhs)), Expr(std::forward<R>(rhs)));
}

template <typename L, typename R>
    requires detail::forms_expression_v<L, R>
Expr operator*(L&& lhs, R&& rhs)
{
    return make_binary(BinaryOp::Mul, Expr(std::forward<L>(lhs)), Expr(std::forward<R>(rhs)));
}

template <typename L, typename R>
    requires detail::forms_expression_v<L, R>
Expr operator/(L&& lhs, R&& rhs)
{
    return make_binary(BinaryOp::Div, Expr(std::forward<L>(lhs)), Expr(std::forward<R>(rhs)));
}

inline Expr operator-(const Expr& e) { return make_unary(UnaryOp::Neg, e); }
inline Expr operator-(const Managed& m) { return make_unary(UnaryOp::Neg, Expr(m)); }

inline Expr abs(const Expr& e) { return make_unary(UnaryOp::Abs, e); }
inline Expr sqrt(const Expr& e) { return make_unary(UnaryOp::Sqrt, e); }
inline Expr sin(const Expr& e) { return make_unary(UnaryOp::Sin, e); }
inline Expr cos(const Expr& e) { return make_unary(UnaryOp::Cos, e); }
inline Expr exp(const Expr& e) { return make_unary(UnaryOp::Exp, e); }

inline Expr abs(const Managed& m) { return abs(Expr(m)); }
inline Expr sqrt(const Managed& m) { return sqrt(Expr(m)); }
inline Expr sin(const Managed& m) { return sin(Expr(m)); }
inline Expr cos(const Managed& m) { return cos(Expr(m)); }
inline Expr exp(const Managed& m) { return exp(Expr(m)); }

template <typename L, typename R>
    requires detail::forms_expression_v<L, R>
Expr min(L&& lhs, R&& rhs)
{
    return make_binary(BinaryOp::Min, Expr(std::forward<L>(lhs)), Expr(std::forward<R>(rhs)));
}

template <typename L, typename R>
    requires detail::forms_expression_v<L, R>
Expr max(L&& lhs, R&& rhs)
{
    return make_binary(BinaryOp::Max, Expr(std::forward<L>(lhs)), Expr(std::forward<R>(rhs)));
}

struct EvalOptions {
    // Rewrites like (e / z) * z -> e change floating-point results, so they
    // stay off unless explicitly requested.
    bool algebraic_simplify = false;
};

// Frozen, optimized, executable form of an expression. Carries no operator
// overloads, so it cannot combine with further expressions. Re-executable any
// number of times against different targets.
class ExecutableExpression {
public:
    void execute(Managed& target) const;

    std::size_t op_count() const { return op_count_; }
    const std::vector<ObjectId>& leaf_ids() const { return leaf_ids_; }
    const Context&               bound_context() const { return context_; }

    // Deterministic text rendering of the optimized DAG.
    std::string debug_string() const;

    // Per-unique-node evaluation tallies from the most recent execute (for
    // verifying shared subtrees are computed once).
    std::vector<std::uint64_t> last_node_eval_counts() const;

private:
    friend ExecutableExpression Eval(const Expr&, const Context&, EvalOptions);

    struct Program;

    Context                        context_;
    ExprNodePtr                    root_;
    std::shared_ptr<Program>       program_;
    std::vector<ObjectId>          leaf_ids_;
    std::size_t                    op_count_ = 0;

    explicit ExecutableExpression(Context ctx) : context_(std::move(ctx)) {}
};

// Collapse a symbolic expression into an executable kernel bound to `ctx`
// (the shared globally-blocking context when omitted, making execution
// synchronous). Applies constant folding and common-subexpression
// elimination.
ExecutableExpression Eval(const Expr& expr, const Context& ctx, EvalOptions options = {});
ExecutableExpression Eval(const Expr& expr);
ExecutableExpression Eval(const Managed& m, const Context& ctx);
ExecutableExpression Eval(const Managed& m);

} // namespace rivulet
