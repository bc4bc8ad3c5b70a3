#include "rivulet/expr.hpp"

#include "rivulet/detail/launch.hpp"
#include "rivulet/runtime.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <map>
#include <sstream>
#include <tuple>

namespace rivulet {

const char* to_string(UnaryOp op)
{
    switch (op) {
    case UnaryOp::Neg: return "neg";
    case UnaryOp::Abs: return "abs";
    case UnaryOp::Sqrt: return "sqrt";
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Exp: return "exp";
    }
    return "?";
}

const char* to_string(BinaryOp op)
{
    switch (op) {
    case BinaryOp::Add: return "add";
    case BinaryOp::Sub: return "sub";
    case BinaryOp::Mul: return "mul";
    case BinaryOp::Div: return "div";
    case BinaryOp::Min: return "min";
    case BinaryOp::Max: return "max";
    }
    return "?";
}

namespace {

double apply_unary(UnaryOp op, double v)
{
    switch (op) {
    case UnaryOp::Neg: return -v;
    case UnaryOp::Abs: return std::fabs(v);
    case UnaryOp::Sqrt: return std::sqrt(v);
    case UnaryOp::Sin: return std::sin(v);
    case UnaryOp::Cos: return std::cos(v);
    case UnaryOp::Exp: return std::exp(v);
    }
    return v;
}

double apply_binary(BinaryOp op, double a, double b)
{
    switch (op) {
    case BinaryOp::Add: return a + b;
    case BinaryOp::Sub: return a - b;
    case BinaryOp::Mul: return a * b;
    case BinaryOp::Div: return a / b; // IEEE semantics; division by zero is not an error
    case BinaryOp::Min: return std::fmin(a, b);
    case BinaryOp::Max: return std::fmax(a, b);
    }
    return a;
}

ExprNodePtr make_constant_node(double v, std::size_t len = 1)
{
    auto node   = std::make_shared<ExprNode>();
    node->kind  = ExprNode::Kind::Constant;
    node->value = v;
    node->len   = len;
    return node;
}

bool structurally_equal(const ExprNodePtr& a, const ExprNodePtr& b)
{
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case ExprNode::Kind::Leaf: return a->leaf_id == b->leaf_id;
    case ExprNode::Kind::Constant:
        return std::bit_cast<std::uint64_t>(a->value) == std::bit_cast<std::uint64_t>(b->value);
    case ExprNode::Kind::Unary:
        return a->uop == b->uop && structurally_equal(a->lhs, b->lhs);
    case ExprNode::Kind::Binary:
        return a->bop == b->bop && structurally_equal(a->lhs, b->lhs) &&
               structurally_equal(a->rhs, b->rhs);
    }
    return false;
}

// Constant folding (plus the optional cancellation peephole), bottom-up.
ExprNodePtr fold(const ExprNodePtr& node, const EvalOptions& options)
{
    switch (node->kind) {
    case ExprNode::Kind::Leaf:
    case ExprNode::Kind::Constant: return node;
    case ExprNode::Kind::Unary: {
        auto child = fold(node->lhs, options);
        if (child->kind == ExprNode::Kind::Constant)
            return make_constant_node(apply_unary(node->uop, child->value), node->len);
        if (child == node->lhs) return node;
        auto out  = std::make_shared<ExprNode>(*node);
        out->lhs  = std::move(child);
        return out;
    }
    case ExprNode::Kind::Binary: {
        auto lhs = fold(node->lhs, options);
        auto rhs = fold(node->rhs, options);
        if (lhs->kind == ExprNode::Kind::Constant && rhs->kind == ExprNode::Kind::Constant)
            return make_constant_node(apply_binary(node->bop, lhs->value, rhs->value), node->len);
        if (options.algebraic_simplify && node->bop == BinaryOp::Mul) {
            // (e / z) * z -> e and z * (e / z) -> e
            if (lhs->kind == ExprNode::Kind::Binary && lhs->bop == BinaryOp::Div &&
                structurally_equal(lhs->rhs, rhs))
                return lhs->lhs;
            if (rhs->kind == ExprNode::Kind::Binary && rhs->bop == BinaryOp::Div &&
                structurally_equal(rhs->rhs, lhs))
                return rhs->lhs;
        }
        if (lhs == node->lhs && rhs == node->rhs) return node;
        auto out = std::make_shared<ExprNode>(*node);
        out->lhs = std::move(lhs);
        out->rhs = std::move(rhs);
        return out;
    }
    }
    return node;
}

// Hash-consing: structurally identical subtrees collapse onto one shared
// node, so the flattened program evaluates them once.
struct CseTable {
    using Key = std::tuple<int, int, std::uint64_t, ObjectId, const ExprNode*, const ExprNode*>;
    std::map<Key, ExprNodePtr> nodes;

    ExprNodePtr canonicalize(const ExprNodePtr& node)
    {
        ExprNodePtr lhs, rhs;
        if (node->lhs) lhs = canonicalize(node->lhs);
        if (node->rhs) rhs = canonicalize(node->rhs);

        Key key{static_cast<int>(node->kind), 0, 0, kUnknownId, lhs.get(), rhs.get()};
        switch (node->kind) {
        case ExprNode::Kind::Leaf: std::get<3>(key) = node->leaf_id; break;
        case ExprNode::Kind::Constant:
            std::get<2>(key) = std::bit_cast<std::uint64_t>(node->value);
            break;
        case ExprNode::Kind::Unary: std::get<1>(key) = static_cast<int>(node->uop); break;
        case ExprNode::Kind::Binary: std::get<1>(key) = static_cast<int>(node->bop); break;
        }

        const auto it = nodes.find(key);
        if (it != nodes.end()) return it->second;

        ExprNodePtr canonical;
        if (lhs == node->lhs && rhs == node->rhs) {
            canonical = node;
        } else {
            auto out = std::make_shared<ExprNode>(*node);
            out->lhs = lhs;
            out->rhs = rhs;
            canonical = out;
        }
        nodes.emplace(key, canonical);
        return canonical;
    }
};

} // namespace

// ==========================================================================
// Expr construction
// ==========================================================================

Expr::Expr(const Managed& m)
{
    auto node     = std::make_shared<ExprNode>();
    node->kind    = ExprNode::Kind::Leaf;
    node->leaf    = m.state();
    node->leaf_id = m.id();
    node->len     = m.size();
    node_         = std::move(node);
}

Expr::Expr(double constant) : node_(make_constant_node(constant)) {}

Expr make_unary(UnaryOp op, Expr child)
{
    auto node  = std::make_shared<ExprNode>();
    node->kind = ExprNode::Kind::Unary;
    node->uop  = op;
    node->len  = child.len();
    node->lhs  = child.node();
    return Expr(std::move(node));
}

Expr make_binary(BinaryOp op, Expr lhs, Expr rhs)
{
    const auto ll = lhs.len(), rl = rhs.len();
    if (ll != rl && ll != 1 && rl != 1)
        throw Error("expression: shape mismatch (" + std::to_string(ll) + " vs " +
                    std::to_string(rl) + ")");
    auto node  = std::make_shared<ExprNode>();
    node->kind = ExprNode::Kind::Binary;
    node->bop  = op;
    node->len  = std::max(ll, rl);
    node->lhs  = lhs.node();
    node->rhs  = rhs.node();
    return Expr(std::move(node));
}

// ==========================================================================
// ExecutableExpression
// ==========================================================================

struct ExecutableExpression::Program {
    enum class StepKind { Leaf, Constant, Unary, Binary };

    struct Step {
        StepKind    kind = StepKind::Constant;
        UnaryOp     uop  = UnaryOp::Neg;
        BinaryOp    bop  = BinaryOp::Add;
        int         a = -1, b = -1; // input slots
        int         leaf = -1;      // index into leaves
        double      constant = 0.0;
        std::size_t len      = 1;
    };

    std::vector<Step>                                steps;
    std::vector<std::weak_ptr<detail::ManagedState>> leaves;
    std::vector<ObjectId>                            leaf_ids;
    std::size_t                                      root_len = 1;
    std::unique_ptr<std::atomic<std::uint64_t>[]>    eval_counts;

    int intern(const ExprNodePtr& node, std::map<const ExprNode*, int>& slot_of)
    {
        const auto it = slot_of.find(node.get());
        if (it != slot_of.end()) return it->second;

        Step step;
        step.len = node->len;
        switch (node->kind) {
        case ExprNode::Kind::Leaf: {
            step.kind = StepKind::Leaf;
            int leaf_index = -1;
            for (std::size_t i = 0; i < leaf_ids.size(); ++i)
                if (leaf_ids[i] == node->leaf_id) leaf_index = static_cast<int>(i);
            if (leaf_index < 0) {
                leaf_index = static_cast<int>(leaves.size());
                leaves.push_back(node->leaf);
                leaf_ids.push_back(node->leaf_id);
            }
            step.leaf = leaf_index;
            break;
        }
        case ExprNode::Kind::Constant:
            step.kind     = StepKind::Constant;
            step.constant = node->value;
            break;
        case ExprNode::Kind::Unary:
            step.kind = StepKind::Unary;
            step.uop  = node->uop;
            step.a    = intern(node->lhs, slot_of);
            break;
        case ExprNode::Kind::Binary:
            step.kind = StepKind::Binary;
            step.bop  = node->bop;
            step.a    = intern(node->lhs, slot_of);
            step.b    = intern(node->rhs, slot_of);
            break;
        }
        const int slot = static_cast<int>(steps.size());
        steps.push_back(step);
        slot_of.emplace(node.get(), slot);
        return slot;
    }
};

ExecutableExpression Eval(const Expr& expr, const Context& ctx, EvalOptions options)
{
    ExecutableExpression ee(ctx);

    CseTable table;
    auto     root = table.canonicalize(fold(expr.node(), options));

    auto program = std::make_shared<ExecutableExpression::Program>();
    std::map<const ExprNode*, int> slot_of;
    program->intern(root, slot_of);
    program->root_len    = root->len;
    program->eval_counts = std::make_unique<std::atomic<std::uint64_t>[]>(program->steps.size());

    std::size_t ops = 0;
    for (const auto& step : program->steps)
        if (step.kind == ExecutableExpression::Program::StepKind::Unary ||
            step.kind == ExecutableExpression::Program::StepKind::Binary)
            ++ops;

    ee.root_     = std::move(root);
    ee.program_  = std::move(program);
    ee.leaf_ids_ = ee.program_->leaf_ids;
    ee.op_count_ = ops;
    return ee;
}

ExecutableExpression Eval(const Expr& expr) { return Eval(expr, detail::global_sync_context()); }

ExecutableExpression Eval(const Managed& m, const Context& ctx) { return Eval(Expr(m), ctx); }
ExecutableExpression Eval(const Managed& m) { return Eval(Expr(m)); }

void ExecutableExpression::execute(Managed& target) const
{
    const auto& prog = *program_;
    const auto  n    = target.size();
    if (prog.root_len != n && prog.root_len != 1)
        throw Error("execute: target length " + std::to_string(n) +
                    " does not match expression length " + std::to_string(prog.root_len));

    std::vector<std::shared_ptr<detail::ManagedState>> locked;
    locked.reserve(prog.leaves.size());
    for (const auto& weak : prog.leaves) {
        auto state = weak.lock();
        if (!state) throw Error("execute: expression references a destroyed managed value");
        locked.push_back(std::move(state));
    }

    runtime::log_kernel(runtime::KernelKind::ExprEval,
                        static_cast<std::uint64_t>(op_count_) * n);

    const auto label = "eval(" + (target.name().empty() ? "tmp" : target.name()) + ")";

    detail::KernelLaunch launch(context_, label);
    for (const auto id : leaf_ids_) launch.read(id);
    launch.write(target.id());

    const bool device  = launch.device_side();
    auto       program = program_;
    auto       out     = target.state();

    auto event = launch.enqueue([program, locked = std::move(locked), out, device, n] {
        using StepKind = Program::StepKind;
        const auto& prog = *program;

        for (std::size_t s = 0; s < prog.steps.size(); ++s)
            prog.eval_counts[s].store(0, std::memory_order_relaxed);

        std::vector<std::span<const double>> leaf_spans;
        leaf_spans.reserve(locked.size());
        for (const auto& leaf : locked) leaf_spans.push_back(leaf->buffer.read(device));

        // Evaluate into scratch first so self-assignment reads consistent
        // inputs.
        std::vector<double> scratch(n);
        std::vector<double> slots(prog.steps.size());
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t s = 0; s < prog.steps.size(); ++s) {
                const auto& step = prog.steps[s];
                double      v    = 0.0;
                switch (step.kind) {
                case StepKind::Leaf: {
                    const auto& span = leaf_spans[static_cast<std::size_t>(step.leaf)];
                    v                = span[step.len == 1 ? 0 : i];
                    break;
                }
                case StepKind::Constant: v = step.constant; break;
                case StepKind::Unary: v = apply_unary(step.uop, slots[static_cast<std::size_t>(step.a)]); break;
                case StepKind::Binary:
                    v = apply_binary(step.bop, slots[static_cast<std::size_t>(step.a)],
                                     slots[static_cast<std::size_t>(step.b)]);
                    break;
                }
                slots[s] = v;
                prog.eval_counts[s].fetch_add(1, std::memory_order_relaxed);
            }
            scratch[i] = slots.back();
        }

        auto target_span = out->buffer.write(device);
        std::copy(scratch.begin(), scratch.end(), target_span.begin());
    });

    target.set_pending(event, context_.id());
}

std::string ExecutableExpression::debug_string() const
{
    using StepKind = Program::StepKind;
    std::ostringstream os;
    const auto&        prog = *program_;
    for (std::size_t s = 0; s < prog.steps.size(); ++s) {
        const auto& step = prog.steps[s];
        os << '%' << s << " = ";
        switch (step.kind) {
        case StepKind::Leaf: {
            os << "leaf #" << prog.leaf_ids[static_cast<std::size_t>(step.leaf)];
            if (auto state = prog.leaves[static_cast<std::size_t>(step.leaf)].lock())
                if (!state->name.empty()) os << " (" << state->name << ")";
            break;
        }
        case StepKind::Constant: os << "const " << step.constant; break;
        case StepKind::Unary: os << to_string(step.uop) << " %" << step.a; break;
        case StepKind::Binary:
            os << to_string(step.bop) << " %" << step.a << " %" << step.b;
            break;
        }
        os << '\n';
    }
    os << "root: %" << (prog.steps.size() - 1) << " ops: " << op_count_ << '\n';
    return os.str();
}

std::vector<std::uint64_t> ExecutableExpression::last_node_eval_counts() const
{
    std::vector<std::uint64_t> out(program_->steps.size());
    for (std::size_t s = 0; s < out.size(); ++s)
        out[s] = program_->eval_counts[s].load(std::memory_order_relaxed);
    return out;
}

} // namespace rivulet
