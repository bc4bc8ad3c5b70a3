#pragma once

#include "rivulet/common.hpp"
#include "rivulet/context.hpp"
#include "rivulet/detail/managed_state.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rivulet {

class Expr;
class ExecutableExpression;

// A future for a dual host/device array of values (length 1 for plain
// scalars). Reading through front()/at() implicitly synchronizes with the
// pending producer; assigning an expression evaluates it on the expression's
// bound context and leaves the value pending there. Assigning a plain
// expression (no Eval) binds the shared globally-blocking context and is
// therefore synchronous.
class Managed {
public:
    enum class Validity { HostValid, PendingOnContext };

    Managed() : Managed(0.0) {}
    explicit Managed(double value, std::string name = "");
    explicit Managed(std::span<const double> values, std::string name = "");

    Managed(const Expr& expr);
    Managed(const Expr& expr, const Context& ctx);
    Managed(const ExecutableExpression& ee);

    // Copies snapshot the value synchronously; handing the state itself
    // around is what moves are for.
    Managed(const Managed& other);
    Managed& operator=(const Managed& other);
    Managed(Managed&&) noexcept            = default;
    Managed& operator=(Managed&&) noexcept = default;
    ~Managed()                             = default;

    Managed& operator=(const Expr& expr);
    Managed& operator=(const ExecutableExpression& ee);
    Managed& operator=(double value);

    // Implicitly waits on the pending producer, then returns element 0 (the
    // whole value for scalars).
    double front();
    double at(std::size_t i);

    std::size_t size() const { return state_->buffer.size(); }
    ObjectId    id() const { return state_->id; }
    const std::string& name() const { return state_->name; }

    Validity validity() const
    {
        return state_->pending ? Validity::PendingOnContext : Validity::HostValid;
    }
    ObjectId pending_context() const { return state_->pending_context; }

    const std::shared_ptr<detail::ManagedState>& state() const { return state_; }

    // Called by kernels that produced a new value for this object.
    void set_pending(detail::Event event, ObjectId context);

private:
    void sync_host(const char* api);

    std::shared_ptr<detail::ManagedState> state_;
};

using ManagedReal   = Managed;
using ManagedScalar = Managed;

} // namespace rivulet
