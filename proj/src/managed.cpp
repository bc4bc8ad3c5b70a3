#include "rivulet/managed.hpp"

#include "rivulet/expr.hpp"
#include "rivulet/runtime.hpp"
#include "rivulet/trace.hpp"

namespace rivulet {

Managed::Managed(double value, std::string name)
    : state_(std::make_shared<detail::ManagedState>(1, std::move(name)))
{
    state_->buffer.write(false)[0] = value;
}

Managed::Managed(std::span<const double> values, std::string name)
    : state_(std::make_shared<detail::ManagedState>(values.size(), std::move(name)))
{
    auto host = state_->buffer.write(false);
    std::copy(values.begin(), values.end(), host.begin());
}

Managed::Managed(const Expr& expr)
    : state_(std::make_shared<detail::ManagedState>(expr.len(), ""))
{
    Eval(expr).execute(*this);
}

Managed::Managed(const Expr& expr, const Context& ctx)
    : state_(std::make_shared<detail::ManagedState>(expr.len(), ""))
{
    Eval(expr, ctx).execute(*this);
}

Managed::Managed(const ExecutableExpression& ee)
    : state_(std::make_shared<detail::ManagedState>(1, ""))
{
    ee.execute(*this);
}

Managed::Managed(const Managed& other)
    : state_(std::make_shared<detail::ManagedState>(other.size(), other.name()))
{
    Eval(Expr(other)).execute(*this);
}

Managed& Managed::operator=(const Managed& other)
{
    if (state_ == other.state_) return *this;
    Eval(Expr(other)).execute(*this);
    return *this;
}

Managed& Managed::operator=(const Expr& expr)
{
    Eval(expr).execute(*this);
    return *this;
}

Managed& Managed::operator=(const ExecutableExpression& ee)
{
    ee.execute(*this);
    return *this;
}

Managed& Managed::operator=(double value)
{
    deptrack::tracker().await_host(id(), deptrack::MemoryAccessMode::Write, "managed_assign");
    state_->pending.reset();
    state_->pending_context       = 0;
    state_->buffer.write(false)[0] = value;
    return *this;
}

void Managed::sync_host(const char* api)
{
    if (state_->pending) {
        const bool blocked = !state_->pending->completed();
        const auto t0      = trace::now_ns();
        state_->pending->wait();
        trace::host_sync(api, state_->pending_context, blocked, t0, trace::now_ns());
        state_->pending.reset();
        state_->pending_context = 0;
    }
}

double Managed::front()
{
    sync_host("front");
    if (state_->pending) runtime::note_unsafe_host_read(); // instrumentation; unreachable
    return state_->buffer.read(false)[0];
}

double Managed::at(std::size_t i)
{
    if (i >= size()) throw Error("Managed::at: index out of range");
    sync_host("front");
    if (state_->pending) runtime::note_unsafe_host_read();
    return state_->buffer.read(false)[i];
}

void Managed::set_pending(detail::Event event, ObjectId context)
{
    state_->pending         = std::move(event);
    state_->pending_context = context;
}

} // namespace rivulet
