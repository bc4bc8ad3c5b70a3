#include "rivulet/context.hpp"

#include "rivulet/runtime.hpp"
#include "rivulet/trace.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <thread>
#include <vector>

namespace rivulet {

const char* to_string(StreamType type)
{
    switch (type) {
    case StreamType::DefaultBlocking: return "default_blocking";
    case StreamType::GloballyBlocking: return "globally_blocking";
    }
    return "?";
}

namespace detail {

namespace {

thread_local ObjectId tl_executing_context = 0;

std::atomic<std::uint64_t> g_task_ids{0};
std::atomic<std::uint64_t> g_enqueue_seq{0};

struct ExecutingScope {
    explicit ExecutingScope(ObjectId ctx)
    {
        prev                 = tl_executing_context;
        tl_executing_context = ctx;
    }
    ~ExecutingScope() { tl_executing_context = prev; }
    ObjectId prev;
};

} // namespace

ObjectId executing_context() { return tl_executing_context; }

void CompletionState::advance_to(std::uint64_t epoch)
{
    {
        std::lock_guard lock(mutex);
        if (completed.load(std::memory_order_relaxed) < epoch)
            completed.store(epoch, std::memory_order_release);
    }
    cv.notify_all();
}

void CompletionState::wait_for(std::uint64_t epoch)
{
    if (reached(epoch)) return;
    if (owner_context != 0 && owner_context == tl_executing_context)
        throw DeadlockError("waiting on context " + std::to_string(owner_context) +
                            " from inside one of its own tasks");
    std::unique_lock lock(mutex);
    cv.wait(lock, [&] { return reached(epoch); });
}

Event Event::manual()
{
    auto state           = std::make_shared<CompletionState>();
    state->owner_context = 0;
    return Event(state, 1);
}

void Event::complete() const
{
    if (state_) state_->advance_to(sequence_);
}

void Event::wait() const
{
    if (state_) state_->wait_for(sequence_);
}

// ==========================================================================
// ContextImpl
// ==========================================================================

enum class TaskKind { User, Wait, Bookkeeping };

struct Task {
    std::uint64_t         epoch = 0;
    std::uint64_t         task_id = 0;
    std::uint64_t         enqueue_seq = 0;
    std::string           label;
    TaskKind              kind = TaskKind::User;
    std::function<void()> fn;
    std::optional<Event>  wait_on;
};

class ContextImpl : public std::enable_shared_from_this<ContextImpl> {
public:
    ContextImpl(StreamType type, std::string name)
        : id_(next_object_id()),
          type_(type),
          name_(name.empty() ? "ctx" + std::to_string(id_) : std::move(name)),
          done_(std::make_shared<CompletionState>())
    {
        done_->owner_context = id_;
    }

    ~ContextImpl()
    {
        // Destruction drains the queue first, then stops the agent.
        if (worker_.joinable()) {
            done_->wait_for(enqueued_.load());
            {
                std::lock_guard lock(queue_mutex_);
                stopping_ = true;
            }
            queue_cv_.notify_all();
            worker_.join();
        }
    }

    ObjectId           id() const { return id_; }
    StreamType         stream_type() const { return type_; }
    const std::string& name() const { return name_; }

    bool idle() const
    {
        return done_->reached(enqueued_.load(std::memory_order_acquire));
    }

    void synchronize()
    {
        const auto target  = enqueued_.load(std::memory_order_acquire);
        const auto blocked = !done_->reached(target);
        const auto t0      = trace::now_ns();
        done_->wait_for(target);
        trace::host_sync("synchronize", id_, blocked, t0, trace::now_ns());
    }

    // Same wait, but invisible to the trace: used for the implicit global
    // drain a globally-blocking enqueue performs.
    void sync_quiet() { done_->wait_for(enqueued_.load(std::memory_order_acquire)); }

    Event record_event()
    {
        return Event(done_, enqueued_.load(std::memory_order_acquire));
    }

    Event push(Task task)
    {
        if (type_ == StreamType::GloballyBlocking) return run_inline(std::move(task));

        std::call_once(worker_once_, [this] {
            worker_ = std::thread([self = shared_from_this()] { self->agent_loop(); });
        });

        std::lock_guard lock(queue_mutex_);
        task.epoch       = enqueued_.fetch_add(1, std::memory_order_acq_rel) + 1;
        task.enqueue_seq = ++g_enqueue_seq;
        queue_.push_back(std::move(task));
        queue_cv_.notify_one();
        return Event(done_, queue_.back().epoch);
    }

    static std::uint64_t fresh_task_id() { return ++g_task_ids; }

private:
    void drain_everything_quiet();

    Event run_inline(Task task)
    {
        // Globally blocking: wait for all prior work everywhere, run to
        // completion before returning.
        drain_everything_quiet();
        std::lock_guard inline_lock(inline_mutex_);
        task.epoch       = enqueued_.fetch_add(1, std::memory_order_acq_rel) + 1;
        task.enqueue_seq = ++g_enqueue_seq;
        execute(task);
        return Event(done_, task.epoch);
    }

    void agent_loop()
    {
        for (;;) {
            Task task;
            {
                std::unique_lock lock(queue_mutex_);
                queue_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
                if (queue_.empty()) return; // stopping, queue drained
                task = std::move(queue_.front());
                queue_.pop_front();
            }
            execute(task);
        }
    }

    void execute(const Task& task)
    {
        if (task.kind == TaskKind::User) runtime::apply_task_delay();

        const auto t0 = trace::now_ns();
        {
            ExecutingScope scope(id_);
            try {
                if (task.wait_on) task.wait_on->wait();
                if (task.fn) task.fn();
            } catch (...) {
                std::lock_guard lock(queue_mutex_);
                if (!pending_error_) pending_error_ = std::current_exception();
            }
        }
        const auto t1 = trace::now_ns();

        if (trace::enabled() && task.kind != TaskKind::Bookkeeping) {
            trace::TraceEvent ev;
            ev.task_id      = task.task_id;
            ev.enqueue_seq  = task.enqueue_seq;
            ev.context_id   = id_;
            ev.context_name = name_;
            ev.label        = task.label;
            ev.kind = task.kind == TaskKind::User ? trace::EventKind::Task : trace::EventKind::Wait;
            ev.t_start_ns = t0;
            ev.t_end_ns   = t1;
            trace::record(std::move(ev));
        }

        done_->advance_to(task.epoch);
        // NOTE: the task closure (and any buffer references it holds) is
        // destroyed strictly after completion is published.
    }

public:
    void rethrow_pending_error()
    {
        std::exception_ptr err;
        {
            std::lock_guard lock(queue_mutex_);
            err = pending_error_;
            pending_error_ = nullptr;
        }
        if (err) std::rethrow_exception(err);
    }

private:
    ObjectId    id_;
    StreamType  type_;
    std::string name_;

    std::mutex              queue_mutex_;
    std::condition_variable queue_cv_;
    std::deque<Task>        queue_;
    bool                    stopping_ = false;
    std::exception_ptr      pending_error_;

    std::atomic<std::uint64_t>       enqueued_{0};
    std::shared_ptr<CompletionState> done_;

    std::once_flag worker_once_;
    std::thread    worker_;
    std::mutex     inline_mutex_; // serializes globally-blocking inline runs
};

// ==========================================================================
// Context registry (for global drains)
// ==========================================================================

namespace {

struct Registry {
    std::mutex                              mutex;
    std::vector<std::weak_ptr<ContextImpl>> contexts;

    void add(const std::shared_ptr<ContextImpl>& ctx)
    {
        std::lock_guard lock(mutex);
        contexts.erase(std::remove_if(contexts.begin(), contexts.end(),
                                      [](const auto& w) { return w.expired(); }),
                       contexts.end());
        contexts.push_back(ctx);
    }

    std::vector<std::shared_ptr<ContextImpl>> live()
    {
        std::lock_guard                            lock(mutex);
        std::vector<std::shared_ptr<ContextImpl>>  out;
        out.reserve(contexts.size());
        for (const auto& w : contexts)
            if (auto s = w.lock()) out.push_back(std::move(s));
        return out;
    }
};

Registry& registry()
{
    static Registry r;
    return r;
}

} // namespace

void ContextImpl::drain_everything_quiet()
{
    for (const auto& ctx : registry().live()) ctx->sync_quiet();
}

} // namespace detail

// ==========================================================================
// Context
// ==========================================================================

Context::Context(StreamType type, std::string name)
    : impl_(std::make_shared<detail::ContextImpl>(type, std::move(name)))
{
    detail::registry().add(impl_);
}

ObjectId           Context::id() const { return impl_->id(); }
StreamType         Context::stream_type() const { return impl_->stream_type(); }
const std::string& Context::name() const { return impl_->name(); }

void Context::wait_for(const Context& waitee) const
{
    if (impl_ == waitee.impl_) return; // self-wait is a no-op
    const auto ev = waitee.record_event();
    if (ev.completed()) return; // nothing to wait for
    enqueue_wait(ev, "wait(" + waitee.name() + ")");
}

bool Context::query_idle() const { return impl_->idle(); }

void Context::synchronize() const
{
    impl_->synchronize();
    impl_->rethrow_pending_error();
}

detail::Event Context::enqueue(std::string label, std::function<void()> fn) const
{
    detail::Task task;
    task.task_id = detail::ContextImpl::fresh_task_id();
    task.label   = std::move(label);
    task.kind    = detail::TaskKind::User;
    task.fn      = std::move(fn);
    return impl_->push(std::move(task));
}

void Context::enqueue_wait(const detail::Event& dep, std::string label) const
{
    if (impl_->stream_type() == StreamType::GloballyBlocking) return; // drain covers it
    detail::Task task;
    task.task_id = detail::ContextImpl::fresh_task_id();
    task.label   = std::move(label);
    task.kind    = detail::TaskKind::Wait;
    task.wait_on = dep;
    impl_->push(std::move(task));
}

void Context::enqueue_bookkeeping(std::string label, std::function<void()> fn) const
{
    if (impl_->stream_type() == StreamType::GloballyBlocking) {
        if (fn) fn();
        return;
    }
    detail::Task task;
    task.task_id = detail::ContextImpl::fresh_task_id();
    task.label   = std::move(label);
    task.kind    = detail::TaskKind::Bookkeeping;
    task.fn      = std::move(fn);
    impl_->push(std::move(task));
}

detail::Event Context::record_event() const { return impl_->record_event(); }

void drain_all()
{
    for (const auto& ctx : detail::registry().live()) {
        ctx->synchronize();
        ctx->rethrow_pending_error();
    }
}

namespace detail {

const Context& global_sync_context()
{
    static Context ctx(StreamType::GloballyBlocking, "global_sync");
    return ctx;
}

} // namespace detail
} // namespace rivulet
