#pragma once

#include "rivulet/common.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>

namespace rivulet {

// Streams come in two flavors. Default-blocking contexts run their queue on a
// dedicated agent, asynchronously with respect to the host and to every other
// context. Globally-blocking contexts own no agent: an enqueue first waits for
// all prior work everywhere, then runs the task inline, so the call returns
// only after the task has completed.
enum class StreamType { DefaultBlocking, GloballyBlocking };

const char* to_string(StreamType type);

namespace detail {

// Monotone completion counter shared between a context and the events
// recorded on it. Kept alive by events, so late waiters never dangle even
// after the context is gone.
struct CompletionState {
    ObjectId                   owner_context = 0;
    std::mutex                 mutex;
    std::condition_variable    cv;
    std::atomic<std::uint64_t> completed{0};

    void advance_to(std::uint64_t epoch);
    void wait_for(std::uint64_t epoch); // throws DeadlockError on self-wait
    bool reached(std::uint64_t epoch) const
    {
        return completed.load(std::memory_order_acquire) >= epoch;
    }
};

// Semaphore-like completion marker: "all tasks enqueued on source up to
// `sequence` have finished". Internal only; the public API never exposes one.
class Event {
public:
    Event() = default;
    Event(std::shared_ptr<CompletionState> state, std::uint64_t sequence)
        : state_(std::move(state)), sequence_(sequence) {}

    // Stand-alone manually-completed event, used for host-side access windows
    // that end at an explicit restore call.
    static Event manual();
    void complete() const;

    bool valid() const { return static_cast<bool>(state_); }
    bool completed() const { return !state_ || state_->reached(sequence_); }
    void wait() const;

    ObjectId      source_context() const { return state_ ? state_->owner_context : 0; }
    std::uint64_t sequence() const { return sequence_; }

private:
    std::shared_ptr<CompletionState> state_;
    std::uint64_t                    sequence_ = 0;
};

class ContextImpl;

// Id of the context whose task is executing on the current thread, 0 on host.
ObjectId executing_context();

} // namespace detail

class Context {
public:
    explicit Context(StreamType type = StreamType::DefaultBlocking, std::string name = "");

    ObjectId           id() const;
    StreamType         stream_type() const;
    const std::string& name() const;

    // Every task subsequently enqueued here starts only after all work
    // enqueued on `waitee` before this call has completed. Does not block the
    // caller. Waiting on oneself is a no-op.
    void wait_for(const Context& waitee) const;

    // True iff everything enqueued so far has completed. Never blocks.
    bool query_idle() const;

    // Blocks the caller until all enqueued work (and its recorded
    // dependencies) has completed. Calling this from inside one of this
    // context's own tasks is detected and reported as a deadlock.
    void synchronize() const;

    // Internal: append a user task. The returned event completes when the
    // task and everything enqueued before it have finished. On a
    // globally-blocking context this drains all contexts, runs the task
    // inline, and returns only after it completed.
    detail::Event enqueue(std::string label, std::function<void()> fn) const;

    // Internal: make future tasks on this context start only after `dep`.
    void enqueue_wait(const detail::Event& dep, std::string label) const;

    // Internal: run a bookkeeping closure in queue order, exempt from delay
    // injection and census.
    void enqueue_bookkeeping(std::string label, std::function<void()> fn) const;

    // Internal: event capturing all work enqueued so far.
    detail::Event record_event() const;

private:
    std::shared_ptr<detail::ContextImpl> impl_;
};

// Block until every live context is idle.
void drain_all();

namespace detail {
// Shared globally-blocking context backing the synchronous API forms
// (expression assignment without Eval, MatMult without a context, ...).
const Context& global_sync_context();
} // namespace detail

} // namespace rivulet
