#include "rivulet/runtime.hpp"

#include "rivulet/deptrack.hpp"
#include "rivulet/trace.hpp"

#include <atomic>
#include <chrono>
#include <mutex>
#include <random>
#include <thread>

namespace rivulet::runtime {

namespace {

std::mutex  g_delay_mutex;
DelayPolicy g_delay;

std::atomic<std::uint64_t> g_h2d{0}, g_d2h{0}, g_h2d_bytes{0}, g_d2h_bytes{0};

std::atomic<std::uint64_t> g_kernels[static_cast<int>(KernelKind::kCount)];
std::atomic<std::uint64_t> g_flops[static_cast<int>(KernelKind::kCount)];

std::mutex  g_hooks_mutex;
BufferHooks g_hooks;

std::atomic<std::uint64_t> g_unsafe_host_reads{0};

} // namespace

void set_task_delay(DelayPolicy policy)
{
    std::lock_guard lock(g_delay_mutex);
    g_delay = policy;
}

DelayPolicy task_delay()
{
    std::lock_guard lock(g_delay_mutex);
    return g_delay;
}

void apply_task_delay()
{
    const auto policy = task_delay();
    std::uint64_t us  = 0;
    switch (policy.mode) {
    case DelayPolicy::Mode::None: return;
    case DelayPolicy::Mode::Fixed: us = policy.lo_us; break;
    case DelayPolicy::Mode::Uniform: {
        thread_local std::mt19937_64 rng(policy.seed ^
                                         std::hash<std::thread::id>{}(std::this_thread::get_id()));
        std::uniform_int_distribution<std::uint64_t> dist(policy.lo_us, policy.hi_us);
        us = dist(rng);
        break;
    }
    }
    if (us > 0) std::this_thread::sleep_for(std::chrono::microseconds(us));
}

CopyCounts copy_counts()
{
    return {g_h2d.load(), g_d2h.load(), g_h2d_bytes.load(), g_d2h_bytes.load()};
}

void log_h2d(std::uint64_t bytes)
{
    g_h2d.fetch_add(1, std::memory_order_relaxed);
    g_h2d_bytes.fetch_add(bytes, std::memory_order_relaxed);
}

void log_d2h(std::uint64_t bytes)
{
    g_d2h.fetch_add(1, std::memory_order_relaxed);
    g_d2h_bytes.fetch_add(bytes, std::memory_order_relaxed);
}

const char* to_string(KernelKind kind)
{
    switch (kind) {
    case KernelKind::MatMult: return "matmult";
    case KernelKind::Dot: return "dot";
    case KernelKind::Norm: return "norm";
    case KernelKind::Axpy: return "axpy";
    case KernelKind::Aypx: return "aypx";
    case KernelKind::Waxpy: return "waxpy";
    case KernelKind::Scale: return "scale";
    case KernelKind::Copy: return "copy";
    case KernelKind::ExprEval: return "expr";
    case KernelKind::PcApply: return "pc_apply";
    case KernelKind::kCount: break;
    }
    return "?";
}

std::uint64_t Census::total_flops() const
{
    std::uint64_t total = 0;
    for (auto f : flops) total += f;
    return total;
}

std::uint64_t Census::reductions() const
{
    return kernels_of(KernelKind::Dot) + kernels_of(KernelKind::Norm);
}

Census Census::operator-(const Census& rhs) const
{
    Census out;
    for (std::size_t i = 0; i < kernels.size(); ++i) {
        out.kernels[i] = kernels[i] - rhs.kernels[i];
        out.flops[i]   = flops[i] - rhs.flops[i];
    }
    return out;
}

Census census()
{
    Census out;
    for (std::size_t i = 0; i < out.kernels.size(); ++i) {
        out.kernels[i] = g_kernels[i].load(std::memory_order_relaxed);
        out.flops[i]   = g_flops[i].load(std::memory_order_relaxed);
    }
    return out;
}

void log_kernel(KernelKind kind, std::uint64_t flops, std::uint64_t kernel_count)
{
    g_kernels[static_cast<int>(kind)].fetch_add(kernel_count, std::memory_order_relaxed);
    g_flops[static_cast<int>(kind)].fetch_add(flops, std::memory_order_relaxed);
}

void set_buffer_hooks(BufferHooks hooks)
{
    std::lock_guard lock(g_hooks_mutex);
    g_hooks = std::move(hooks);
}

void notify_buffer_alloc(ObjectId owner, std::uint64_t bytes)
{
    std::function<void(ObjectId, std::uint64_t)> fn;
    {
        std::lock_guard lock(g_hooks_mutex);
        fn = g_hooks.on_alloc;
    }
    if (fn) fn(owner, bytes);
}

void notify_buffer_free(ObjectId owner, std::uint64_t bytes)
{
    std::function<void(ObjectId, std::uint64_t)> fn;
    {
        std::lock_guard lock(g_hooks_mutex);
        fn = g_hooks.on_free;
    }
    if (fn) fn(owner, bytes);
}

std::uint64_t unsafe_host_reads() { return g_unsafe_host_reads.load(); }
void          note_unsafe_host_read() { g_unsafe_host_reads.fetch_add(1); }

void reset_all()
{
    set_task_delay(DelayPolicy::none());
    g_h2d = g_d2h = g_h2d_bytes = g_d2h_bytes = 0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(KernelKind::kCount); ++i) {
        g_kernels[i] = 0;
        g_flops[i]   = 0;
    }
    g_unsafe_host_reads = 0;
    trace::clear();
    deptrack::tracker().reset();
}

} // namespace rivulet::runtime
