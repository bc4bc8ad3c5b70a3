#pragma once

#include "rivulet/common.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>

namespace rivulet::runtime {

// ---------------------------------------------------------------------------
// Simulated launch latency / schedule-jitter injection.
//
// The delay is applied on the executing thread immediately before each user
// task runs (internal serialization waits are exempt). Benchmarks use a fixed
// delay to stand in for kernel-launch latency; property tests use the uniform
// mode to shake out ordering bugs.
// ---------------------------------------------------------------------------

struct DelayPolicy {
    enum class Mode { None, Fixed, Uniform };

    Mode          mode   = Mode::None;
    std::uint64_t lo_us  = 0;
    std::uint64_t hi_us  = 0;
    std::uint64_t seed   = 0;

    static DelayPolicy none() { return {}; }
    static DelayPolicy fixed(std::uint64_t us)
    {
        return {Mode::Fixed, us, us, 0};
    }
    static DelayPolicy uniform(std::uint64_t lo_us, std::uint64_t hi_us, std::uint64_t seed)
    {
        return {Mode::Uniform, lo_us, hi_us, seed};
    }
};

void        set_task_delay(DelayPolicy policy);
DelayPolicy task_delay();
void        apply_task_delay(); // called by the scheduler; sleeps per policy

// ---------------------------------------------------------------------------
// Host <-> simulated-device copy accounting. Exact integer counters, bumped
// at the moment a migration is performed.
// ---------------------------------------------------------------------------

struct CopyCounts {
    std::uint64_t h2d       = 0;
    std::uint64_t d2h       = 0;
    std::uint64_t h2d_bytes = 0;
    std::uint64_t d2h_bytes = 0;
};

CopyCounts copy_counts();
void       log_h2d(std::uint64_t bytes);
void       log_d2h(std::uint64_t bytes);

// ---------------------------------------------------------------------------
// Kernel census. Counters are bumped on the issuing thread when an operation
// is enqueued, so per-iteration attribution is exact and deterministic even
// while the kernels themselves are still in flight.
// ---------------------------------------------------------------------------

enum class KernelKind : int {
    MatMult = 0,
    Dot,
    Norm,
    Axpy,
    Aypx,
    Waxpy,
    Scale,
    Copy,
    ExprEval,
    PcApply,
    kCount
};

const char* to_string(KernelKind kind);

struct Census {
    std::array<std::uint64_t, static_cast<int>(KernelKind::kCount)> kernels{};
    std::array<std::uint64_t, static_cast<int>(KernelKind::kCount)> flops{};

    std::uint64_t kernels_of(KernelKind k) const { return kernels[static_cast<int>(k)]; }
    std::uint64_t flops_of(KernelKind k) const { return flops[static_cast<int>(k)]; }
    std::uint64_t total_flops() const;
    std::uint64_t reductions() const; // Dot + Norm kernel count

    Census operator-(const Census& rhs) const;
};

Census census();
// kernel_count 0 attributes flops without counting a kernel launch (used for
// scalar preludes fused into another kernel).
void log_kernel(KernelKind kind, std::uint64_t flops, std::uint64_t kernel_count = 1);

// ---------------------------------------------------------------------------
// Buffer lifetime hooks, used by tests to observe when backing storage of
// managed values / vectors is allocated and released.
// ---------------------------------------------------------------------------

struct BufferHooks {
    std::function<void(ObjectId owner, std::uint64_t bytes)> on_alloc;
    std::function<void(ObjectId owner, std::uint64_t bytes)> on_free;
};

void set_buffer_hooks(BufferHooks hooks);
void notify_buffer_alloc(ObjectId owner, std::uint64_t bytes);
void notify_buffer_free(ObjectId owner, std::uint64_t bytes);

// Counts host-side reads of a managed value's storage that happened while the
// value was still pending. The public API keeps this at zero by construction;
// property tests assert it.
std::uint64_t unsafe_host_reads();
void          note_unsafe_host_read();

// Reset all of the above plus trace and the dependency tracker. Contexts are
// not touched; callers drain them first.
void reset_all();

} // namespace rivulet::runtime
