#pragma once

#include "rivulet/context.hpp"
#include "rivulet/deptrack.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace rivulet::detail {

// Brackets one kernel launch with the marking calls its operands require:
// begin marks (installing serialization edges), enqueue, end marks (recording
// the completion event). An object appearing as both input and output is
// marked once with the merged read-write intent.
class KernelLaunch {
public:
    KernelLaunch(Context ctx, std::string label)
        : ctx_(std::move(ctx)), label_(std::move(label)) {}

    KernelLaunch& read(ObjectId id) { return access(id, deptrack::MemoryAccessMode::Read); }
    KernelLaunch& write(ObjectId id) { return access(id, deptrack::MemoryAccessMode::Write); }
    KernelLaunch& read_write(ObjectId id)
    {
        return access(id, deptrack::MemoryAccessMode::ReadWrite);
    }

    KernelLaunch& access(ObjectId id, deptrack::MemoryAccessMode mode);

    // The kernel computes on the simulated-device side iff the context is
    // asynchronous.
    bool device_side() const { return ctx_.stream_type() == StreamType::DefaultBlocking; }

    const Context& context() const { return ctx_; }

    Event enqueue(std::function<void()> fn);

private:
    Context     ctx_;
    std::string label_;
    std::vector<std::pair<ObjectId, deptrack::MemoryAccessMode>> accesses_;
};

} // namespace rivulet::detail
