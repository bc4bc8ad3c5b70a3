#include "rivulet/detail/launch.hpp"

namespace rivulet::detail {

namespace {

using deptrack::MemoryAccessMode;

MemoryAccessMode merge(MemoryAccessMode a, MemoryAccessMode b)
{
    if (a == b) return a;
    return MemoryAccessMode::ReadWrite;
}

} // namespace

KernelLaunch& KernelLaunch::access(ObjectId id, MemoryAccessMode mode)
{
    for (auto& [existing_id, existing_mode] : accesses_) {
        if (existing_id == id) {
            existing_mode = merge(existing_mode, mode);
            return *this;
        }
    }
    accesses_.emplace_back(id, mode);
    return *this;
}

Event KernelLaunch::enqueue(std::function<void()> fn)
{
    auto& tracker = deptrack::tracker();
    for (const auto& [id, mode] : accesses_) tracker.mark_begin(ctx_, id, mode, label_);
    auto event = ctx_.enqueue(label_, std::move(fn));
    for (auto it = accesses_.rbegin(); it != accesses_.rend(); ++it)
        tracker.mark_end(ctx_, it->first, it->second, label_);
    return event;
}

} // namespace rivulet::detail
