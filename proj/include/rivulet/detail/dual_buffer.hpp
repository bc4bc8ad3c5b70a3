#pragma once

#include "rivulet/common.hpp"

#include <mutex>
#include <span>
#include <vector>

namespace rivulet::detail {

enum class Location { Host, Device, Both };

// Mirrored host / simulated-device array. Kernels running on a
// default-blocking context touch the device side, synchronous paths the host
// side; migrations are performed on first use and logged against the global
// copy counters. The internal mutex only guards residency metadata —
// conflicting data accesses are excluded by the dependency tracker.
class DualBuffer {
public:
    DualBuffer(std::size_t n, ObjectId owner);
    ~DualBuffer();

    DualBuffer(const DualBuffer&)            = delete;
    DualBuffer& operator=(const DualBuffer&) = delete;

    std::size_t size() const { return host_.size(); }
    ObjectId    owner() const { return owner_; }

    std::span<const double> read(bool device);
    std::span<double>       write(bool device); // full overwrite: no migration
    std::span<double>       read_write(bool device);

    // Drop the device mirror (copying back first if it is the only valid
    // copy). Used by benchmark pre-solve to reset residency between reps.
    void evict_device();

    Location location() const;

private:
    std::span<const double> migrate_for_read(bool device);

    ObjectId            owner_;
    mutable std::mutex  mutex_;
    std::vector<double> host_;
    std::vector<double> device_;
    Location            location_ = Location::Host;
};

} // namespace rivulet::detail
