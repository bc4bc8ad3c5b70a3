#include "rivulet/detail/dual_buffer.hpp"

#include "rivulet/runtime.hpp"

#include <algorithm>

namespace rivulet::detail {

DualBuffer::DualBuffer(std::size_t n, ObjectId owner) : owner_(owner), host_(n, 0.0)
{
    runtime::notify_buffer_alloc(owner_, n * sizeof(double));
}

DualBuffer::~DualBuffer()
{
    runtime::notify_buffer_free(owner_, host_.size() * sizeof(double));
}

std::span<const double> DualBuffer::migrate_for_read(bool device)
{
    std::lock_guard lock(mutex_);
    if (device) {
        if (location_ == Location::Host) {
            device_ = host_;
            runtime::log_h2d(host_.size() * sizeof(double));
            location_ = Location::Both;
        }
        return device_;
    }
    if (location_ == Location::Device) {
        std::copy(device_.begin(), device_.end(), host_.begin());
        runtime::log_d2h(host_.size() * sizeof(double));
        location_ = Location::Both;
    }
    return host_;
}

std::span<const double> DualBuffer::read(bool device) { return migrate_for_read(device); }

std::span<double> DualBuffer::write(bool device)
{
    std::lock_guard lock(mutex_);
    if (device) {
        device_.resize(host_.size());
        location_ = Location::Device;
        return device_;
    }
    location_ = Location::Host;
    return host_;
}

std::span<double> DualBuffer::read_write(bool device)
{
    migrate_for_read(device);
    std::lock_guard lock(mutex_);
    if (device) {
        location_ = Location::Device;
        return device_;
    }
    location_ = Location::Host;
    return host_;
}

void DualBuffer::evict_device()
{
    std::lock_guard lock(mutex_);
    if (location_ == Location::Device) {
        std::copy(device_.begin(), device_.end(), host_.begin());
        runtime::log_d2h(host_.size() * sizeof(double));
    }
    device_.clear();
    device_.shrink_to_fit();
    location_ = Location::Host;
}

Location DualBuffer::location() const
{
    std::lock_guard lock(mutex_);
    return location_;
}

} // namespace rivulet::detail
