#pragma once

#include "rivulet/common.hpp"
#include "rivulet/deptrack.hpp"
#include "rivulet/detail/dual_buffer.hpp"

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace rivulet {

namespace detail {

struct VecState {
    VecState(std::size_t n, std::string name_in)
        : id(deptrack::tracker().register_object(name_in.empty() ? "vec" : name_in)),
          name(std::move(name_in)),
          buffer(n, id)
    {
    }

    ~VecState() { deptrack::tracker().unregister_object(id); }

    ObjectId    id;
    std::string name;
    DualBuffer  buffer;

    std::mutex view_mutex;
    int        read_views = 0;
    bool       write_view = false;
};

} // namespace detail

class DenseVector;

// RAII host views. Acquisition consults the dependency tracker and blocks
// until conflicting device work has finished; while the view is open,
// conflicting work from any context serializes behind it. Destruction (or
// restore) ends the access window.
class ArrayRead {
public:
    ArrayRead(ArrayRead&&) noexcept;
    ArrayRead& operator=(ArrayRead&&) noexcept;
    ~ArrayRead();

    std::span<const double> span() const { return span_; }
    double operator[](std::size_t i) const { return span_[i]; }
    std::size_t size() const { return span_.size(); }

    void restore();

private:
    friend class DenseVector;
    ArrayRead(std::shared_ptr<detail::VecState> state, deptrack::ViewTicket ticket,
              std::span<const double> span);

    std::shared_ptr<detail::VecState> state_;
    deptrack::ViewTicket              ticket_;
    std::span<const double>           span_;
};

class ArrayWrite {
public:
    ArrayWrite(ArrayWrite&&) noexcept;
    ArrayWrite& operator=(ArrayWrite&&) noexcept;
    ~ArrayWrite();

    std::span<double> span() const { return span_; }
    double& operator[](std::size_t i) const { return span_[i]; }
    std::size_t size() const { return span_.size(); }

    void restore();

private:
    friend class DenseVector;
    ArrayWrite(std::shared_ptr<detail::VecState> state, deptrack::ViewTicket ticket,
               std::span<double> span, bool read_write);

    std::shared_ptr<detail::VecState> state_;
    deptrack::ViewTicket              ticket_;
    std::span<double>                 span_;
};

// Dense vector with mirrored host/simulated-device storage. Handles are
// shared references to one vector (copying a handle does not copy data).
class DenseVector {
public:
    DenseVector() : DenseVector(0) {}
    explicit DenseVector(std::size_t n, std::string name = "");
    DenseVector(std::span<const double> values, std::string name = "");

    std::size_t        size() const { return state_->buffer.size(); }
    ObjectId           id() const { return state_->id; }
    const std::string& name() const { return state_->name; }

    bool device_resident() const
    {
        return state_->buffer.location() != detail::Location::Host;
    }

    // Accessors with implicit synchronization (see class comment on views).
    ArrayRead  array_read() const;
    ArrayWrite array_write();      // contents treated as overwritten
    ArrayWrite array_read_write();

    std::vector<double> to_host() const;

    // Drop the device mirror; benchmark pre-solve housekeeping.
    void evict_device() { state_->buffer.evict_device(); }

    const std::shared_ptr<detail::VecState>& state() const { return state_; }

private:
    std::shared_ptr<detail::VecState> state_;
};

} // namespace rivulet
