#pragma once

#include "rivulet/common.hpp"
#include "rivulet/context.hpp"
#include "rivulet/deptrack.hpp"
#include "rivulet/detail/dual_buffer.hpp"

#include <optional>
#include <string>

namespace rivulet::detail {

// Shared backing of a managed value. Kernel closures hold a reference, which
// is what keeps the storage alive until the owning stream has gone idle even
// when the user-facing handle is long gone.
struct ManagedState {
    explicit ManagedState(std::size_t n, std::string name)
        : id(deptrack::tracker().register_object(name.empty() ? "managed" : name)),
          name(std::move(name)),
          buffer(n, id)
    {
    }

    ~ManagedState() { deptrack::tracker().unregister_object(id); }

    ManagedState(const ManagedState&)            = delete;
    ManagedState& operator=(const ManagedState&) = delete;

    ObjectId    id;
    std::string name;
    DualBuffer  buffer;

    // Set while the last write to this value is still in flight.
    std::optional<Event> pending;
    ObjectId             pending_context = 0;
};

} // namespace rivulet::detail
