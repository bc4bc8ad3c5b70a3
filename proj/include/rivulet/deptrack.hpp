#pragma once

#include "rivulet/common.hpp"
#include "rivulet/context.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rivulet::deptrack {

enum class MemoryAccessMode { Read, Write, ReadWrite };

const char* to_string(MemoryAccessMode mode);

// ReadWrite both conflicts with and invalidates readers, so it orders like a
// write.
inline bool writes(MemoryAccessMode mode) { return mode != MemoryAccessMode::Read; }

inline bool conflicting(MemoryAccessMode a, MemoryAccessMode b)
{
    return writes(a) || writes(b);
}

enum class MemType { Host, SimDevice };

struct RegionAttributes {
    MemType     mtype = MemType::Host;
    ObjectId    id    = kUnknownId; // filled in by register_memory
    std::size_t size  = 0;          // bytes
    std::size_t align = alignof(std::max_align_t);
};

// One serialization edge the tracker installed: the waiter's bracketed work
// may not begin before the holder's bracketed work has completed.
struct EdgeRecord {
    std::uint64_t    seq = 0;
    ObjectId         object = kUnknownId;
    ObjectId         waiter_context = 0;
    std::uint64_t    waiter_bracket = 0;
    std::string      waiter_desc;
    MemoryAccessMode waiter_mode = MemoryAccessMode::Read;
    ObjectId         holder_context = 0; // 0 = host-side access window
    std::uint64_t    holder_bracket = 0;
    std::string      holder_desc;
    MemoryAccessMode holder_mode = MemoryAccessMode::Read;
};

struct AccessLogEntry {
    MemoryAccessMode mode = MemoryAccessMode::Read;
    std::string      description;
    ObjectId         context = 0;
    std::uint64_t    epoch   = 0;
};

// Host-side access window on a registered object (see host_view_begin).
struct ViewTicket {
    ObjectId      object = kUnknownId;
    detail::Event gate;
};

class Tracker {
public:
    Tracker();
    ~Tracker();

    Tracker(const Tracker&)            = delete;
    Tracker& operator=(const Tracker&) = delete;

    // ---- object ids -------------------------------------------------------

    ObjectId register_object(std::string name);
    void     unregister_object(ObjectId id);

    // ---- raw memory regions ----------------------------------------------

    // Assigns (or returns the previously assigned) id for the region starting
    // at `ptr`. Registering the identical region again is idempotent; a
    // region that overlaps an existing one without matching it exactly, or a
    // re-registration with different size/align/mtype, is an error.
    RegionAttributes register_memory(const void* ptr, RegionAttributes attrs);

    // Attributes of the registered region containing `ptr`, if any. Never
    // blocks.
    std::optional<RegionAttributes> get_region_attributes(const void* ptr) const;

    // ---- marking ----------------------------------------------------------

    // Declare that work about to be enqueued on `ctx` accesses `id` with
    // `mode`. Installs the serialization edges required by strong
    // write-ordering: a read waits on the last write from another context; a
    // write waits on the last write and on all reads-since from other
    // contexts. Read-after-read installs nothing, and same-context accesses
    // need no edges (stream order covers them).
    void mark_begin(const Context& ctx, ObjectId id, MemoryAccessMode mode,
                    std::string description);

    // Close the bracket: records an event covering everything enqueued on
    // `ctx` up to this point and files it as the new last write (write modes)
    // or as an additional reader.
    detail::Event mark_end(const Context& ctx, ObjectId id, MemoryAccessMode mode,
                           std::string description);

    // ---- host-side access -------------------------------------------------

    // Block the calling (host) thread until the events a `mode` access must
    // respect have completed. Returns true if it actually had to wait.
    bool await_host(ObjectId id, MemoryAccessMode mode, const char* api);

    // await_host plus registration of a host access window: until the ticket
    // is closed, conflicting work from any context serializes behind it.
    ViewTicket host_view_begin(ObjectId id, MemoryAccessMode mode, std::string description);
    void       host_view_end(ViewTicket& ticket);

    // ---- introspection ----------------------------------------------------

    std::vector<EdgeRecord> edges() const;
    void                    clear_edges();

    // Most recent accesses per id (bounded ring), as JSON text.
    std::string dump_json() const;

    std::vector<AccessLogEntry> access_log(ObjectId id) const;

    // Event recorded by the last write-mode bracket on `id`, if any.
    std::optional<detail::Event> last_write_event(ObjectId id) const;
    std::size_t                  reader_count(ObjectId id) const;

    // Drops all state. Callers drain contexts first.
    void reset();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

Tracker& tracker();

// Convenience forms taking any object exposing id() (vectors, matrices,
// managed values).
template <typename Object>
void mark_begin(const Context& ctx, const Object& object, MemoryAccessMode mode,
                std::string description)
{
    tracker().mark_begin(ctx, object.id(), mode, std::move(description));
}

template <typename Object>
detail::Event mark_end(const Context& ctx, const Object& object, MemoryAccessMode mode,
                       std::string description)
{
    return tracker().mark_end(ctx, object.id(), mode, std::move(description));
}

} // namespace rivulet::deptrack
