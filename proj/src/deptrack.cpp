#include "rivulet/deptrack.hpp"

#include "rivulet/trace.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace rivulet::deptrack {

const char* to_string(MemoryAccessMode mode)
{
    switch (mode) {
    case MemoryAccessMode::Read: return "read";
    case MemoryAccessMode::Write: return "write";
    case MemoryAccessMode::ReadWrite: return "read_write";
    }
    return "?";
}

namespace {

constexpr std::size_t kAccessLogCapacity = 64;

bool is_pow2(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

// A completed (or host-window) access the tracker remembers.
struct Access {
    detail::Event    event;
    ObjectId         context = 0; // 0 = host access window
    std::uint64_t    bracket = 0;
    std::string      description;
    MemoryAccessMode mode = MemoryAccessMode::Read;
};

struct OpenBracket {
    MemoryAccessMode             mode = MemoryAccessMode::Read;
    std::string                  description;
    std::uint64_t                bracket = 0;
    std::optional<detail::Event> end_gate; // created lazily if someone must wait on us
};

struct Record {
    std::string                 name;
    std::optional<Access>       last_write;
    std::vector<Access>         readers; // since last_write
    std::deque<AccessLogEntry>  log;
};

struct Region {
    std::uintptr_t   start = 0;
    RegionAttributes attrs;
};

} // namespace

struct Tracker::Impl {
    mutable std::mutex mutex;

    std::unordered_map<ObjectId, Record> records;
    std::map<std::pair<ObjectId, ObjectId>, OpenBracket> open; // (ctx, obj) -> bracket
    std::map<std::uintptr_t, Region> regions;                  // keyed by start address
    std::vector<EdgeRecord> edges;
    std::uint64_t           bracket_seq = 0;
    std::uint64_t           edge_seq    = 0;

    Record& require_record(ObjectId id)
    {
        const auto it = records.find(id);
        if (it == records.end())
            throw Error("deptrack: unknown object id " + std::to_string(id));
        return it->second;
    }

    void log_access(Record& rec, MemoryAccessMode mode, const std::string& desc,
                    ObjectId ctx, std::uint64_t epoch)
    {
        if (rec.log.size() == kAccessLogCapacity) rec.log.pop_front();
        rec.log.push_back({mode, desc, ctx, epoch});
    }

    void add_edge(ObjectId object, const Context& waiter, std::uint64_t waiter_bracket,
                  const std::string& waiter_desc, MemoryAccessMode waiter_mode,
                  const Access& holder, const detail::Event& holder_event)
    {
        EdgeRecord edge;
        edge.seq            = ++edge_seq;
        edge.object         = object;
        edge.waiter_context = waiter.id();
        edge.waiter_bracket = waiter_bracket;
        edge.waiter_desc    = waiter_desc;
        edge.waiter_mode    = waiter_mode;
        edge.holder_context = holder.context;
        edge.holder_bracket = holder.bracket;
        edge.holder_desc    = holder.description;
        edge.holder_mode    = holder.mode;
        edges.push_back(std::move(edge));

        // Physical installation. Globally-blocking contexts need none (their
        // enqueue drains everything), and already-completed events order
        // themselves.
        if (waiter.stream_type() != StreamType::GloballyBlocking && !holder_event.completed())
            waiter.enqueue_wait(holder_event, "edge(" + holder.description + ")");
    }
};

Tracker::Tracker() : impl_(std::make_unique<Impl>()) {}
Tracker::~Tracker() = default;

ObjectId Tracker::register_object(std::string name)
{
    const auto id = next_object_id();
    std::lock_guard lock(impl_->mutex);
    auto& rec = impl_->records[id];
    rec.name  = name.empty() ? "obj" + std::to_string(id) : std::move(name);
    return id;
}

void Tracker::unregister_object(ObjectId id)
{
    std::lock_guard lock(impl_->mutex);
    impl_->records.erase(id);
}

RegionAttributes Tracker::register_memory(const void* ptr, RegionAttributes attrs)
{
    if (ptr == nullptr) throw Error("register_memory: null region");
    if (attrs.size == 0) throw Error("register_memory: size must be positive");
    if (!is_pow2(attrs.align)) throw Error("register_memory: align must be a power of two");

    const auto start = reinterpret_cast<std::uintptr_t>(ptr);
    const auto end   = start + attrs.size;

    std::lock_guard lock(impl_->mutex);

    // Exact re-registration returns the existing id; anything overlapping
    // short of that is rejected.
    const auto it = impl_->regions.find(start);
    if (it != impl_->regions.end()) {
        const auto& existing = it->second.attrs;
        if (existing.size != attrs.size || existing.align != attrs.align ||
            existing.mtype != attrs.mtype)
            throw Error("register_memory: attribute mismatch with existing registration of id " +
                        std::to_string(existing.id));
        attrs.id = existing.id;
        return attrs;
    }
    for (const auto& [rstart, region] : impl_->regions) {
        const auto rend = rstart + region.attrs.size;
        if (start < rend && rstart < end)
            throw Error("register_memory: region overlaps existing registration of id " +
                        std::to_string(region.attrs.id));
    }

    const auto id = next_object_id();
    attrs.id      = id;
    impl_->regions[start] = Region{start, attrs};

    std::ostringstream name;
    name << "region@0x" << std::hex << start;
    auto& rec = impl_->records[id];
    rec.name  = name.str();
    return attrs;
}

std::optional<RegionAttributes> Tracker::get_region_attributes(const void* ptr) const
{
    const auto addr = reinterpret_cast<std::uintptr_t>(ptr);
    std::lock_guard lock(impl_->mutex);
    auto it = impl_->regions.upper_bound(addr);
    if (it == impl_->regions.begin()) return std::nullopt;
    --it;
    const auto& region = it->second;
    if (addr < region.start + region.attrs.size) return region.attrs;
    return std::nullopt;
}

void Tracker::mark_begin(const Context& ctx, ObjectId id, MemoryAccessMode mode,
                         std::string description)
{
    std::lock_guard lock(impl_->mutex);
    auto& rec = impl_->require_record(id);

    const auto key = std::make_pair(ctx.id(), id);
    if (impl_->open.count(key))
        throw Error("mark_begin: unmatched begin already outstanding for object " +
                    std::to_string(id) + " on context " + std::to_string(ctx.id()));

    const auto bracket = ++impl_->bracket_seq;

    // Read waits on the last write; writes wait on the last write and on all
    // readers since. Accesses issued from this same context are already
    // ordered by its queue.
    if (rec.last_write && rec.last_write->context != ctx.id())
        impl_->add_edge(id, ctx, bracket, description, mode, *rec.last_write,
                        rec.last_write->event);
    if (writes(mode)) {
        for (const auto& reader : rec.readers)
            if (reader.context != ctx.id())
                impl_->add_edge(id, ctx, bracket, description, mode, reader, reader.event);
    }

    // Brackets still open on other contexts have no recorded event yet; give
    // them a gate that closes when they end.
    for (auto& [okey, ob] : impl_->open) {
        if (okey.second != id || okey.first == ctx.id()) continue;
        if (!conflicting(mode, ob.mode)) continue;
        if (!ob.end_gate) ob.end_gate = detail::Event::manual();
        Access holder;
        holder.event       = *ob.end_gate;
        holder.context     = okey.first;
        holder.bracket     = ob.bracket;
        holder.description = ob.description;
        holder.mode        = ob.mode;
        impl_->add_edge(id, ctx, bracket, description, mode, holder, *ob.end_gate);
    }

    impl_->open.emplace(key, OpenBracket{mode, std::move(description), bracket, std::nullopt});
}

detail::Event Tracker::mark_end(const Context& ctx, ObjectId id, MemoryAccessMode mode,
                                std::string description)
{
    std::lock_guard lock(impl_->mutex);
    auto& rec = impl_->require_record(id);

    const auto key = std::make_pair(ctx.id(), id);
    const auto it  = impl_->open.find(key);
    if (it == impl_->open.end())
        throw Error("mark_end: no matching begin for object " + std::to_string(id) +
                    " on context " + std::to_string(ctx.id()));
    if (it->second.mode != mode)
        throw Error(std::string("mark_end: mode ") + to_string(mode) +
                    " does not match begin mode " + to_string(it->second.mode));

    auto event = ctx.record_event();

    Access access;
    access.event       = event;
    access.context     = ctx.id();
    access.bracket     = it->second.bracket;
    access.description = std::move(description);
    access.mode        = mode;

    if (writes(mode)) {
        rec.last_write = access;
        rec.readers.clear();
    } else {
        // Drop settled readers while we are here; semantics are unchanged.
        rec.readers.erase(std::remove_if(rec.readers.begin(), rec.readers.end(),
                                         [](const Access& a) { return a.event.completed(); }),
                          rec.readers.end());
        rec.readers.push_back(access);
    }
    impl_->log_access(rec, mode, access.description, ctx.id(), event.sequence());

    if (it->second.end_gate) {
        auto gate = *it->second.end_gate;
        ctx.enqueue_bookkeeping("bracket_gate", [gate] { gate.complete(); });
    }
    impl_->open.erase(it);
    return event;
}

bool Tracker::await_host(ObjectId id, MemoryAccessMode mode, const char* api)
{
    std::vector<detail::Event> pending;
    {
        std::lock_guard lock(impl_->mutex);
        auto& rec = impl_->require_record(id);
        if (rec.last_write && !rec.last_write->event.completed())
            pending.push_back(rec.last_write->event);
        if (writes(mode)) {
            for (const auto& reader : rec.readers)
                if (!reader.event.completed()) pending.push_back(reader.event);
        }
    }
    if (pending.empty()) return false;

    const auto t0 = trace::now_ns();
    for (const auto& ev : pending) ev.wait();
    trace::host_sync(api, 0, true, t0, trace::now_ns());
    return true;
}

ViewTicket Tracker::host_view_begin(ObjectId id, MemoryAccessMode mode, std::string description)
{
    // Re-check after waiting: another issuing thread may have filed new
    // conflicting work in between.
    while (await_host(id, mode, "get_array")) {}

    std::lock_guard lock(impl_->mutex);
    auto& rec = impl_->require_record(id);

    ViewTicket ticket;
    ticket.object = id;
    ticket.gate   = detail::Event::manual();

    Access access;
    access.event       = ticket.gate;
    access.context     = 0; // host
    access.bracket     = ++impl_->bracket_seq;
    access.description = description;
    access.mode        = mode;

    if (writes(mode)) {
        rec.last_write = access;
        rec.readers.clear();
    } else {
        rec.readers.push_back(access);
    }
    impl_->log_access(rec, mode, description, 0, 0);
    return ticket;
}

void Tracker::host_view_end(ViewTicket& ticket)
{
    if (ticket.gate.valid()) ticket.gate.complete();
    ticket = ViewTicket{};
}

std::vector<EdgeRecord> Tracker::edges() const
{
    std::lock_guard lock(impl_->mutex);
    return impl_->edges;
}

void Tracker::clear_edges()
{
    std::lock_guard lock(impl_->mutex);
    impl_->edges.clear();
}

std::string Tracker::dump_json() const
{
    std::lock_guard lock(impl_->mutex);
    nlohmann::json  objects = nlohmann::json::array();
    for (const auto& [id, rec] : impl_->records) {
        nlohmann::json log = nlohmann::json::array();
        for (const auto& entry : rec.log) {
            log.push_back({{"mode", to_string(entry.mode)},
                           {"description", entry.description},
                           {"ctx", entry.context},
                           {"epoch", entry.epoch}});
        }
        objects.push_back({{"id", id}, {"name", rec.name}, {"accesses", std::move(log)}});
    }
    return nlohmann::json{{"objects", std::move(objects)}}.dump(2);
}

std::vector<AccessLogEntry> Tracker::access_log(ObjectId id) const
{
    std::lock_guard lock(impl_->mutex);
    const auto      it = impl_->records.find(id);
    if (it == impl_->records.end()) return {};
    return {it->second.log.begin(), it->second.log.end()};
}

std::optional<detail::Event> Tracker::last_write_event(ObjectId id) const
{
    std::lock_guard lock(impl_->mutex);
    const auto      it = impl_->records.find(id);
    if (it == impl_->records.end() || !it->second.last_write) return std::nullopt;
    return it->second.last_write->event;
}

std::size_t Tracker::reader_count(ObjectId id) const
{
    std::lock_guard lock(impl_->mutex);
    const auto      it = impl_->records.find(id);
    return it == impl_->records.end() ? 0 : it->second.readers.size();
}

void Tracker::reset()
{
    std::lock_guard lock(impl_->mutex);
    impl_->records.clear();
    impl_->open.clear();
    impl_->regions.clear();
    impl_->edges.clear();
    impl_->bracket_seq = 0;
    impl_->edge_seq    = 0;
}

Tracker& tracker()
{
    static Tracker t;
    return t;
}

} // namespace rivulet::deptrack
