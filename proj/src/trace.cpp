#include "rivulet/trace.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <vector>

namespace rivulet::trace {

namespace {

std::atomic<bool>        g_enabled{false};
std::mutex               g_mutex;
std::vector<TraceEvent>  g_events;

} // namespace

const char* to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::Task: return "task";
    case EventKind::Wait: return "wait";
    case EventKind::HostSync: return "host_sync";
    case EventKind::Marker: return "marker";
    }
    return "?";
}

void set_enabled(bool on) { g_enabled.store(on, std::memory_order_relaxed); }
bool enabled() { return g_enabled.load(std::memory_order_relaxed); }

void clear()
{
    std::lock_guard lock(g_mutex);
    g_events.clear();
}

std::int64_t now_ns()
{
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

void record(TraceEvent ev)
{
    if (!enabled()) return;
    std::lock_guard lock(g_mutex);
    g_events.push_back(std::move(ev));
}

void marker(const std::string& label)
{
    if (!enabled()) return;
    TraceEvent ev;
    ev.label      = label;
    ev.kind       = EventKind::Marker;
    ev.t_start_ns = ev.t_end_ns = now_ns();
    record(std::move(ev));
}

void host_sync(const std::string& api, ObjectId context_id, bool blocked,
               std::int64_t t_start_ns, std::int64_t t_end_ns)
{
    if (!enabled()) return;
    TraceEvent ev;
    ev.context_id = context_id;
    ev.label      = api;
    ev.kind       = EventKind::HostSync;
    ev.blocked    = blocked;
    ev.t_start_ns = t_start_ns;
    ev.t_end_ns   = t_end_ns;
    record(std::move(ev));
}

std::vector<TraceEvent> snapshot()
{
    std::lock_guard lock(g_mutex);
    return g_events;
}

void write_jsonl(const std::string& path)
{
    const auto    events = snapshot();
    std::ofstream out(path);
    if (!out) throw Error("trace: cannot open '" + path + "' for writing");
    for (const auto& ev : events) {
        nlohmann::json j{
            {"task", ev.task_id},
            {"enqueue_seq", ev.enqueue_seq},
            {"ctx", ev.context_id},
            {"ctx_name", ev.context_name},
            {"label", ev.label},
            {"kind", to_string(ev.kind)},
            {"blocked", ev.blocked},
            {"start", ev.t_start_ns},
            {"end", ev.t_end_ns},
        };
        out << j.dump() << '\n';
    }
}

} // namespace rivulet::trace
