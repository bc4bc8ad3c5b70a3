#pragma once

#include "rivulet/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rivulet::trace {

enum class EventKind {
    Task,     // user kernel executed on a context
    Wait,     // internal serialization wait executed on a context
    HostSync, // host thread blocked (or would consult) on device progress
    Marker    // user-inserted annotation, zero duration
};

const char* to_string(EventKind kind);

struct TraceEvent {
    std::uint64_t task_id    = 0; // global id of the task (0 for host events)
    std::uint64_t enqueue_seq = 0; // global enqueue order (0 for host events)
    ObjectId      context_id = 0;
    std::string   context_name;
    std::string   label;
    EventKind     kind = EventKind::Task;
    bool          blocked = false; // HostSync only: whether the wait actually blocked
    std::int64_t  t_start_ns = 0;
    std::int64_t  t_end_ns   = 0;
};

void set_enabled(bool on);
bool enabled();
void clear();

std::int64_t now_ns();

void record(TraceEvent ev);
void marker(const std::string& label);
void host_sync(const std::string& api, ObjectId context_id, bool blocked,
               std::int64_t t_start_ns, std::int64_t t_end_ns);

std::vector<TraceEvent> snapshot();

// One JSON object per line: {"task":..,"ctx":..,"start":..,"end":..,...}
void write_jsonl(const std::string& path);

} // namespace rivulet::trace
