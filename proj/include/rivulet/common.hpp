#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rivulet {

using Real   = double;
using Scalar = double; // real-only build

// Every trackable entity (context, vector, matrix, managed value, raw
// memory region) draws its id from one global counter, so ids are unique
// across kinds.
using ObjectId = std::uint64_t;

inline constexpr ObjectId kUnknownId = 0;

ObjectId next_object_id();

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Host would block forever (e.g. synchronizing a context from inside one of
// its own tasks).
class DeadlockError : public Error {
public:
    using Error::Error;
};

// Krylov solver hit a zero or non-finite scalar recurrence.
class BreakdownError : public Error {
public:
    BreakdownError(const std::string& what, int iteration)
        : Error(what), iteration_(iteration) {}

    int iteration() const { return iteration_; }

private:
    int iteration_;
};

} // namespace rivulet
