#include "rivulet/common.hpp"

#include <atomic>

namespace rivulet {

ObjectId next_object_id()
{
    static std::atomic<ObjectId> counter{kUnknownId};
    return ++counter;
}

} // namespace rivulet
