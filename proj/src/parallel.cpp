#include "ergograph/parallel.hpp"

#include <atomic>

namespace ergograph {

namespace {
std::atomic<unsigned> limit{1};
}

void set_thread_limit(unsigned n) { limit = std::max(1u, n); }
unsigned thread_limit() { return limit; }

}  // namespace ergograph
