#include "mmdp/core/parallel.hpp"

#include <atomic>

namespace mmdp {
namespace {
std::atomic<unsigned> g_thread_limit{1};
}

void set_thread_limit(unsigned limit) { g_thread_limit.store(limit == 0 ? 1 : limit); }

unsigned thread_limit() { return g_thread_limit.load(); }

}  // namespace mmdp
