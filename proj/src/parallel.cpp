#include "crunch/parallel.hpp"

#include <atomic>

namespace crunch {
namespace {
std::atomic<unsigned> g_thread_cap{0};
}

unsigned thread_cap() noexcept { return g_thread_cap.load(); }

void set_thread_cap(unsigned n) noexcept { g_thread_cap.store(n); }

}  // namespace crunch
