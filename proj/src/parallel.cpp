#include "rmstable/parallel.hpp"

#include <atomic>

namespace rms {

namespace {
std::atomic<int> g_threads{1};
}

void set_threads(int n) { g_threads = n < 1 ? 1 : n; }
int threads() { return g_threads; }

}  // namespace rms
