#include "contagion/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace contagion {

namespace {
std::atomic<bool> g_enabled{true};
std::mutex g_mutex;
}  // namespace

void log_warning(std::string_view msg) {
  if (!g_enabled.load(std::memory_order_relaxed)) return;
  std::lock_guard lock(g_mutex);
  std::cerr << "contagion: warning: " << msg << '\n';
}

void set_warnings_enabled(bool enabled) { g_enabled.store(enabled, std::memory_order_relaxed); }

}  // namespace contagion
