#include "kinuq/log.hpp"

#include <iostream>
#include <map>
#include <mutex>

namespace kinuq::log {
namespace {

std::mutex g_mutex;
std::map<std::string, std::size_t> g_counts;
bool g_quiet = false;

}  // namespace

void warn(const std::string& tag, const std::string& message) {
  std::lock_guard lock(g_mutex);
  const std::size_t n = ++g_counts[tag];
  // Repeated warnings of one kind are throttled; the count keeps growing.
  if (!g_quiet && (n <= 5 || (n & (n - 1)) == 0)) {
    std::cerr << "[kinuq warn] " << tag << " (#" << n << "): " << message << '\n';
  }
}

std::size_t warning_count(const std::string& tag) {
  std::lock_guard lock(g_mutex);
  auto it = g_counts.find(tag);
  return it == g_counts.end() ? 0 : it->second;
}

std::map<std::string, std::size_t> warning_counts() {
  std::lock_guard lock(g_mutex);
  return g_counts;
}

void reset_counts() {
  std::lock_guard lock(g_mutex);
  g_counts.clear();
}

void set_quiet(bool quiet) {
  std::lock_guard lock(g_mutex);
  g_quiet = quiet;
}

}  // namespace kinuq::log
