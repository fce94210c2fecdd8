#pragma once

#include <atomic>
#include <map>
#include <string>

namespace kinuq::log {

// Warnings go to stderr (unless silenced) and are counted so that run
// manifests can report how often a tolerance was triggered.
void warn(const std::string& tag, const std::string& message);

std::size_t warning_count(const std::string& tag);
std::map<std::string, std::size_t> warning_counts();
void reset_counts();
void set_quiet(bool quiet);

}  // namespace kinuq::log
