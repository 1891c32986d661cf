#pragma once
// Minimal stderr tracing, gated by the CHANNELMESH_LOG environment
// variable: unset = quiet, "info" = progress lines, "debug" = chatty.

#include <cstdlib>
#include <iostream>
#include <string>

namespace channelmesh {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* raw = std::getenv("CHANNELMESH_LOG");
    if (raw == nullptr) return LogLevel::Quiet;
    const std::string value(raw);
    if (value == "debug") return LogLevel::Debug;
    if (value == "info") return LogLevel::Info;
    return LogLevel::Quiet;
  }();
  return level;
}

inline void log_info(const std::string& message) {
  if (log_level() >= LogLevel::Info) {
    std::cerr << "[channelmesh] " << message << '\n';
  }
}

inline void log_debug(const std::string& message) {
  if (log_level() >= LogLevel::Debug) {
    std::cerr << "[channelmesh:debug] " << message << '\n';
  }
}

}  // namespace channelmesh
