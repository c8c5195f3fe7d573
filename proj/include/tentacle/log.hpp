#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace tentacle::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Threshold comes from the TENTACLE_LOG environment variable
// (error|warn|info|debug); unset means warnings and errors only.
inline Level threshold() {
  static const Level cached = [] {
    const char* env = std::getenv("TENTACLE_LOG");
    if (env == nullptr) return Level::warn;
    if (std::strcmp(env, "error") == 0) return Level::error;
    if (std::strcmp(env, "info") == 0) return Level::info;
    if (std::strcmp(env, "debug") == 0) return Level::debug;
    return Level::warn;
  }();
  return cached;
}

template <typename... Args>
inline void emit(Level lvl, const char* fmt, Args... args) {
  if (static_cast<int>(lvl) > static_cast<int>(threshold())) return;
  static const char* names[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "[tentacle:%s] ", names[static_cast<int>(lvl)]);
  std::fprintf(stderr, fmt, args...);
  std::fprintf(stderr, "\n");
}

inline void emit(Level lvl, const char* msg) { emit(lvl, "%s", msg); }

}  // namespace tentacle::log
