#include "wassval/core/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace wassval {

namespace {

LogLevel threshold_from_env() {
  const char* env = std::getenv("WASSVAL_LOG");
  if (env == nullptr) return LogLevel::Warn;
  if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
  if (std::strcmp(env, "info") == 0) return LogLevel::Info;
  if (std::strcmp(env, "warn") == 0) return LogLevel::Warn;
  if (std::strcmp(env, "error") == 0) return LogLevel::Error;
  return LogLevel::Warn;
}

LogLevel threshold() {
  static const LogLevel t = threshold_from_env();
  return t;
}

const char* tag(LogLevel level) {
  switch (level) {
    case LogLevel::Debug: return "debug";
    case LogLevel::Info: return "info";
    case LogLevel::Warn: return "warn";
    case LogLevel::Error: return "error";
  }
  return "?";
}

std::mutex& io_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

bool log_enabled(LogLevel level) { return level >= threshold(); }

void log_message(LogLevel level, std::string_view msg) {
  if (!log_enabled(level)) return;
  std::lock_guard<std::mutex> lock(io_mutex());
  std::fprintf(stderr, "[wassval %s] %.*s\n", tag(level),
               static_cast<int>(msg.size()), msg.data());
}

}  // namespace wassval
