#pragma once

#include <string_view>

namespace wassval {

// Minimal stderr logger. Level comes from the WASSVAL_LOG environment
// variable (debug|info|warn|error), read once; default is warn.
enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3 };

bool log_enabled(LogLevel level);
void log_message(LogLevel level, std::string_view msg);

inline void log_debug(std::string_view msg) { log_message(LogLevel::Debug, msg); }
inline void log_info(std::string_view msg) { log_message(LogLevel::Info, msg); }
inline void log_warn(std::string_view msg) { log_message(LogLevel::Warn, msg); }
inline void log_error(std::string_view msg) { log_message(LogLevel::Error, msg); }

}  // namespace wassval
