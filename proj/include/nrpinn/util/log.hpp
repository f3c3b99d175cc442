#pragma once

#include <fmt/format.h>

#include <string_view>

namespace nrpinn::util {

enum class LogLevel { quiet = 0, warn = 1, info = 2 };

void set_log_level(LogLevel level);
[[nodiscard]] LogLevel log_level();

/// Writes one line to stderr when `level` is enabled. Thread-safe.
void log_line(LogLevel level, std::string_view text);

template <typename... Args>
void warn(fmt::format_string<Args...> f, Args &&...args) {
    if (log_level() >= LogLevel::warn) {
        log_line(LogLevel::warn, fmt::format(f, std::forward<Args>(args)...));
    }
}

template <typename... Args>
void info(fmt::format_string<Args...> f, Args &&...args) {
    if (log_level() >= LogLevel::info) {
        log_line(LogLevel::info, fmt::format(f, std::forward<Args>(args)...));
    }
}

}  // namespace nrpinn::util
