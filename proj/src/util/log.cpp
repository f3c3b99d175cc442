#include "nrpinn/util/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace nrpinn::util {

namespace {
std::atomic<LogLevel> g_level{LogLevel::warn};
std::mutex g_mutex;
}  // namespace

void set_log_level(LogLevel level) { g_level = level; }

LogLevel log_level() { return g_level; }

void log_line(LogLevel level, std::string_view text) {
    const std::lock_guard lock(g_mutex);
    std::fprintf(stderr, "[%s] %.*s\n", level == LogLevel::warn ? "warn" : "info", static_cast<int>(text.size()),
                 text.data());
}

}  // namespace nrpinn::util
