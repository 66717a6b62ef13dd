#ifndef ENDURQ_LOG_HPP
#define ENDURQ_LOG_HPP

#include <cstdlib>
#include <iostream>
#include <string>

namespace endurq {

enum class LogLevel { error = 0, info = 1, debug = 2 };

// Verbosity comes from ENDURQ_LOG in {error, info, debug}; default error.
inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("ENDURQ_LOG");
        if (env == nullptr) return LogLevel::error;
        const std::string v(env);
        if (v == "debug") return LogLevel::debug;
        if (v == "info") return LogLevel::info;
        return LogLevel::error;
    }();
    return level;
}

inline void log_error(const std::string& msg) {
    std::cerr << "endurq: error: " << msg << "\n";
}

inline void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) std::cerr << "endurq: " << msg << "\n";
}

inline void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::debug) std::cerr << "endurq: debug: " << msg << "\n";
}

} // namespace endurq

#endif
