#pragma once

#include <string>

namespace sohkan::logging {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

/// Current threshold. Initialized once from the SOHKAN_LOG environment
/// variable (error|warn|info|debug, default warn).
[[nodiscard]] Level threshold();

/// Overrides the environment-derived threshold for the rest of the process.
void set_threshold(Level level);

void write(Level level, const std::string& message);

inline void error(const std::string& message) { write(Level::error, message); }
inline void warn(const std::string& message) { write(Level::warn, message); }
inline void info(const std::string& message) { write(Level::info, message); }
inline void debug(const std::string& message) { write(Level::debug, message); }

}  // namespace sohkan::logging
