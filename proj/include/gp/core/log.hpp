#pragma once

#include <string_view>

namespace gp::log {

enum class Level { Debug, Info, Warn, Error };

/// Minimum level is read once from GP_LOG_LEVEL (debug|info|warn|error);
/// defaults to warn.
void write(Level level, std::string_view message);

/// Overrides the level from the environment.
void set_level(Level level);

inline void debug(std::string_view m) { write(Level::Debug, m); }
inline void info(std::string_view m) { write(Level::Info, m); }
inline void warn(std::string_view m) { write(Level::Warn, m); }
inline void error(std::string_view m) { write(Level::Error, m); }

}  // namespace gp::log
