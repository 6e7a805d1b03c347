#include "gp/core/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace gp::log {

namespace {

std::atomic<Level>& current() {
  static std::atomic<Level> level = [] {
    const char* env = std::getenv("GP_LOG_LEVEL");
    const std::string v = env ? env : "warn";
    if (v == "debug") return Level::Debug;
    if (v == "info") return Level::Info;
    if (v == "error") return Level::Error;
    return Level::Warn;
  }();
  return level;
}

Level threshold() { return current().load(); }

constexpr std::string_view label(Level level) {
  switch (level) {
    case Level::Debug: return "debug";
    case Level::Info: return "info";
    case Level::Warn: return "warn";
    case Level::Error: return "error";
  }
  return "?";
}

}  // namespace

void set_level(Level level) { current() = level; }

void write(Level level, std::string_view message) {
  if (level < threshold()) return;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  std::cerr << "[gp:" << label(level) << "] " << message << '\n';
}

}  // namespace gp::log
