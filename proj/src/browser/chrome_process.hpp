#pragma once

#include <sys/types.h>

#include <filesystem>
#include <string>

#include "gp/browser/session.hpp"

namespace gp::browser {

/// A spawned browser with a throwaway profile directory. Terminated (and the
/// profile removed) on destruction.
class ChromeProcess {
 public:
  ChromeProcess(const std::filesystem::path& binary, const SessionConfig& config);
  ChromeProcess(const ChromeProcess&) = delete;
  ChromeProcess& operator=(const ChromeProcess&) = delete;
  ~ChromeProcess();

  const std::string& endpoint() const { return endpoint_; }

 private:
  void terminate();

  pid_t pid_ = -1;
  std::filesystem::path profile_dir_;
  std::string endpoint_;
};

}  // namespace gp::browser
