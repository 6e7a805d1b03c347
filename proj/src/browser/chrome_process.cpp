#include "chrome_process.hpp"

#include <fcntl.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "gp/core/error.hpp"
#include "gp/core/log.hpp"

extern char** environ;

namespace gp::browser {

namespace {

bool is_executable(const std::filesystem::path& p) {
  std::error_code ec;
  return std::filesystem::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

std::string tail_of(const std::filesystem::path& log_path) {
  std::ifstream in(log_path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string s = ss.str();
  if (s.size() > 600) s = s.substr(s.size() - 600);
  return s;
}

std::filesystem::path make_profile_dir() {
  std::string pattern = (std::filesystem::temp_directory_path() / "gp-chrome-XXXXXX").string();
  if (::mkdtemp(pattern.data()) == nullptr) {
    throw Error(ErrorCode::ConnectFailed, "cannot create browser profile directory");
  }
  return pattern;
}

}  // namespace

std::filesystem::path find_browser(const SessionConfig& config) {
  if (config.browser_path) {
    if (is_executable(*config.browser_path)) return *config.browser_path;
    throw Error(ErrorCode::BrowserNotFound,
                "browser_path is not an executable: " + config.browser_path->string());
  }
  if (const char* env = std::getenv("GP_BROWSER"); env && *env) {
    if (is_executable(env)) return env;
    throw Error(ErrorCode::BrowserNotFound, std::string("GP_BROWSER is not an executable: ") + env);
  }
  const char* path_env = std::getenv("PATH");
  const std::string path = path_env ? path_env : "";
  for (const char* name : {"chromium", "chromium-browser", "google-chrome", "google-chrome-stable",
                           "chrome", "headless_shell", "chrome-headless-shell"}) {
    std::stringstream dirs(path);
    std::string dir;
    while (std::getline(dirs, dir, ':')) {
      if (dir.empty()) continue;
      const auto candidate = std::filesystem::path(dir) / name;
      if (is_executable(candidate)) return candidate;
    }
  }
  throw Error(ErrorCode::BrowserNotFound,
              "no browser found; set GP_BROWSER or browser_path to a Chromium binary");
}

ChromeProcess::ChromeProcess(const std::filesystem::path& binary, const SessionConfig& config)
    : profile_dir_(make_profile_dir()) {
  std::vector<std::string> args = {
      binary.string(),
      "--remote-debugging-port=0",
      "--user-data-dir=" + profile_dir_.string(),
      "--no-first-run",
      "--no-default-browser-check",
      "--disable-extensions",
      "--disable-background-networking",
      "--disable-background-timer-throttling",
      "--disable-renderer-backgrounding",
      "--disable-component-update",
      "--hide-scrollbars",
      "--mute-audio",
      "--force-device-scale-factor=1",
      "--font-render-hinting=none",
      "--use-angle=swiftshader",
      "--window-size=" + std::to_string(config.viewport.width) + "," +
          std::to_string(config.viewport.height),
  };
  if (config.headless) args.emplace_back("--headless");
  if (::geteuid() == 0) args.emplace_back("--no-sandbox");
  if (const char* extra = std::getenv("GP_BROWSER_ARGS"); extra && *extra) {
    std::stringstream ss(extra);
    std::string a;
    while (ss >> a) args.push_back(a);
  }
  for (const auto& a : config.extra_args) args.push_back(a);
  args.emplace_back("about:blank");

  const auto log_path = profile_dir_ / "browser.log";
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, log_path.c_str(),
                                   O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, STDOUT_FILENO, STDERR_FILENO);

  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);
  const int rc = ::posix_spawn(&pid_, binary.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) {
    std::filesystem::remove_all(profile_dir_);
    throw Error(ErrorCode::BrowserNotFound, "cannot spawn " + binary.string());
  }

  // The browser writes "<port>\n<path>\n" once the debugging server is up.
  const auto port_file = profile_dir_ / "DevToolsActivePort";
  const auto deadline = std::chrono::steady_clock::now() + config.launch_timeout;
  while (std::chrono::steady_clock::now() < deadline) {
    int status = 0;
    if (::waitpid(pid_, &status, WNOHANG) == pid_) {
      pid_ = -1;
      const std::string detail = tail_of(log_path);
      std::filesystem::remove_all(profile_dir_);
      throw Error(ErrorCode::ConnectFailed, "browser exited during startup: " + detail);
    }
    std::ifstream in(port_file);
    std::string port;
    std::string path;
    if (in && std::getline(in, port) && std::getline(in, path) && !port.empty()) {
      endpoint_ = "ws://127.0.0.1:" + port + path;
      return;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  const std::string detail = tail_of(log_path);
  terminate();
  throw Error(ErrorCode::ConnectFailed, "browser did not open a debugging port: " + detail);
}

ChromeProcess::~ChromeProcess() { terminate(); }

void ChromeProcess::terminate() {
  if (pid_ > 0) {
    ::kill(pid_, SIGTERM);
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(3);
    int status = 0;
    bool reaped = false;
    while (std::chrono::steady_clock::now() < deadline) {
      if (::waitpid(pid_, &status, WNOHANG) == pid_) {
        reaped = true;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    if (!reaped) {
      log::warn("browser did not exit on SIGTERM; killing");
      ::kill(pid_, SIGKILL);
      ::waitpid(pid_, &status, 0);
    }
    pid_ = -1;
  }
  std::error_code ec;
  if (!profile_dir_.empty()) std::filesystem::remove_all(profile_dir_, ec);
  profile_dir_.clear();
}

}  // namespace gp::browser
