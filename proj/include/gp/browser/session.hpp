#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gp/browser/transport.hpp"
#include "gp/core/geometry.hpp"

namespace gp::browser {

struct SessionConfig {
  bool headless = true;
  Size viewport{1280, 800};
  /// Overrides GP_BROWSER and the PATH search.
  std::optional<std::filesystem::path> browser_path;
  std::vector<std::string> extra_args;
  Millis launch_timeout{20000};
  Millis load_timeout{30000};
  Millis script_timeout{10000};
};

/// Resolves the browser executable: config.browser_path, then $GP_BROWSER,
/// then well-known names on $PATH. Throws Error{BrowserNotFound}.
std::filesystem::path find_browser(const SessionConfig& config);

class ChromeProcess;

/// A browser instance and its debugging connection. Move-only; the browser
/// process (when launched by us) exits when the Session is destroyed.
class Session {
 public:
  /// Spawns a browser and connects to it. Throws BrowserNotFound or
  /// ConnectFailed.
  static Session launch(const SessionConfig& config);

  /// Wraps an existing transport (a test double or an already running
  /// browser).
  static Session attach(std::unique_ptr<Transport> transport, SessionConfig config,
                        std::string endpoint);

  Session(Session&&) noexcept;
  Session& operator=(Session&&) noexcept;
  ~Session();

  const std::string& endpoint() const { return endpoint_; }
  Size viewport() const { return config_.viewport; }
  bool headless() const { return config_.headless; }
  const SessionConfig& config() const { return config_; }

  Transport& transport() { return *transport_; }

 private:
  Session(std::unique_ptr<ChromeProcess> process, std::unique_ptr<Transport> transport,
          SessionConfig config, std::string endpoint);

  std::unique_ptr<ChromeProcess> process_;
  std::unique_ptr<Transport> transport_;
  SessionConfig config_;
  std::string endpoint_;
};

/// One page (tab) in a Session. Every operation on a page holds the page's
/// lock for its full duration, so protocol exchanges for one page never
/// interleave. The page target is closed on destruction.
class PageHandle {
 public:
  PageHandle(Session& session, std::string target_id, std::string cdp_session_id);
  PageHandle(PageHandle&&) noexcept;
  PageHandle& operator=(PageHandle&&) = delete;
  ~PageHandle();

  Session& session() { return *session_; }
  const std::string& page_id() const { return target_id_; }
  const std::string& loaded_url() const { return loaded_url_; }

  /// Sends one protocol command scoped to this page (lock must be held by the
  /// caller through `lock()`).
  Json command(std::string_view method, const Json& params, Millis timeout);

  [[nodiscard]] std::unique_lock<std::mutex> lock() { return std::unique_lock(*mutex_); }

  void set_loaded_url(std::string url) { loaded_url_ = std::move(url); }

 private:
  Session* session_;
  std::string target_id_;
  std::string cdp_session_id_;
  std::string loaded_url_;
  std::unique_ptr<std::mutex> mutex_;
};

struct ElementRecord {
  std::string tag;
  std::string role;        // role attribute, empty when absent
  std::string input_type;  // type attribute for input elements
  std::string text;        // trimmed visible text, whitespace collapsed
  Bbox bbox;               // full-page coordinates
  bool interactable = true;
  std::string node_ref;    // stable per page (data-gp-node attribute)
};

void to_json(Json& j, const ElementRecord& e);
void from_json(const Json& j, ElementRecord& e);

struct Screenshot {
  std::string png;
  Size size;
};

/// Opens a new page, sizes its viewport, navigates to the archive and waits
/// until the document is complete and fonts are ready. Animations,
/// transitions and carets are disabled afterwards. Throws NavigationFailed or
/// LoadTimeout.
PageHandle load_archive(Session& session, const std::filesystem::path& archive_path);

/// Evaluates `script` as an expression (promises are awaited) and returns its
/// JSON-serialized value; undefined maps to null. Throws ScriptError or
/// Timeout.
Json run_script(PageHandle& page, std::string_view script);

/// Every visible interactable element in document order. Assigns node
/// references on first sight.
std::vector<ElementRecord> query_interactables(PageHandle& page);

/// Captures the viewport as PNG.
Screenshot capture_screenshot(PageHandle& page);

/// Width and height from a PNG IHDR chunk. Throws Error{DecodeError}.
Size png_dimensions(std::string_view png);

}  // namespace gp::browser
