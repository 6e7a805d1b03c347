#include "gp/browser/session.hpp"

#include <chrono>
#include <thread>

#include "chrome_process.hpp"
#include "gp/core/error.hpp"
#include "gp/core/io.hpp"
#include "gp/core/log.hpp"

namespace gp::browser {

namespace {

constexpr Millis kCommandTimeout{10000};

constexpr std::string_view kDeterminismCss = R"css(
*, *::before, *::after {
  animation: none !important;
  transition: none !important;
  caret-color: transparent !important;
  scroll-behavior: auto !important;
}
)css";

constexpr std::string_view kQueryInteractables = R"js((() => {
  const SELECTOR = 'a, button, input, select, textarea, [role=button], [role=link], ' +
                   '[role=tab], [role=menuitem], [onclick]';
  let next = window.__gpNextNode || 1;
  const docW = Math.max(document.documentElement.scrollWidth, innerWidth);
  const docH = Math.max(document.documentElement.scrollHeight, innerHeight);
  const out = [];
  for (const el of document.querySelectorAll(SELECTOR)) {
    if (el.tagName === 'INPUT' && el.type === 'hidden') continue;
    const cs = getComputedStyle(el);
    if (cs.display === 'none' || cs.visibility !== 'visible') continue;
    const r = el.getBoundingClientRect();
    let x0 = Math.max(0, r.left + scrollX), y0 = Math.max(0, r.top + scrollY);
    let x1 = Math.min(docW, r.right + scrollX), y1 = Math.min(docH, r.bottom + scrollY);
    if (x1 - x0 <= 0 || y1 - y0 <= 0 || (x1 - x0) * (y1 - y0) < 1) continue;
    if (!el.hasAttribute('data-gp-node')) el.setAttribute('data-gp-node', String(next++));
    let text = (el.innerText || '').replace(/\s+/g, ' ').trim();
    if (!text && (el.tagName === 'INPUT' || el.tagName === 'TEXTAREA')) {
      text = (el.value || el.placeholder || '').replace(/\s+/g, ' ').trim();
    }
    if (!text) text = (el.getAttribute('aria-label') || el.getAttribute('title') || '').trim();
    out.push({tag: el.tagName.toLowerCase(), role: el.getAttribute('role') || '',
              input_type: el.tagName === 'INPUT' ? (el.type || 'text') : '',
              text, bbox: {x: x0, y: y0, w: x1 - x0, h: y1 - y0},
              interactable: true, node_ref: el.getAttribute('data-gp-node')});
  }
  window.__gpNextNode = next;
  return out;
})())js";

std::string file_url(const std::filesystem::path& path) {
  std::string out = "file://";
  for (char ch : std::filesystem::absolute(path).lexically_normal().string()) {
    const auto u = static_cast<unsigned char>(ch);
    if (std::isalnum(u) || ch == '/' || ch == '-' || ch == '_' || ch == '.' || ch == '~') {
      out.push_back(ch);
    } else {
      static constexpr char kHex[] = "0123456789ABCDEF";
      out.push_back('%');
      out.push_back(kHex[u >> 4]);
      out.push_back(kHex[u & 15]);
    }
  }
  return out;
}

Json evaluate_locked(PageHandle& page, std::string_view script, Millis timeout) {
  const Json params = {{"expression", script},
                       {"returnByValue", true},
                       {"awaitPromise", true},
                       {"timeout", timeout.count()}};
  const Json reply = page.command("Runtime.evaluate", params, timeout + Millis(2000));
  if (reply.contains("exceptionDetails")) {
    const Json& details = reply["exceptionDetails"];
    std::string message = details.value("text", "script threw");
    if (details.contains("exception") && details["exception"].contains("description")) {
      message = details["exception"]["description"].get<std::string>();
    }
    throw Error(ErrorCode::ScriptError, message);
  }
  const Json& result = reply.value("result", Json::object());
  return result.contains("value") ? result["value"] : Json(nullptr);
}

}  // namespace

Session::Session(std::unique_ptr<ChromeProcess> process, std::unique_ptr<Transport> transport,
                 SessionConfig config, std::string endpoint)
    : process_(std::move(process)),
      transport_(std::move(transport)),
      config_(std::move(config)),
      endpoint_(std::move(endpoint)) {}

Session::Session(Session&&) noexcept = default;
Session& Session::operator=(Session&&) noexcept = default;

Session::~Session() {
  // Close the connection before the process goes away.
  transport_.reset();
  process_.reset();
}

Session Session::launch(const SessionConfig& config) {
  if (config.viewport.width <= 0 || config.viewport.height <= 0) {
    throw Error(ErrorCode::InvalidArgument, "viewport dimensions must be positive");
  }
  const auto binary = find_browser(config);
  auto process = std::make_unique<ChromeProcess>(binary, config);
  auto transport = connect_websocket(process->endpoint(), config.launch_timeout);
  std::string endpoint = process->endpoint();
  transport->call("Browser.getVersion", Json::object(), "", kCommandTimeout);
  return Session(std::move(process), std::move(transport), config, std::move(endpoint));
}

Session Session::attach(std::unique_ptr<Transport> transport, SessionConfig config,
                        std::string endpoint) {
  return Session(nullptr, std::move(transport), std::move(config), std::move(endpoint));
}

PageHandle::PageHandle(Session& session, std::string target_id, std::string cdp_session_id)
    : session_(&session),
      target_id_(std::move(target_id)),
      cdp_session_id_(std::move(cdp_session_id)),
      mutex_(std::make_unique<std::mutex>()) {}

PageHandle::PageHandle(PageHandle&& other) noexcept
    : session_(other.session_),
      target_id_(std::move(other.target_id_)),
      cdp_session_id_(std::move(other.cdp_session_id_)),
      loaded_url_(std::move(other.loaded_url_)),
      mutex_(std::move(other.mutex_)) {
  other.session_ = nullptr;
}

PageHandle::~PageHandle() {
  if (session_ == nullptr || target_id_.empty()) return;
  try {
    session_->transport().call("Target.closeTarget", {{"targetId", target_id_}}, "",
                               kCommandTimeout);
  } catch (const std::exception& e) {
    log::debug(std::string("closeTarget failed: ") + e.what());
  }
}

Json PageHandle::command(std::string_view method, const Json& params, Millis timeout) {
  return session_->transport().call(method, params, cdp_session_id_, timeout);
}

PageHandle load_archive(Session& session, const std::filesystem::path& archive_path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(archive_path, ec)) {
    throw Error(ErrorCode::NavigationFailed, "archive not found: " + archive_path.string());
  }
  const SessionConfig& config = session.config();
  Transport& transport = session.transport();
  const Json created =
      transport.call("Target.createTarget", {{"url", "about:blank"}}, "", kCommandTimeout);
  const std::string target_id = created.at("targetId").get<std::string>();
  const Json attached = transport.call(
      "Target.attachToTarget", {{"targetId", target_id}, {"flatten", true}}, "", kCommandTimeout);
  PageHandle page(session, target_id, attached.at("sessionId").get<std::string>());

  auto lock = page.lock();
  page.command("Emulation.setDeviceMetricsOverride",
               {{"width", config.viewport.width},
                {"height", config.viewport.height},
                {"deviceScaleFactor", 1},
                {"mobile", false}},
               kCommandTimeout);
  const std::string url = file_url(archive_path);
  const Json nav = page.command("Page.navigate", {{"url", url}}, config.load_timeout);
  if (nav.contains("errorText") && !nav["errorText"].get<std::string>().empty()) {
    throw Error(ErrorCode::NavigationFailed, url + ": " + nav["errorText"].get<std::string>());
  }

  const auto deadline = std::chrono::steady_clock::now() + config.load_timeout;
  while (true) {
    const Json state =
        evaluate_locked(page, "[document.readyState, location.href]", config.script_timeout);
    if (state.at(0) == "complete" && state.at(1) != "about:blank") {
      page.set_loaded_url(state.at(1).get<std::string>());
      break;
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      throw Error(ErrorCode::LoadTimeout, url + " not complete after " +
                                              std::to_string(config.load_timeout.count()) + " ms");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(25));
  }
  const std::string harden =
      "(() => { const s = document.createElement('style'); s.id = 'gp-determinism';"
      " s.textContent = " + Json(std::string(kDeterminismCss)).dump() + ";"
      " (document.head || document.documentElement).appendChild(s);"
      " if (document.activeElement && document.activeElement.blur) document.activeElement.blur();"
      " return document.fonts.ready.then(() => true); })()";
  evaluate_locked(page, harden, config.script_timeout);
  return page;
}

Json run_script(PageHandle& page, std::string_view script) {
  auto lock = page.lock();
  return evaluate_locked(page, script, page.session().config().script_timeout);
}

std::vector<ElementRecord> query_interactables(PageHandle& page) {
  const Json rows = run_script(page, kQueryInteractables);
  return rows.get<std::vector<ElementRecord>>();
}

Screenshot capture_screenshot(PageHandle& page) {
  auto lock = page.lock();
  const Json reply = page.command(
      "Page.captureScreenshot",
      {{"format", "png"}, {"fromSurface", true}, {"captureBeyondViewport", false}},
      page.session().config().script_timeout);
  Screenshot shot;
  shot.png = base64_decode(reply.at("data").get<std::string>());
  shot.size = png_dimensions(shot.png);
  return shot;
}

Size png_dimensions(std::string_view png) {
  static constexpr std::string_view kMagic = "\x89PNG\r\n\x1a\n";
  if (png.size() < 24 || png.substr(0, 8) != kMagic || png.substr(12, 4) != "IHDR") {
    throw Error(ErrorCode::DecodeError, "not a PNG image", 0);
  }
  const auto be32 = [&](std::size_t at) {
    return (static_cast<std::uint32_t>(static_cast<unsigned char>(png[at])) << 24) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(png[at + 1])) << 16) |
           (static_cast<std::uint32_t>(static_cast<unsigned char>(png[at + 2])) << 8) |
           static_cast<std::uint32_t>(static_cast<unsigned char>(png[at + 3]));
  };
  return {static_cast<int>(be32(16)), static_cast<int>(be32(20))};
}

void to_json(Json& j, const ElementRecord& e) {
  j = Json{{"tag", e.tag},   {"role", e.role},
           {"input_type", e.input_type}, {"text", e.text},
           {"bbox", e.bbox}, {"interactable", e.interactable},
           {"node_ref", e.node_ref}};
}

void from_json(const Json& j, ElementRecord& e) {
  e.tag = j.value("tag", "");
  e.role = j.value("role", "");
  e.input_type = j.value("input_type", "");
  e.text = j.value("text", "");
  e.bbox = j.at("bbox").get<Bbox>();
  e.interactable = j.value("interactable", true);
  e.node_ref = j.value("node_ref", "");
}

}  // namespace gp::browser
