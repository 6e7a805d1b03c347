#include "gp/perturbation/theme.hpp"

#include <nlohmann/json.hpp>

#include "gp/core/error.hpp"
#include "gp/core/io.hpp"

namespace gp::perturb {

ThemeRegistry ThemeRegistry::load(const std::filesystem::path& dir) {
  ThemeRegistry registry;
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::IoError, "theme directory not found: " + dir.string());
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".css") continue;
    StyleTheme theme;
    theme.name = entry.path().stem().string();
    theme.stylesheet = read_file(entry.path());
    auto sidecar = entry.path();
    sidecar.replace_extension(".json");
    if (std::filesystem::exists(sidecar)) {
      const auto meta = nlohmann::json::parse(read_file(sidecar));
      theme.shuffle_groups = meta.value("shuffle_groups", std::vector<std::string>{});
    }
    registry.add(std::move(theme));
  }
  return registry;
}

void ThemeRegistry::add(StyleTheme theme) {
  std::string name = theme.name;
  themes_[name] = std::move(theme);
}

const StyleTheme& ThemeRegistry::get(const std::string& name) const {
  const auto it = themes_.find(name);
  if (it == themes_.end()) throw Error(ErrorCode::ThemeNotFound, "no theme named '" + name + "'");
  return it->second;
}

std::vector<std::string> ThemeRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : themes_) out.push_back(name);
  return out;
}

}  // namespace gp::perturb
