#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace gp::perturb {

struct StyleTheme {
  std::string name;
  std::string stylesheet;
  /// Selectors for containers whose interactable children may be reordered.
  std::vector<std::string> shuffle_groups;
};

/// Read-only after construction; safe to share between threads.
class ThemeRegistry {
 public:
  /// Loads every <name>.css in `dir` together with its <name>.json sidecar
  /// ({"shuffle_groups": [...]}).
  static ThemeRegistry load(const std::filesystem::path& dir);

  void add(StyleTheme theme);

  /// Throws Error{ThemeNotFound}.
  const StyleTheme& get(const std::string& name) const;

  bool contains(const std::string& name) const { return themes_.count(name) != 0; }

  /// Sorted, so seeded sampling does not depend on directory order.
  std::vector<std::string> names() const;

  std::size_t size() const { return themes_.size(); }

 private:
  std::map<std::string, StyleTheme> themes_;
};

}  // namespace gp::perturb
