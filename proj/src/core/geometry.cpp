#include "gp/core/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace gp {

bool Bbox::contains(const Bbox& inner, double slack) const {
  return inner.x >= x - slack && inner.y >= y - slack &&
         inner.right() <= right() + slack && inner.bottom() <= bottom() + slack;
}

bool approx_equal(const Bbox& a, const Bbox& b, double tol) {
  return std::abs(a.x - b.x) <= tol && std::abs(a.y - b.y) <= tol &&
         std::abs(a.w - b.w) <= tol && std::abs(a.h - b.h) <= tol;
}

double intersection_over_union(const Bbox& a, const Bbox& b) {
  const double ix = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

double center_distance(const Bbox& a, const Bbox& b) {
  const Point ca = a.center();
  const Point cb = b.center();
  return std::hypot(cb.x - ca.x, cb.y - ca.y);
}

void to_json(nlohmann::json& j, const Point& p) { j = nlohmann::json::array({p.x, p.y}); }

void from_json(const nlohmann::json& j, Point& p) {
  p.x = j.at(0).get<double>();
  p.y = j.at(1).get<double>();
}

void to_json(nlohmann::json& j, const Size& s) {
  j = nlohmann::json::array({s.width, s.height});
}

void from_json(const nlohmann::json& j, Size& s) {
  s.width = j.at(0).get<int>();
  s.height = j.at(1).get<int>();
}

void to_json(nlohmann::json& j, const Bbox& b) {
  j = nlohmann::json{{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}};
}

void from_json(const nlohmann::json& j, Bbox& b) {
  if (j.is_array()) {
    b = {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
         j.at(3).get<double>()};
    return;
  }
  b.x = j.at("x").get<double>();
  b.y = j.at("y").get<double>();
  b.w = j.at("w").get<double>();
  b.h = j.at("h").get<double>();
}

}  // namespace gp
