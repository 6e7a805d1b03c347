#pragma once

#include <nlohmann/json.hpp>

namespace gp {

struct Point {
  double x = 0;
  double y = 0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Size {
  int width = 0;
  int height = 0;

  friend bool operator==(const Size&, const Size&) = default;
};

/// Axis-aligned box in screenshot pixels, origin top-left.
struct Bbox {
  double x = 0;
  double y = 0;
  double w = 0;
  double h = 0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }
  Point center() const { return {x + w / 2, y + h / 2}; }

  Bbox translated(double dx, double dy) const { return {x + dx, y + dy, w, h}; }
  Bbox scaled(double s) const { return {x * s, y * s, w * s, h * s}; }

  bool contains(const Bbox& inner, double slack = 0) const;

  friend bool operator==(const Bbox&, const Bbox&) = default;
};

/// True when every coordinate of a and b differs by at most tol.
bool approx_equal(const Bbox& a, const Bbox& b, double tol);

double intersection_over_union(const Bbox& a, const Bbox& b);

double center_distance(const Bbox& a, const Bbox& b);

void to_json(nlohmann::json& j, const Point& p);
void from_json(const nlohmann::json& j, Point& p);
void to_json(nlohmann::json& j, const Size& s);
void from_json(const nlohmann::json& j, Size& s);
void to_json(nlohmann::json& j, const Bbox& b);
void from_json(const nlohmann::json& j, Bbox& b);

}  // namespace gp
