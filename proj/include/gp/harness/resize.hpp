#pragma once

#include <string>
#include <string_view>

#include "gp/core/geometry.hpp"

namespace gp::harness {

struct ResizePlan {
  int orig_h = 0;
  int orig_w = 0;
  int h = 0;  // resized
  int w = 0;
  int factor = 28;
  long long min_pixels = 100LL * 28 * 28;
  long long max_pixels = 16384LL * 28 * 28;

  bool identity() const { return h == orig_h && w == orig_w; }
  friend bool operator==(const ResizePlan&, const ResizePlan&) = default;
};

/// Rounds each side to the nearest multiple of `factor` (ties to even), then
/// rescales into [min_pixels, max_pixels] rounding down when shrinking and up
/// when growing. Throws AspectRatioExceeded when max/min side > 200, and
/// InvalidArgument for non-positive sizes.
ResizePlan smart_resize(int h, int w, int factor = 28, long long min_pixels = 100LL * 28 * 28,
                        long long max_pixels = 16384LL * 28 * 28);

/// Maps a point from resized to original image space: (x·w/w′, y·h/h′).
/// Points up to 2 px outside the resized frame are clamped first; anything
/// further out throws PointOutOfRange.
Point map_to_original(Point p, const ResizePlan& plan);

/// Inverse of map_to_original, without clamping.
Point map_to_resized(Point p, const ResizePlan& plan);

/// Decodes a PNG, resamples it to plan.w x plan.h (bilinear, pixel-centre
/// aligned) and re-encodes it. Returns the input unchanged when the plan is
/// the identity. Throws DecodeError.
std::string resize_png(std::string_view png, const ResizePlan& plan);

}  // namespace gp::harness
