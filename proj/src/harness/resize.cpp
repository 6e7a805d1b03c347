#include "gp/harness/resize.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "gp/core/error.hpp"

namespace gp::harness {

namespace {

int round_by_factor(double x, int factor) {
  // nearbyint under the default rounding mode rounds ties to even.
  return static_cast<int>(std::nearbyint(x / factor)) * factor;
}

int floor_by_factor(double x, int factor) {
  return static_cast<int>(std::floor(x / factor)) * factor;
}

int ceil_by_factor(double x, int factor) {
  return static_cast<int>(std::ceil(x / factor)) * factor;
}

}  // namespace

ResizePlan smart_resize(int h, int w, int factor, long long min_pixels, long long max_pixels) {
  if (h <= 0 || w <= 0) throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
  if (static_cast<double>(std::max(h, w)) / std::min(h, w) > 200) {
    throw Error(ErrorCode::AspectRatioExceeded,
                "aspect ratio of " + std::to_string(w) + "x" + std::to_string(h) + " exceeds 200:1");
  }
  ResizePlan plan;
  plan.orig_h = h;
  plan.orig_w = w;
  plan.factor = factor;
  plan.min_pixels = min_pixels;
  plan.max_pixels = max_pixels;
  int hb = std::max(factor, round_by_factor(h, factor));
  int wb = std::max(factor, round_by_factor(w, factor));
  const double area = static_cast<double>(h) * w;
  if (static_cast<long long>(hb) * wb > max_pixels) {
    const double beta = std::sqrt(area / static_cast<double>(max_pixels));
    hb = std::max(factor, floor_by_factor(h / beta, factor));
    wb = std::max(factor, floor_by_factor(w / beta, factor));
  } else if (static_cast<long long>(hb) * wb < min_pixels) {
    const double beta = std::sqrt(static_cast<double>(min_pixels) / area);
    hb = ceil_by_factor(h * beta, factor);
    wb = ceil_by_factor(w * beta, factor);
  }
  plan.h = hb;
  plan.w = wb;
  return plan;
}

Point map_to_original(Point p, const ResizePlan& plan) {
  constexpr double kSlack = 2.0;
  if (p.x < -kSlack || p.y < -kSlack || p.x > plan.w + kSlack || p.y > plan.h + kSlack) {
    throw Error(ErrorCode::PointOutOfRange,
                "point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ") outside " +
                    std::to_string(plan.w) + "x" + std::to_string(plan.h));
  }
  const double x = std::clamp(p.x, 0.0, static_cast<double>(plan.w));
  const double y = std::clamp(p.y, 0.0, static_cast<double>(plan.h));
  return {x * plan.orig_w / plan.w, y * plan.orig_h / plan.h};
}

Point map_to_resized(Point p, const ResizePlan& plan) {
  return {p.x * plan.w / plan.orig_w, p.y * plan.h / plan.orig_h};
}

std::string resize_png(std::string_view png, const ResizePlan& plan) {
  if (plan.identity()) return std::string(png);

  png_image in{};
  in.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&in, png.data(), png.size())) {
    throw Error(ErrorCode::DecodeError, std::string("png decode: ") + in.message);
  }
  in.format = PNG_FORMAT_RGBA;
  std::vector<unsigned char> src(PNG_IMAGE_SIZE(in));
  if (!png_image_finish_read(&in, nullptr, src.data(), 0, nullptr)) {
    png_image_free(&in);
    throw Error(ErrorCode::DecodeError, std::string("png decode: ") + in.message);
  }
  const int sw = static_cast<int>(in.width);
  const int sh = static_cast<int>(in.height);

  const int dw = plan.w;
  const int dh = plan.h;
  std::vector<unsigned char> dst(static_cast<std::size_t>(dw) * dh * 4);
  const double sx = static_cast<double>(sw) / dw;
  const double sy = static_cast<double>(sh) / dh;
  for (int y = 0; y < dh; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(sh - 1));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, sh - 1);
    const double ty = fy - y0;
    for (int x = 0; x < dw; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(sw - 1));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, sw - 1);
      const double tx = fx - x0;
      for (int c = 0; c < 4; ++c) {
        const auto at = [&](int xx, int yy) {
          return static_cast<double>(src[(static_cast<std::size_t>(yy) * sw + xx) * 4 + c]);
        };
        const double top = at(x0, y0) * (1 - tx) + at(x1, y0) * tx;
        const double bottom = at(x0, y1) * (1 - tx) + at(x1, y1) * tx;
        const double v = top * (1 - ty) + bottom * ty;
        dst[(static_cast<std::size_t>(y) * dw + x) * 4 + c] =
            static_cast<unsigned char>(std::clamp(std::lround(v), 0L, 255L));
      }
    }
  }

  png_image out{};
  out.version = PNG_IMAGE_VERSION;
  out.width = static_cast<png_uint_32>(dw);
  out.height = static_cast<png_uint_32>(dh);
  out.format = PNG_FORMAT_RGBA;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&out, nullptr, &size, 0, dst.data(), 0, nullptr)) {
    throw Error(ErrorCode::DecodeError, std::string("png encode: ") + out.message);
  }
  std::string encoded(size, '\0');
  if (!png_image_write_to_memory(&out, encoded.data(), &size, 0, dst.data(), 0, nullptr)) {
    throw Error(ErrorCode::DecodeError, std::string("png encode: ") + out.message);
  }
  encoded.resize(size);
  return encoded;
}

}  // namespace gp::harness
