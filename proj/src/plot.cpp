#include "wci/plot.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

namespace wci {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 20;
constexpr int kMarginBottom = 44;

class Canvas {
 public:
  Canvas() : pixels_(static_cast<std::size_t>(kWidth) * kHeight * 3, 0xff) {}

  void set(int x, int y, std::uint32_t rgb) {
    if (x < 0 || x >= kWidth || y < 0 || y >= kHeight) return;
    const std::size_t at = 3 * (static_cast<std::size_t>(y) * kWidth + x);
    pixels_[at] = static_cast<unsigned char>(rgb >> 16);
    pixels_[at + 1] = static_cast<unsigned char>(rgb >> 8);
    pixels_[at + 2] = static_cast<unsigned char>(rgb);
  }

  void line(int x0, int y0, int x1, int y1, std::uint32_t rgb) {
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
      set(x0, y0, rgb);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) { err += dy; x0 += sx; }
      if (e2 <= dx) { err += dx; y0 += sy; }
    }
  }

  void marker(int x, int y, std::uint32_t rgb) {
    for (int dy = -2; dy <= 2; ++dy)
      for (int dx = -2; dx <= 2; ++dx) set(x + dx, y + dy, rgb);
  }

  // 3x5 glyphs for tick labels; enough for scientific notation.
  void text(int x, int y, const std::string& s, std::uint32_t rgb) {
    static const char* kGlyphs = "0123456789.-e+";
    static const std::uint16_t kBits[] = {
        0x7b6f, 0x2492, 0x73e7, 0x73cf, 0x5bc9, 0x79cf, 0x79ef, 0x7249,
        0x7bef, 0x7bcf, 0x0004, 0x01c0, 0x7b8f, 0x05d0};
    for (char c : s) {
      const char* hit = std::strchr(kGlyphs, c);
      if (hit) {
        const std::uint16_t bits = kBits[hit - kGlyphs];
        for (int row = 0; row < 5; ++row)
          for (int col = 0; col < 3; ++col)
            if (bits >> (row * 3 + col) & 1) set(x + col, y + row, rgb);
      }
      x += 4;
    }
  }

  const std::vector<unsigned char>& pixels() const { return pixels_; }

 private:
  std::vector<unsigned char> pixels_;
};

bool write_png(const std::string& path, const Canvas& canvas) {
  // Raw scanlines with filter byte 0, then one zlib stream.
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<std::size_t>(kHeight) * (1 + 3 * kWidth));
  for (int y = 0; y < kHeight; ++y) {
    raw.push_back(0);
    const unsigned char* row = canvas.pixels().data() + 3 * static_cast<std::size_t>(y) * kWidth;
    raw.insert(raw.end(), row, row + 3 * kWidth);
  }
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> compressed(bound);
  if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    return false;
  compressed.resize(bound);

  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  auto be32 = [](std::uint32_t v) {
    return std::array<unsigned char, 4>{static_cast<unsigned char>(v >> 24),
                                        static_cast<unsigned char>(v >> 16),
                                        static_cast<unsigned char>(v >> 8),
                                        static_cast<unsigned char>(v)};
  };
  auto chunk = [&](const char* type, const unsigned char* data, std::size_t len) {
    const auto lenb = be32(static_cast<std::uint32_t>(len));
    out.write(reinterpret_cast<const char*>(lenb.data()), 4);
    std::vector<unsigned char> body(4 + len);
    std::memcpy(body.data(), type, 4);
    if (len) std::memcpy(body.data() + 4, data, len);
    out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
    const auto crc = be32(static_cast<std::uint32_t>(
        crc32(0, body.data(), static_cast<uInt>(body.size()))));
    out.write(reinterpret_cast<const char*>(crc.data()), 4);
  };

  static const unsigned char kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  out.write(reinterpret_cast<const char*>(kSig), 8);
  unsigned char ihdr[13];
  const auto w = be32(kWidth), h = be32(kHeight);
  std::memcpy(ihdr, w.data(), 4);
  std::memcpy(ihdr + 4, h.data(), 4);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 2;   // truecolor
  ihdr[10] = ihdr[11] = ihdr[12] = 0;
  chunk("IHDR", ihdr, 13);
  chunk("IDAT", compressed.data(), compressed.size());
  chunk("IEND", nullptr, 0);
  return static_cast<bool>(out);
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

bool write_line_plot_png(const std::string& path,
                         const std::vector<PlotSeries>& series, bool log_x,
                         bool log_y) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  auto tx = [&](double v) { return log_x ? std::log10(std::max(v, 1e-300)) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(std::max(v, 1e-300)) : v; };
  for (const PlotSeries& s : series) {
    for (double v : s.x) { xmin = std::min(xmin, tx(v)); xmax = std::max(xmax, tx(v)); }
    for (double v : s.y) { ymin = std::min(ymin, ty(v)); ymax = std::max(ymax, ty(v)); }
  }
  if (!(xmin <= xmax && ymin <= ymax)) return false;
  if (xmax == xmin) { xmax += 1; xmin -= 1; }
  if (ymax == ymin) { ymax += 1; ymin -= 1; }
  const double xpad = 0.04 * (xmax - xmin), ypad = 0.06 * (ymax - ymin);
  xmin -= xpad; xmax += xpad; ymin -= ypad; ymax += ypad;

  Canvas canvas;
  auto px = [&](double v) {
    return kMarginLeft + static_cast<int>((tx(v) - xmin) / (xmax - xmin) *
                                          (kWidth - kMarginLeft - kMarginRight));
  };
  auto py = [&](double v) {
    return kHeight - kMarginBottom -
           static_cast<int>((ty(v) - ymin) / (ymax - ymin) *
                            (kHeight - kMarginTop - kMarginBottom));
  };

  const std::uint32_t axis = 0x404040, grid = 0xd8d8d8;
  for (int t = 0; t <= 5; ++t) {
    const double fx = xmin + t * (xmax - xmin) / 5;
    const double fy = ymin + t * (ymax - ymin) / 5;
    const int gx = kMarginLeft + t * (kWidth - kMarginLeft - kMarginRight) / 5;
    const int gy = kHeight - kMarginBottom - t * (kHeight - kMarginTop - kMarginBottom) / 5;
    canvas.line(gx, kMarginTop, gx, kHeight - kMarginBottom, grid);
    canvas.line(kMarginLeft, gy, kWidth - kMarginRight, gy, grid);
    const double vx = log_x ? std::pow(10.0, fx) : fx;
    const double vy = log_y ? std::pow(10.0, fy) : fy;
    canvas.text(gx - 10, kHeight - kMarginBottom + 8, tick_label(vx), axis);
    canvas.text(4, gy - 2, tick_label(vy), axis);
  }
  canvas.line(kMarginLeft, kHeight - kMarginBottom, kWidth - kMarginRight,
              kHeight - kMarginBottom, axis);
  canvas.line(kMarginLeft, kMarginTop, kMarginLeft, kHeight - kMarginBottom, axis);

  for (const PlotSeries& s : series) {
    for (std::size_t i = 0; i + 1 < s.x.size(); ++i)
      canvas.line(px(s.x[i]), py(s.y[i]), px(s.x[i + 1]), py(s.y[i + 1]), s.rgb);
    for (std::size_t i = 0; i < s.x.size(); ++i) canvas.marker(px(s.x[i]), py(s.y[i]), s.rgb);
  }
  return write_png(path, canvas);
}

}  // namespace wci
