// Minimal raster plot of the threshold sweep. Built only when libpng is found;
// otherwise render_sweep_png reports that no image was written.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "catre/reports.hpp"

#ifdef CATRE_HAVE_PNG
#include <png.h>
#endif

namespace catre {

#ifdef CATRE_HAVE_PNG

namespace {

struct Rgb {
  std::uint8_t r, g, b;
};

constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kBlack{0, 0, 0};
constexpr Rgb kGrid{225, 225, 225};
constexpr Rgb kBlue{31, 90, 170};
constexpr Rgb kRed{200, 60, 40};

// 5x7 glyphs, one byte per row, high bit on the left of the 5 columns.
const std::map<char, std::array<std::uint8_t, 7>>& font() {
  static const std::map<char, std::array<std::uint8_t, 7>> f = {
      {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}}, {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
      {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}}, {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
      {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}}, {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
      {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}}, {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
      {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}}, {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
      {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}}, {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
      {'e', {0x00, 0x00, 0x0E, 0x11, 0x1F, 0x10, 0x0E}}, {'x', {0x00, 0x00, 0x11, 0x0A, 0x04, 0x0A, 0x11}},
      {'i', {0x04, 0x00, 0x0C, 0x04, 0x04, 0x04, 0x0E}}, {'b', {0x10, 0x10, 0x16, 0x19, 0x11, 0x11, 0x1E}},
      {'*', {0x00, 0x04, 0x15, 0x0E, 0x15, 0x04, 0x00}}, {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
      {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}}, {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}},
      {'l', {0x0C, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}}, {'o', {0x00, 0x00, 0x0E, 0x11, 0x11, 0x11, 0x0E}},
      {'g', {0x00, 0x0F, 0x11, 0x11, 0x0F, 0x01, 0x0E}}, {'s', {0x00, 0x00, 0x0E, 0x10, 0x0E, 0x01, 0x1E}},
      {'c', {0x00, 0x00, 0x0E, 0x10, 0x10, 0x11, 0x0E}}, {'a', {0x00, 0x00, 0x0E, 0x01, 0x0F, 0x11, 0x0F}},
      {'v', {0x00, 0x00, 0x11, 0x11, 0x11, 0x0A, 0x04}},
      {' ', {0, 0, 0, 0, 0, 0, 0}},
  };
  return f;
}

class Canvas {
 public:
  Canvas(int w, int h) : w_(w), h_(h), px_(static_cast<std::size_t>(w) * h, kWhite) {}

  void set(int x, int y, Rgb c) {
    if (x >= 0 && y >= 0 && x < w_ && y < h_) px_[static_cast<std::size_t>(y) * w_ + x] = c;
  }

  void line(double x0, double y0, double x1, double y1, Rgb c, int thickness = 1) {
    const int steps = static_cast<int>(std::max(std::abs(x1 - x0), std::abs(y1 - y0))) + 1;
    for (int i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) / steps;
      const int x = static_cast<int>(std::lround(x0 + t * (x1 - x0)));
      const int y = static_cast<int>(std::lround(y0 + t * (y1 - y0)));
      for (int dx = 0; dx < thickness; ++dx)
        for (int dy = 0; dy < thickness; ++dy) set(x + dx, y + dy, c);
    }
  }

  // Text scaled by 2, anchored at its top-left corner.
  void text(int x, int y, const std::string& s, Rgb c) {
    for (char ch : s) {
      auto it = font().find(ch);
      if (it != font().end()) {
        for (int row = 0; row < 7; ++row)
          for (int col = 0; col < 5; ++col)
            if (it->second[row] & (0x10 >> col))
              for (int k = 0; k < 4; ++k) set(x + 2 * col + k % 2, y + 2 * row + k / 2, c);
      }
      x += 12;
    }
  }
  static int text_width(const std::string& s) { return 12 * static_cast<int>(s.size()); }

  bool write(const std::string& path) const {
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) return false;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, &info);
      std::fclose(fp);
      return false;
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, w_, h_, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<std::uint8_t> row(static_cast<std::size_t>(w_) * 3);
    for (int y = 0; y < h_; ++y) {
      for (int x = 0; x < w_; ++x) {
        const Rgb& p = px_[static_cast<std::size_t>(y) * w_ + x];
        row[3 * x] = p.r;
        row[3 * x + 1] = p.g;
        row[3 * x + 2] = p.b;
      }
      png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return std::fclose(fp) == 0;
  }

 private:
  int w_, h_;
  std::vector<Rgb> px_;
};

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

// Roughly five round ticks covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return out;
}

void panel(Canvas& c, int x0, int y0, int w, int h, const std::vector<double>& logL, const std::vector<double>& y,
           Rgb colour, const std::string& title) {
  double ylo = *std::min_element(y.begin(), y.end()), yhi = *std::max_element(y.begin(), y.end());
  const double pad = std::max(1e-3, 0.08 * (yhi - ylo));
  ylo -= pad;
  yhi += pad;
  const double xlo = logL.front(), xhi = logL.back();
  auto X = [&](double v) { return x0 + (v - xlo) / (xhi - xlo) * w; };
  auto Y = [&](double v) { return y0 + h - (v - ylo) / (yhi - ylo) * h; };

  for (int d = static_cast<int>(std::ceil(xlo)); d <= static_cast<int>(std::floor(xhi)); ++d) {
    c.line(X(d), y0, X(d), y0 + h, kGrid);
    const std::string lab = "1e" + std::to_string(d);
    c.text(static_cast<int>(X(d)) - Canvas::text_width(lab) / 2, y0 + h + 8, lab, kBlack);
  }
  for (double v : nice_ticks(ylo, yhi)) {
    c.line(x0, Y(v), x0 + w, Y(v), kGrid);
    const std::string lab = tick_label(v);
    c.text(x0 - 8 - Canvas::text_width(lab), static_cast<int>(Y(v)) - 7, lab, kBlack);
  }
  c.line(x0, y0, x0 + w, y0, kBlack);
  c.line(x0, y0 + h, x0 + w, y0 + h, kBlack);
  c.line(x0, y0, x0, y0 + h, kBlack);
  c.line(x0 + w, y0, x0 + w, y0 + h, kBlack);
  for (std::size_t i = 1; i < y.size(); ++i) c.line(X(logL[i - 1]), Y(y[i - 1]), X(logL[i]), Y(y[i]), colour, 2);
  c.text(x0, y0 - 22, title, colour);
}

}  // namespace

bool render_sweep_png(const SweepResult& result, const std::string& path) {
  if (result.rows.size() < 2) return false;
  std::vector<double> logL, xi, b;
  for (const auto& r : result.rows) {
    logL.push_back(std::log10(r.L));
    xi.push_back(r.solution.xi_star);
    b.push_back(r.solution.b_star);
  }
  Canvas c(900, 760);
  panel(c, 110, 30, 760, 300, logL, xi, kBlue, "xi*");
  panel(c, 110, 400, 760, 300, logL, b, kRed, "b*");
  const std::string xl = "L (log scale)";
  c.text(110 + 380 - Canvas::text_width(xl) / 2, 734, xl, kBlack);
  return c.write(path);
}

#else

bool render_sweep_png(const SweepResult&, const std::string&) { return false; }

#endif

}  // namespace catre
