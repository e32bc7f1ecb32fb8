#include "lidreg/raster.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "raster container I/O assumes a little-endian host");

namespace lidreg {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string header_path_for(const std::string& path) { return path + ".hdr"; }

// --- native container ------------------------------------------------------

void write_header(const GeoRaster& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write raster header: " + path);
  out.precision(17);
  out << "width " << r.grid.width << "\n";
  out << "height " << r.grid.height << "\n";
  out << "origin_x " << r.transform.origin_x << "\n";
  out << "origin_y " << r.transform.origin_y << "\n";
  out << "pixel_size_x " << r.transform.pixel_size_x << "\n";
  out << "pixel_size_y " << r.transform.pixel_size_y << "\n";
  out << "rot_x " << r.transform.rot_x << "\n";
  out << "rot_y " << r.transform.rot_y << "\n";
  if (r.grid.nodata) out << "nodata " << static_cast<double>(*r.grid.nodata) << "\n";
  if (!r.crs_tag.empty()) out << "crs_tag " << r.crs_tag << "\n";
}

GeoRaster load_native(const std::string& path) {
  std::ifstream hdr(header_path_for(path));
  if (!hdr) fail("missing raster header: " + header_path_for(path));

  GeoRaster r;
  int width = -1, height = -1;
  std::string key;
  while (hdr >> key) {
    if (key == "width") hdr >> width;
    else if (key == "height") hdr >> height;
    else if (key == "origin_x") hdr >> r.transform.origin_x;
    else if (key == "origin_y") hdr >> r.transform.origin_y;
    else if (key == "pixel_size_x") hdr >> r.transform.pixel_size_x;
    else if (key == "pixel_size_y") hdr >> r.transform.pixel_size_y;
    else if (key == "rot_x") hdr >> r.transform.rot_x;
    else if (key == "rot_y") hdr >> r.transform.rot_y;
    else if (key == "nodata") {
      double v;
      hdr >> v;
      r.grid.nodata = static_cast<float>(v);
    } else if (key == "crs_tag") {
      hdr >> r.crs_tag;
    } else {
      fail("malformed raster header key '" + key + "' in " + header_path_for(path));
    }
    if (hdr.fail()) fail("malformed raster header: " + header_path_for(path));
  }
  if (width <= 0 || height <= 0) fail("malformed raster header (bad extent): " + path);

  std::ifstream data(path, std::ios::binary);
  if (!data) fail("missing raster payload: " + path);
  data.seekg(0, std::ios::end);
  const auto bytes = static_cast<size_t>(data.tellg());
  data.seekg(0);
  const size_t expected = static_cast<size_t>(width) * height * sizeof(float);
  if (bytes != expected)
    fail("raster dimension mismatch: header says " + std::to_string(width) + "x" +
         std::to_string(height) + " but payload holds " + std::to_string(bytes / sizeof(float)) +
         " samples: " + path);

  r.grid.width = width;
  r.grid.height = height;
  r.grid.pixels.resize(static_cast<size_t>(width) * height);
  data.read(reinterpret_cast<char*>(r.grid.pixels.data()), static_cast<std::streamsize>(expected));
  if (!data) fail("short read on raster payload: " + path);
  return r;
}

// --- PGM -------------------------------------------------------------------

int pgm_token(std::istream& in) {
  // skips whitespace and '#' comment lines
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int v;
  in >> v;
  if (in.fail()) fail("malformed PGM header");
  return v;
}

std::optional<GeoTransform> load_world_file(const std::string& pgm_path) {
  namespace fs = std::filesystem;
  fs::path p(pgm_path);
  std::vector<fs::path> candidates = {fs::path(p).replace_extension(".pgw"),
                                      fs::path(p).replace_extension(".wld")};
  for (const auto& cand : candidates) {
    std::ifstream in(cand);
    if (!in) continue;
    double a, d, b, e, c, f;
    if (!(in >> a >> d >> b >> e >> c >> f)) fail("malformed world file: " + cand.string());
    // ESRI terms map pixel (0,0) *center* to (c, f)
    GeoTransform t;
    t.pixel_size_x = a;
    t.rot_y = d;
    t.rot_x = b;
    t.pixel_size_y = e;
    t.origin_x = c - 0.5 * a - 0.5 * b;
    t.origin_y = f - 0.5 * d - 0.5 * e;
    return t;
  }
  return std::nullopt;
}

GeoRaster load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("missing file: " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5') fail("not a binary PGM (expected P5): " + path);
  const int width = pgm_token(in);
  const int height = pgm_token(in);
  const int maxval = pgm_token(in);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535)
    fail("malformed PGM header: " + path);
  in.get();  // single whitespace after maxval

  GeoRaster r;
  r.grid.width = width;
  r.grid.height = height;
  r.grid.pixels.resize(static_cast<size_t>(width) * height);
  const size_t n = r.grid.pixels.size();
  if (maxval < 256) {
    std::vector<uint8_t> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
    if (!in) fail("raster dimension mismatch: PGM payload short: " + path);
    for (size_t i = 0; i < n; ++i) r.grid.pixels[i] = buf[i];
  } else {
    std::vector<uint8_t> buf(2 * n);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(2 * n));
    if (!in) fail("raster dimension mismatch: PGM payload short: " + path);
    for (size_t i = 0; i < n; ++i)  // big-endian sample order per PGM spec
      r.grid.pixels[i] = static_cast<float>((buf[2 * i] << 8) | buf[2 * i + 1]);
  }
  if (auto t = load_world_file(path)) r.transform = *t;
  return r;
}

}  // namespace

void RasterGrid::validate() const {
  if (width < 0 || height < 0 || pixels.size() != static_cast<size_t>(width) * height)
    fail("raster pixel count does not match extent");
  for (float v : pixels)
    if (!is_nodata(v) && !std::isfinite(v)) fail("raster holds a non-finite sample");
}

WorldPoint pixel_to_world(const GeoTransform& t, double col, double row) {
  const double c = col + 0.5, r = row + 0.5;
  return {t.origin_x + c * t.pixel_size_x + r * t.rot_x,
          t.origin_y + c * t.rot_y + r * t.pixel_size_y};
}

PixelPoint world_to_pixel(const GeoTransform& t, double x, double y) {
  const double dx = x - t.origin_x, dy = y - t.origin_y;
  const double det = t.pixel_size_x * t.pixel_size_y - t.rot_x * t.rot_y;
  const double c = (dx * t.pixel_size_y - dy * t.rot_x) / det;
  const double r = (dy * t.pixel_size_x - dx * t.rot_y) / det;
  return {c - 0.5, r - 0.5};
}

GeoRaster load_raster(const std::string& path) {
  if (!std::filesystem::exists(path)) fail("missing file: " + path);
  if (ends_with(path, ".pgm") || ends_with(path, ".PGM")) return load_pgm(path);
  return load_native(path);
}

void save_raster(const GeoRaster& raster, const std::string& path) {
  if (raster.grid.width <= 0 || raster.grid.height <= 0)
    fail("refusing to save raster with empty extent");
  raster.grid.validate();
  std::ofstream data(path, std::ios::binary);
  if (!data) fail("cannot write raster payload: " + path);
  data.write(reinterpret_cast<const char*>(raster.grid.pixels.data()),
             static_cast<std::streamsize>(raster.grid.pixels.size() * sizeof(float)));
  if (!data) fail("write failed: " + path);
  write_header(raster, header_path_for(path));
}

void write_pgm8(const RasterGrid& grid, const std::string& path) {
  if (grid.width <= 0 || grid.height <= 0) fail("refusing to write empty PGM");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write PGM: " + path);
  out << "P5\n" << grid.width << " " << grid.height << "\n255\n";
  std::vector<uint8_t> buf(grid.pixels.size());
  for (size_t i = 0; i < buf.size(); ++i) {
    const float v = std::clamp(grid.pixels[i], 0.0f, 255.0f);
    buf[i] = static_cast<uint8_t>(std::lround(v));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
}

std::vector<LidarPoint> load_point_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("missing file: " + path);
  std::vector<LidarPoint> points;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    LidarPoint p;
    if (!(ls >> p.x)) continue;  // blank line
    if (!(ls >> p.y >> p.z >> p.intensity))
      fail("malformed point cloud line " + std::to_string(lineno) + " in " + path);
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      fail("non-finite point at line " + std::to_string(lineno) + " in " + path);
    points.push_back(p);
  }
  return points;
}

std::optional<double> sample_bilinear_px(const RasterGrid& grid, double col, double row) {
  if (!(col >= 0.0) || !(row >= 0.0) || col > grid.width - 1 || row > grid.height - 1)
    return std::nullopt;
  const int c0 = std::min(static_cast<int>(col), grid.width - 1);
  const int r0 = std::min(static_cast<int>(row), grid.height - 1);
  const double fc = col - c0, fr = row - r0;
  const int c1 = std::min(c0 + 1, grid.width - 1);
  const int r1 = std::min(r0 + 1, grid.height - 1);

  const double w00 = (1 - fc) * (1 - fr), w10 = fc * (1 - fr);
  const double w01 = (1 - fc) * fr, w11 = fc * fr;
  double sum = 0.0;
  const struct {
    int r, c;
    double w;
  } taps[4] = {{r0, c0, w00}, {r0, c1, w10}, {r1, c0, w01}, {r1, c1, w11}};
  for (const auto& t : taps) {
    if (t.w == 0.0) continue;
    const float v = grid.at(t.r, t.c);
    if (grid.is_nodata(v)) return std::nullopt;  // nodata poisons the sample
    sum += t.w * v;
  }
  return sum;
}

std::optional<double> sample_bilinear(const GeoRaster& raster, double x, double y) {
  const PixelPoint p = world_to_pixel(raster.transform, x, y);
  return sample_bilinear_px(raster.grid, p.col, p.row);
}

RasterGrid extract_patch(const RasterGrid& grid, int center_col, int center_row, int size) {
  if (size <= 0) fail("patch size must be positive");
  const int c0 = center_col - size / 2;
  const int r0 = center_row - size / 2;
  if (c0 < 0 || r0 < 0 || c0 + size > grid.width || r0 + size > grid.height)
    fail("patch exceeds raster bounds");
  RasterGrid out(size, size);
  out.nodata = grid.nodata;
  for (int r = 0; r < size; ++r)
    std::memcpy(&out.at(r, 0), &grid.at(r0 + r, c0), static_cast<size_t>(size) * sizeof(float));
  return out;
}

GeoRaster rasterize_points(const std::vector<LidarPoint>& points, double cell_size,
                           RasterAttribute attribute, FillStrategy fill, int fill_radius) {
  if (points.empty()) fail("cannot rasterize an empty point set");
  if (!(cell_size > 0.0)) fail("cell size must be positive");

  double min_x = points[0].x, max_x = points[0].x;
  double min_y = points[0].y, max_y = points[0].y;
  for (const auto& p : points) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const int width = static_cast<int>(std::floor((max_x - min_x) / cell_size)) + 1;
  const int height = static_cast<int>(std::floor((max_y - min_y) / cell_size)) + 1;

  GeoRaster out;
  out.transform.origin_x = min_x;
  out.transform.origin_y = max_y;
  out.transform.pixel_size_x = cell_size;
  out.transform.pixel_size_y = -cell_size;
  out.grid = RasterGrid(width, height, 0.0f);
  out.grid.nodata = -9999.0f;

  std::vector<double> sum(out.grid.pixels.size(), 0.0);
  std::vector<int> count(out.grid.pixels.size(), 0);
  for (const auto& p : points) {
    int col = static_cast<int>((p.x - min_x) / cell_size);
    int row = static_cast<int>((max_y - p.y) / cell_size);
    col = std::clamp(col, 0, width - 1);
    row = std::clamp(row, 0, height - 1);
    const size_t i = static_cast<size_t>(row) * width + col;
    sum[i] += (attribute == RasterAttribute::Intensity) ? p.intensity : p.z;
    count[i] += 1;
  }
  for (size_t i = 0; i < sum.size(); ++i)
    out.grid.pixels[i] = count[i] ? static_cast<float>(sum[i] / count[i]) : *out.grid.nodata;

  // hole filling from occupied neighbors within fill_radius cells
  std::vector<float> filled = out.grid.pixels;
#pragma omp parallel for schedule(dynamic, 16)
  for (int row = 0; row < height; ++row) {
    for (int col = 0; col < width; ++col) {
      const size_t i = static_cast<size_t>(row) * width + col;
      if (count[i]) continue;
      double best_d2 = std::numeric_limits<double>::infinity();
      double best_v = 0.0;
      double wsum = 0.0, vsum = 0.0;
      for (int dr = -fill_radius; dr <= fill_radius; ++dr) {
        for (int dc = -fill_radius; dc <= fill_radius; ++dc) {
          const int r = row + dr, c = col + dc;
          if (r < 0 || r >= height || c < 0 || c >= width) continue;
          const size_t j = static_cast<size_t>(r) * width + c;
          if (!count[j]) continue;
          const double d2 = double(dr) * dr + double(dc) * dc;
          if (d2 > double(fill_radius) * fill_radius) continue;
          if (fill == FillStrategy::Nearest) {
            if (d2 < best_d2 || (d2 == best_d2 && out.grid.pixels[j] < best_v)) {
              best_d2 = d2;
              best_v = out.grid.pixels[j];
            }
          } else {
            const double w = 1.0 / d2;
            wsum += w;
            vsum += w * out.grid.pixels[j];
          }
        }
      }
      if (fill == FillStrategy::Nearest && std::isfinite(best_d2))
        filled[i] = static_cast<float>(best_v);
      else if (fill == FillStrategy::InverseDistance && wsum > 0.0)
        filled[i] = static_cast<float>(vsum / wsum);
    }
  }
  out.grid.pixels = std::move(filled);
  return out;
}

double mean_valid(const GeoRaster& raster) {
  double sum = 0.0;
  size_t n = 0;
  for (float v : raster.grid.pixels) {
    if (raster.grid.is_nodata(v)) continue;
    sum += v;
    ++n;
  }
  if (n == 0) fail("raster holds no valid samples");
  return sum / static_cast<double>(n);
}

WorldExtent world_extent(const GeoRaster& raster) {
  const auto a = pixel_to_world(raster.transform, -0.5, -0.5);
  const auto b = pixel_to_world(raster.transform, raster.grid.width - 0.5, raster.grid.height - 0.5);
  return {std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x), std::max(a.y, b.y)};
}

}  // namespace lidreg
