#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace lidreg {

/// Single-band raster, row-major float samples.
struct RasterGrid {
  int width = 0;
  int height = 0;
  std::vector<float> pixels;
  std::optional<float> nodata;

  RasterGrid() = default;
  RasterGrid(int w, int h, float fill = 0.0f)
      : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

  float at(int row, int col) const { return pixels[static_cast<size_t>(row) * width + col]; }
  float& at(int row, int col) { return pixels[static_cast<size_t>(row) * width + col]; }

  bool in_bounds(int row, int col) const {
    return row >= 0 && row < height && col >= 0 && col < width;
  }

  bool is_nodata(float v) const {
    if (!nodata) return false;
    if (std::isnan(*nodata)) return std::isnan(v);
    return v == *nodata;
  }

  /// Throws if pixel count mismatches the extent or a non-nodata sample is not finite.
  void validate() const;
};

/// Affine georeferencing. World coordinate of pixel (col,row) is the cell
/// center, i.e. the affine map evaluated at (col+0.5, row+0.5). Rotation
/// terms are carried but fixed at 0 (north-up only).
struct GeoTransform {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double pixel_size_x = 1.0;   // > 0
  double pixel_size_y = -1.0;  // < 0 for north-up
  double rot_x = 0.0;
  double rot_y = 0.0;
};

struct WorldPoint {
  double x = 0.0;
  double y = 0.0;
};

struct PixelPoint {
  double col = 0.0;
  double row = 0.0;
};

WorldPoint pixel_to_world(const GeoTransform& t, double col, double row);
PixelPoint world_to_pixel(const GeoTransform& t, double x, double y);

struct GeoRaster {
  RasterGrid grid;
  GeoTransform transform;
  std::string crs_tag;

  WorldPoint pixel_to_world(double col, double row) const {
    return lidreg::pixel_to_world(transform, col, row);
  }
  PixelPoint world_to_pixel(double x, double y) const {
    return lidreg::world_to_pixel(transform, x, y);
  }
};

struct LidarPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;
};

enum class RasterAttribute { Intensity, Elevation };
enum class FillStrategy { Nearest, InverseDistance };

/// Loads either the native container (raw float32 payload + text sidecar
/// header at <path>.hdr) or a binary PGM (8/16-bit, optional world file).
GeoRaster load_raster(const std::string& path);

/// Writes the native container; round-trips float samples bit-exactly.
void save_raster(const GeoRaster& raster, const std::string& path);

/// 8-bit binary PGM; values are clamped to [0,255] and rounded.
void write_pgm8(const RasterGrid& grid, const std::string& path);

/// ASCII "x y z intensity" lines, '#' comments and blank lines ignored.
std::vector<LidarPoint> load_point_cloud(const std::string& path);

/// Bilinear interpolation of the four neighbors at a world coordinate.
/// Returns nullopt outside the grid or when any contributing neighbor is nodata.
std::optional<double> sample_bilinear(const GeoRaster& raster, double x, double y);

/// Same, in fractional pixel coordinates (integer coordinates are pixel centers).
std::optional<double> sample_bilinear_px(const RasterGrid& grid, double col, double row);

/// size x size window centered on (center_col, center_row); throws if any
/// part falls outside the grid.
RasterGrid extract_patch(const RasterGrid& grid, int center_col, int center_row, int size);

/// Grids a point cloud over its bounding box. Cells take the mean of the
/// selected attribute over the points they contain; empty cells are filled
/// from neighbors within fill_radius cells, else set to nodata.
GeoRaster rasterize_points(const std::vector<LidarPoint>& points, double cell_size,
                           RasterAttribute attribute, FillStrategy fill = FillStrategy::Nearest,
                           int fill_radius = 3);

/// Mean over valid (non-nodata) samples; throws if none.
double mean_valid(const GeoRaster& raster);

/// Whole-raster world extent: [min_x, max_x] x [min_y, max_y].
struct WorldExtent {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  bool contains(double x, double y) const {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }
};
WorldExtent world_extent(const GeoRaster& raster);

}  // namespace lidreg
