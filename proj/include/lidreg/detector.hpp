#pragma once

#include <string>
#include <vector>

#include "lidreg/raster.hpp"

namespace lidreg {

struct InterestPoint {
  int col = 0;
  int row = 0;
  double score = 0.0;
};

struct DetectorParams {
  int grid_n = 20;              // cells per side
  int k_per_cell = 1;           // points kept per cell
  double fast_threshold = 20.0; // on an 8-bit intensity scale

  void validate() const;
};

/// FAST-9 segment-test score at one pixel: 0 unless some contiguous arc of
/// >= 9 circle pixels is entirely brighter than center+threshold or entirely
/// darker than center-threshold; then the sum of |circle - center| over that
/// arc. The pixel must be at least 3 pixels from every image border.
double fast_score(const RasterGrid& grid, int col, int row, double threshold);

/// Partitioned detection: the image is split into grid_n x grid_n cells
/// (remainder pixels join the last cell per axis) and the k_per_cell highest
/// strictly-positive scores are kept per cell. Output is ordered by
/// (cell row, cell col, score desc), ties by (row, col) ascending.
std::vector<InterestPoint> detect_partitioned(const RasterGrid& grid, const DetectorParams& params);

/// CSV lines "col,row,score".
void write_interest_points_csv(const std::vector<InterestPoint>& points, const std::string& path);

}  // namespace lidreg
