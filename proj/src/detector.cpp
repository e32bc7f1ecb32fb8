#include "lidreg/detector.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace lidreg {

namespace {

// Bresenham circle of radius 3, clockwise from 12 o'clock.
constexpr int kCircle[16][2] = {{0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0},  {3, 1},
                                {2, 2},  {1, 3},  {0, 3},  {-1, 3}, {-2, 2}, {-3, 1},
                                {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}};
constexpr int kArcLength = 9;  // FAST-9

// Longest circular run of set flags; returns its start index and length.
void longest_run(const bool flags[16], int& start, int& len) {
  start = 0;
  len = 0;
  if (std::all_of(flags, flags + 16, [](bool b) { return b; })) {
    len = 16;
    return;
  }
  for (int s = 0; s < 16; ++s) {
    if (flags[s] && !flags[(s + 15) % 16]) {  // run start
      int l = 0;
      while (l < 16 && flags[(s + l) % 16]) ++l;
      if (l > len) {
        len = l;
        start = s;
      }
    }
  }
}

}  // namespace

void DetectorParams::validate() const {
  if (grid_n < 1) throw std::invalid_argument("grid_n must be >= 1");
  if (k_per_cell < 1) throw std::invalid_argument("k_per_cell must be >= 1");
  if (!(fast_threshold > 0.0)) throw std::invalid_argument("fast_threshold must be > 0");
}

double fast_score(const RasterGrid& grid, int col, int row, double threshold) {
  if (col < 3 || row < 3 || col >= grid.width - 3 || row >= grid.height - 3)
    throw std::out_of_range("FAST pixel too close to the image border");

  const double center = grid.at(row, col);
  double ring[16];
  bool bright[16], dark[16];
  for (int i = 0; i < 16; ++i) {
    ring[i] = grid.at(row + kCircle[i][1], col + kCircle[i][0]);
    bright[i] = ring[i] > center + threshold;
    dark[i] = ring[i] < center - threshold;
  }

  double best = 0.0;
  for (const bool* flags : {bright, dark}) {
    int start, len;
    longest_run(flags, start, len);
    if (len < kArcLength) continue;
    double sum = 0.0;
    for (int i = 0; i < len; ++i) sum += std::abs(ring[(start + i) % 16] - center);
    best = std::max(best, sum);
  }
  return best;
}

std::vector<InterestPoint> detect_partitioned(const RasterGrid& grid,
                                              const DetectorParams& params) {
  params.validate();
  const int n = params.grid_n;
  if (grid.width < n * 7 || grid.height < n * 7)
    throw std::invalid_argument("image too small for the detection grid");

  const int cell_w = grid.width / n;
  const int cell_h = grid.height / n;
  std::vector<std::vector<InterestPoint>> cells(static_cast<size_t>(n) * n);

#pragma omp parallel for schedule(dynamic)
  for (int ci = 0; ci < n * n; ++ci) {
    const int cr = ci / n, cc = ci % n;
    const int r0 = cr * cell_h, r1 = (cr == n - 1) ? grid.height : (cr + 1) * cell_h;
    const int c0 = cc * cell_w, c1 = (cc == n - 1) ? grid.width : (cc + 1) * cell_w;

    std::vector<InterestPoint> found;
    for (int r = std::max(r0, 3); r < std::min(r1, grid.height - 3); ++r) {
      for (int c = std::max(c0, 3); c < std::min(c1, grid.width - 3); ++c) {
        const double s = fast_score(grid, c, r, params.fast_threshold);
        if (s > 0.0) found.push_back({c, r, s});
      }
    }
    std::sort(found.begin(), found.end(), [](const InterestPoint& a, const InterestPoint& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.row != b.row) return a.row < b.row;
      return a.col < b.col;
    });
    if (found.size() > static_cast<size_t>(params.k_per_cell))
      found.resize(static_cast<size_t>(params.k_per_cell));
    cells[ci] = std::move(found);
  }

  std::vector<InterestPoint> out;
  for (auto& cell : cells) out.insert(out.end(), cell.begin(), cell.end());
  return out;
}

void write_interest_points_csv(const std::vector<InterestPoint>& points, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "col,row,score\n";
  char line[96];
  for (const auto& p : points) {
    std::snprintf(line, sizeof(line), "%d,%d,%.6f\n", p.col, p.row, p.score);
    out << line;
  }
}

}  // namespace lidreg
