#pragma once

#include <string>
#include <vector>

#include "lidreg/cfog.hpp"
#include "lidreg/control_point.hpp"
#include "lidreg/detector.hpp"
#include "lidreg/geometry.hpp"
#include "lidreg/raster.hpp"

namespace lidreg {

/// 2D similarity surface with offset (0,0) at the surface center
/// (center_col/center_row); surface(center + d) scores displacement d.
struct CorrelationSurface {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  CorrelationSurface() = default;
  CorrelationSurface(int w, int h) : width(w), height(h), values(static_cast<size_t>(w) * h, 0.0) {}

  int center_col() const { return width / 2; }
  int center_row() const { return height / 2; }
  double at(int row, int col) const { return values[static_cast<size_t>(row) * width + col]; }
  double& at(int row, int col) { return values[static_cast<size_t>(row) * width + col]; }
  double at_offset(int dx, int dy) const { return at(center_row() + dy, center_col() + dx); }

  struct Peak {
    int col = 0;
    int row = 0;
    int dx = 0;  // col - center_col
    int dy = 0;
    double value = 0.0;
  };
  Peak find_peak() const;
  /// Highest value outside the (2*exclusion+1)^2 box around the peak.
  double second_peak(const Peak& p, int exclusion = 2) const;
};

/// 3D phase correlation of two equal-shape descriptor volumes: forward 3D
/// FFTs, magnitude-normalized cross power spectrum (epsilon floor), inverse
/// 3D FFT, then the correlation volume is summed over the channel axis and
/// circularly recentered. A shift of volA by (dx,dy) producing volB peaks at
/// offset (dx,dy).
CorrelationSurface phase_correlate(const DescriptorVolume& volA, const DescriptorVolume& volB,
                                   double epsilon = 1e-12);

struct SubpixelOffset {
  double dx = 0.0;
  double dy = 0.0;
};

/// Two-point ratio refinement (per axis, toward the larger neighbor), with a
/// parabolic fallback when the ratio leaves (-1, 1). Returns the fractional
/// correction to add to the integer peak. Throws on a border peak.
SubpixelOffset subpixel_peak(const CorrelationSurface& surface, int peak_col, int peak_row);

/// Parabolic 3-point vertex per axis; used for the spatial baselines.
SubpixelOffset subpixel_parabolic(const CorrelationSurface& surface, int peak_col, int peak_row);

/// Normalized cross correlation of the template at every valid placement in
/// the search window; the centered placement maps to offset (0,0).
CorrelationSurface ncc_map(const RasterGrid& tmpl, const RasterGrid& search);

/// Shannon mutual information (natural log) of the template against each
/// co-located window, from a bins x bins joint histogram.
CorrelationSurface mi_map(const RasterGrid& tmpl, const RasterGrid& search, int bins = 32);

enum class MatchMetric { CfogPc, Ncc, Mi };

struct MatchParams {
  int template_size = 200;
  int search_radius = 50;        // admissible |offset| bound, pixels
  double min_confidence = 1.3;   // peak to second-peak ratio; 0 disables the gate
  bool subpixel = true;
  MatchMetric metric = MatchMetric::CfogPc;
  CfogParams cfog;
  bool raised_cosine = false;
  double epsilon = 1e-12;
  int mi_bins = 32;
  double min_valid_fraction = 0.7;  // required non-nodata share per patch

  void validate() const;
};

struct MatchCandidate {
  int aerial_col = 0;
  int aerial_row = 0;
  double ground_X = 0.0;
  double ground_Y = 0.0;
  double ground_Z = 0.0;
  double offset_dx = 0.0;
  double offset_dy = 0.0;
  double peak = 0.0;
  double confidence = 0.0;
  bool accepted = false;
  std::string reject_reason;
};

/// One interest point through the template-match scheme: rectify a
/// (template_size + 2*search_radius) ground window around the point's
/// predicted ground location, build both descriptor volumes, correlate,
/// gate on offset bound and confidence, and read ground coordinates off the
/// matched LiDAR cell. Failures mark the candidate rejected, never throw.
MatchCandidate match_point(const RasterGrid& aerial, const CameraPose& pose,
                           const CameraIntrinsics& intr, const GeoRaster& lidar_intensity,
                           const GeoRaster& dsm, const InterestPoint& pt,
                           const MatchParams& params);

/// match_point over all interest points (parallel, output ordered by input
/// index); accepted candidates become control points. Optionally exposes the
/// full candidate list.
std::vector<ControlPoint> run_matching(const RasterGrid& aerial, const CameraPose& pose,
                                       const CameraIntrinsics& intr,
                                       const GeoRaster& lidar_intensity, const GeoRaster& dsm,
                                       const std::vector<InterestPoint>& points,
                                       const MatchParams& params,
                                       std::vector<MatchCandidate>* candidates_out = nullptr);

/// CSV rows "aerial_col,aerial_row,ground_X,ground_Y,ground_Z,offset_dx,
/// offset_dy,peak,confidence" for the accepted candidates.
void write_control_points_csv(const std::vector<MatchCandidate>& candidates,
                              const std::string& path);

/// Wraps a surface in the raster container so dumps share the grid format;
/// the georeferencing is set up so world coordinates equal offsets.
GeoRaster surface_to_raster(const CorrelationSurface& surface);

}  // namespace lidreg
