#pragma once

#include <string>
#include <vector>

#include "lidreg/raster.hpp"

namespace lidreg {

/// Dense per-pixel descriptor volume: m oriented-gradient channels per pixel.
/// Storage is channel-major so each channel is a contiguous plane.
struct DescriptorVolume {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> values;

  DescriptorVolume() = default;
  DescriptorVolume(int w, int h, int m)
      : width(w), height(h), channels(m),
        values(static_cast<size_t>(w) * h * m, 0.0) {}

  size_t plane() const { return static_cast<size_t>(width) * height; }
  size_t index(int row, int col, int ch) const {
    return (static_cast<size_t>(ch) * height + row) * width + col;
  }
  double at(int row, int col, int ch) const { return values[index(row, col, ch)]; }
  double& at(int row, int col, int ch) { return values[index(row, col, ch)]; }
};

struct CfogParams {
  int m = 9;                       // orientation channels over [0, 180)
  double sigma = 0.8;              // Gaussian std-dev for the X/Y smoothing, pixels
  bool normalize_per_pixel = true; // unit-L2 channel vector per pixel

  void validate() const;
};

struct GradientPair {
  int width = 0;
  int height = 0;
  std::vector<double> gx;
  std::vector<double> gy;
};

/// Sobel 3x3 derivatives with edge replication.
GradientPair gradients(const RasterGrid& grid);

/// Channel i holds |cos(theta_i) gx + sin(theta_i) gy| with theta_i = i*180/m
/// degrees; the absolute value folds opposite gradient polarities together.
DescriptorVolume oriented_channels(const GradientPair& g, int m);

/// Separable smoothing: 1D Gaussian (radius ceil(3*sigma), edge replication)
/// along X then Y, then circular (1,2,1)/4 along the channel axis.
DescriptorVolume smooth_volume(const DescriptorVolume& vol, double sigma);

/// gradients -> oriented_channels -> smooth_volume -> optional L2 normalization.
DescriptorVolume build_cfog(const RasterGrid& grid, const CfogParams& params = {});

/// Scales each pixel's channel vector to unit L2 norm (zero vectors stay zero).
void l2_normalize_pixels(DescriptorVolume& vol);

/// Separable raised-cosine taper toward the X/Y borders (off by default in
/// matching; exposed for experiments).
void apply_raised_cosine_window(DescriptorVolume& vol);

/// Binary dump: three uint32 (width, height, m) then float32 payload,
/// channel-major, little-endian.
void write_volume_dump(const DescriptorVolume& vol, const std::string& path);
DescriptorVolume read_volume_dump(const std::string& path);

}  // namespace lidreg
