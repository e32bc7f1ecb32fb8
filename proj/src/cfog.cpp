#include "lidreg/cfog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>

namespace lidreg {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

}  // namespace

void CfogParams::validate() const {
  if (m < 2) fail("CFOG needs at least 2 orientation channels");
  if (!(sigma > 0.0)) fail("CFOG sigma must be positive");
}

GradientPair gradients(const RasterGrid& grid) {
  if (grid.width < 3 || grid.height < 3) fail("gradients need at least a 3x3 grid");
  const int w = grid.width, h = grid.height;
  GradientPair g;
  g.width = w;
  g.height = h;
  g.gx.assign(static_cast<size_t>(w) * h, 0.0);
  g.gy.assign(static_cast<size_t>(w) * h, 0.0);

#pragma omp parallel for schedule(static)
  for (int r = 0; r < h; ++r) {
    const int rm = std::max(r - 1, 0), rp = std::min(r + 1, h - 1);
    for (int c = 0; c < w; ++c) {
      const int cm = std::max(c - 1, 0), cp = std::min(c + 1, w - 1);
      const double p00 = grid.at(rm, cm), p01 = grid.at(rm, c), p02 = grid.at(rm, cp);
      const double p10 = grid.at(r, cm), p12 = grid.at(r, cp);
      const double p20 = grid.at(rp, cm), p21 = grid.at(rp, c), p22 = grid.at(rp, cp);
      const size_t i = static_cast<size_t>(r) * w + c;
      g.gx[i] = (p02 + 2.0 * p12 + p22) - (p00 + 2.0 * p10 + p20);
      g.gy[i] = (p20 + 2.0 * p21 + p22) - (p00 + 2.0 * p01 + p02);
    }
  }
  return g;
}

DescriptorVolume oriented_channels(const GradientPair& g, int m) {
  if (g.gx.size() != g.gy.size() || g.gx.size() != static_cast<size_t>(g.width) * g.height)
    fail("gradient shape mismatch");
  DescriptorVolume vol(g.width, g.height, m);
  const size_t n = vol.plane();

#pragma omp parallel for schedule(static)
  for (int ch = 0; ch < m; ++ch) {
    const double theta = ch * M_PI / m;
    const double ct = std::cos(theta), st = std::sin(theta);
    double* plane = vol.values.data() + static_cast<size_t>(ch) * n;
    for (size_t i = 0; i < n; ++i) plane[i] = std::abs(ct * g.gx[i] + st * g.gy[i]);
  }
  return vol;
}

DescriptorVolume smooth_volume(const DescriptorVolume& vol, double sigma) {
  const int w = vol.width, h = vol.height, m = vol.channels;
  const std::vector<double> k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);

  DescriptorVolume tmp(w, h, m), out(w, h, m);

  // X pass, edge replication
#pragma omp parallel for schedule(static) collapse(2)
  for (int ch = 0; ch < m; ++ch) {
    for (int r = 0; r < h; ++r) {
      const double* src = vol.values.data() + (static_cast<size_t>(ch) * h + r) * w;
      double* dst = tmp.values.data() + (static_cast<size_t>(ch) * h + r) * w;
      for (int c = 0; c < w; ++c) {
        double s = 0.0;
        for (int t = -radius; t <= radius; ++t)
          s += k[t + radius] * src[std::clamp(c + t, 0, w - 1)];
        dst[c] = s;
      }
    }
  }

  // Y pass
#pragma omp parallel for schedule(static) collapse(2)
  for (int ch = 0; ch < m; ++ch) {
    for (int r = 0; r < h; ++r) {
      const double* base = tmp.values.data() + static_cast<size_t>(ch) * h * w;
      double* dst = out.values.data() + (static_cast<size_t>(ch) * h + r) * w;
      for (int c = 0; c < w; ++c) {
        double s = 0.0;
        for (int t = -radius; t <= radius; ++t)
          s += k[t + radius] * base[static_cast<size_t>(std::clamp(r + t, 0, h - 1)) * w + c];
        dst[c] = s;
      }
    }
  }

  // circular (1,2,1)/4 along the channel axis (orientation is periodic mod 180)
  DescriptorVolume z(w, h, m);
  const size_t plane = out.plane();
#pragma omp parallel for schedule(static)
  for (int ch = 0; ch < m; ++ch) {
    const double* prev = out.values.data() + static_cast<size_t>((ch + m - 1) % m) * plane;
    const double* cur = out.values.data() + static_cast<size_t>(ch) * plane;
    const double* next = out.values.data() + static_cast<size_t>((ch + 1) % m) * plane;
    double* dst = z.values.data() + static_cast<size_t>(ch) * plane;
    for (size_t i = 0; i < plane; ++i) dst[i] = 0.25 * prev[i] + 0.5 * cur[i] + 0.25 * next[i];
  }
  return z;
}

void l2_normalize_pixels(DescriptorVolume& vol) {
  const size_t plane = vol.plane();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < vol.height; ++r) {
    for (int c = 0; c < vol.width; ++c) {
      const size_t base = static_cast<size_t>(r) * vol.width + c;
      double norm2 = 0.0;
      for (int ch = 0; ch < vol.channels; ++ch) {
        const double v = vol.values[base + ch * plane];
        norm2 += v * v;
      }
      if (norm2 <= 0.0) continue;
      const double inv = 1.0 / std::sqrt(norm2);
      for (int ch = 0; ch < vol.channels; ++ch) vol.values[base + ch * plane] *= inv;
    }
  }
}

DescriptorVolume build_cfog(const RasterGrid& grid, const CfogParams& params) {
  params.validate();
  DescriptorVolume vol = smooth_volume(oriented_channels(gradients(grid), params.m), params.sigma);
  if (params.normalize_per_pixel) l2_normalize_pixels(vol);
  return vol;
}

void apply_raised_cosine_window(DescriptorVolume& vol) {
  std::vector<double> wx(vol.width), wy(vol.height);
  for (int c = 0; c < vol.width; ++c)
    wx[c] = 0.5 - 0.5 * std::cos(2.0 * M_PI * (c + 0.5) / vol.width);
  for (int r = 0; r < vol.height; ++r)
    wy[r] = 0.5 - 0.5 * std::cos(2.0 * M_PI * (r + 0.5) / vol.height);
  const size_t plane = vol.plane();
#pragma omp parallel for schedule(static)
  for (int ch = 0; ch < vol.channels; ++ch) {
    double* p = vol.values.data() + static_cast<size_t>(ch) * plane;
    for (int r = 0; r < vol.height; ++r)
      for (int c = 0; c < vol.width; ++c) p[static_cast<size_t>(r) * vol.width + c] *= wy[r] * wx[c];
  }
}

void write_volume_dump(const DescriptorVolume& vol, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("cannot write " + path);
  const uint32_t hdr[3] = {static_cast<uint32_t>(vol.width), static_cast<uint32_t>(vol.height),
                           static_cast<uint32_t>(vol.channels)};
  out.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
  std::vector<float> payload(vol.values.size());
  for (size_t i = 0; i < payload.size(); ++i) payload[i] = static_cast<float>(vol.values[i]);
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(float)));
  if (!out) fail("write failed: " + path);
}

DescriptorVolume read_volume_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("missing file: " + path);
  uint32_t hdr[3];
  in.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
  if (!in) fail("malformed volume dump: " + path);
  DescriptorVolume vol(static_cast<int>(hdr[0]), static_cast<int>(hdr[1]),
                       static_cast<int>(hdr[2]));
  std::vector<float> payload(vol.values.size());
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size() * sizeof(float)));
  if (!in) fail("short volume dump payload: " + path);
  for (size_t i = 0; i < payload.size(); ++i) vol.values[i] = payload[i];
  return vol;
}

}  // namespace lidreg
