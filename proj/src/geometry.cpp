#include "lidreg/geometry.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lidreg {

namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kZTolerance = 0.01;  // meters
constexpr int kMaxRayIterations = 50;

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

struct Vec3 {
  double x, y, z;
};

Vec3 rotate(const RotationMatrix& R, const Vec3& v) {
  return {R.m[0][0] * v.x + R.m[0][1] * v.y + R.m[0][2] * v.z,
          R.m[1][0] * v.x + R.m[1][1] * v.y + R.m[1][2] * v.z,
          R.m[2][0] * v.x + R.m[2][1] * v.y + R.m[2][2] * v.z};
}

}  // namespace

void CameraIntrinsics::validate() const {
  if (!(f > 0.0)) fail("focal length must be positive");
  if (!(pixel_size > 0.0)) fail("pixel size must be positive");
  if (image_width > 0 && image_height > 0) {
    if (principal_col < 0 || principal_col > image_width || principal_row < 0 ||
        principal_row > image_height)
      fail("principal point outside the image");
  }
}

RotationMatrix rotation_from_angles(double phi, double omega, double kappa) {
  const double cp = std::cos(phi), sp = std::sin(phi);
  const double co = std::cos(omega), so = std::sin(omega);
  const double ck = std::cos(kappa), sk = std::sin(kappa);
  // R_Y(phi) * R_X(omega) * R_Z(kappa)
  RotationMatrix R;
  R.m[0][0] = cp * ck + sp * so * sk;
  R.m[0][1] = -cp * sk + sp * so * ck;
  R.m[0][2] = sp * co;
  R.m[1][0] = co * sk;
  R.m[1][1] = co * ck;
  R.m[1][2] = -so;
  R.m[2][0] = -sp * ck + cp * so * sk;
  R.m[2][1] = sp * sk + cp * so * ck;
  R.m[2][2] = cp * co;
  return R;
}

void angles_from_rotation(const RotationMatrix& R, double& phi, double& omega, double& kappa) {
  omega = std::asin(-R.m[1][2]);
  phi = std::atan2(R.m[0][2], R.m[2][2]);
  kappa = std::atan2(R.m[1][0], R.m[1][1]);
}

ImageProjection project_ground_to_image(const CameraPose& pose, const CameraIntrinsics& intr,
                                        double X, double Y, double Z) {
  const RotationMatrix R = rotation_from_angles(pose.phi, pose.omega, pose.kappa);
  const double dX = X - pose.Xs, dY = Y - pose.Ys, dZ = Z - pose.Zs;
  const double u = R.a1() * dX + R.b1() * dY + R.c1() * dZ;
  const double v = R.a2() * dX + R.b2() * dY + R.c2() * dZ;
  const double w = R.a3() * dX + R.b3() * dY + R.c3() * dZ;
  if (w >= -1e-12) fail("point at or behind the projection plane");

  ImageProjection p;
  p.x = -intr.f * u / w;
  p.y = -intr.f * v / w;
  p.col = intr.principal_col + p.x / intr.pixel_size;
  p.row = intr.principal_row - p.y / intr.pixel_size;
  return p;
}

GroundPoint image_to_ground(const CameraPose& pose, const CameraIntrinsics& intr, double col,
                            double row, const GeoRaster& dsm, double start_elevation) {
  const RotationMatrix R = rotation_from_angles(pose.phi, pose.omega, pose.kappa);
  const double x = (col - intr.principal_col) * intr.pixel_size;
  const double y = (intr.principal_row - row) * intr.pixel_size;
  const Vec3 dir = rotate(R, {x, y, -intr.f});
  if (dir.z >= 0.0) fail("ray leaves DSM extent (not descending)");

  const WorldExtent ext = world_extent(dsm);
  double z = std::isnan(start_elevation) ? mean_valid(dsm) : start_elevation;
  for (int it = 1; it <= kMaxRayIterations; ++it) {
    const double s = (z - pose.Zs) / dir.z;
    const double X = pose.Xs + s * dir.x;
    const double Y = pose.Ys + s * dir.y;
    if (!ext.contains(X, Y)) fail("ray leaves DSM extent");
    const auto zs = sample_bilinear(dsm, X, Y);
    if (!zs) fail("DSM nodata at ray landing cell");
    if (std::abs(*zs - z) < kZTolerance) {
      const double s2 = (*zs - pose.Zs) / dir.z;
      return {pose.Xs + s2 * dir.x, pose.Ys + s2 * dir.y, *zs, it};
    }
    z = *zs;
  }
  fail("ray/DSM intersection did not converge");
}

GeoRaster rectify_to_grid(const RasterGrid& aerial, const CameraPose& pose,
                          const CameraIntrinsics& intr, const GeoRaster& dsm,
                          const GeoTransform& target, int width, int height) {
  intr.validate();
  GeoRaster out;
  out.transform = target;
  out.crs_tag = dsm.crs_tag;
  out.grid = RasterGrid(width, height, 0.0f);
  out.grid.nodata = std::numeric_limits<float>::quiet_NaN();

#pragma omp parallel for schedule(dynamic, 8)
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const WorldPoint g = pixel_to_world(target, c, r);
      const auto z = sample_bilinear(dsm, g.x, g.y);
      float value = *out.grid.nodata;
      if (z) {
        try {
          const ImageProjection p = project_ground_to_image(pose, intr, g.x, g.y, *z);
          if (const auto s = sample_bilinear_px(aerial, p.col, p.row))
            value = static_cast<float>(*s);
        } catch (const std::runtime_error&) {
          // behind the camera: leave nodata
        }
      }
      out.grid.at(r, c) = value;
    }
  }
  return out;
}

GeoRaster rectify_patch(const RasterGrid& aerial, const CameraPose& pose,
                        const CameraIntrinsics& intr, const GeoRaster& dsm, double center_X,
                        double center_Y, int out_size, double gsd) {
  if (out_size < 1) fail("rectified patch size must be >= 1");
  if (!(gsd > 0.0)) fail("gsd must be positive");

  const int k0 = out_size / 2;
  GeoTransform t;
  t.origin_x = center_X - (k0 + 0.5) * gsd;
  t.origin_y = center_Y + (k0 + 0.5) * gsd;
  t.pixel_size_x = gsd;
  t.pixel_size_y = -gsd;

  const WorldExtent ext = world_extent(dsm);
  const double x0 = t.origin_x, x1 = t.origin_x + out_size * gsd;
  const double y1 = t.origin_y, y0 = t.origin_y - out_size * gsd;
  if (!ext.contains(x0, y0) || !ext.contains(x1, y1))
    fail("rectification window outside DSM extent");

  return rectify_to_grid(aerial, pose, intr, dsm, t, out_size, out_size);
}

Camera load_camera(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("missing file: " + path);
  std::map<std::string, double> kv;
  std::string key;
  double value;
  while (in >> key >> value) kv[key] = value;

  auto need = [&](const std::string& k) {
    const auto it = kv.find(k);
    if (it == kv.end()) fail("camera file missing key '" + k + "': " + path);
    return it->second;
  };

  Camera cam;
  cam.intrinsics.f = need("f_m");
  cam.intrinsics.pixel_size = need("pixel_size_m");
  cam.intrinsics.principal_col = need("principal_col");
  cam.intrinsics.principal_row = need("principal_row");
  cam.intrinsics.image_width = static_cast<int>(need("image_width"));
  cam.intrinsics.image_height = static_cast<int>(need("image_height"));
  cam.pose.Xs = need("Xs_m");
  cam.pose.Ys = need("Ys_m");
  cam.pose.Zs = need("Zs_m");
  cam.pose.phi = need("phi_deg") * kDegToRad;
  cam.pose.omega = need("omega_deg") * kDegToRad;
  cam.pose.kappa = need("kappa_deg") * kDegToRad;
  cam.intrinsics.validate();
  return cam;
}

void save_camera(const Camera& cam, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail("cannot write " + path);
  out.precision(17);
  out << "f_m " << cam.intrinsics.f << "\n";
  out << "pixel_size_m " << cam.intrinsics.pixel_size << "\n";
  out << "principal_col " << cam.intrinsics.principal_col << "\n";
  out << "principal_row " << cam.intrinsics.principal_row << "\n";
  out << "image_width " << cam.intrinsics.image_width << "\n";
  out << "image_height " << cam.intrinsics.image_height << "\n";
  out << "Xs_m " << cam.pose.Xs << "\n";
  out << "Ys_m " << cam.pose.Ys << "\n";
  out << "Zs_m " << cam.pose.Zs << "\n";
  out << "phi_deg " << cam.pose.phi / kDegToRad << "\n";
  out << "omega_deg " << cam.pose.omega / kDegToRad << "\n";
  out << "kappa_deg " << cam.pose.kappa / kDegToRad << "\n";
}

}  // namespace lidreg
