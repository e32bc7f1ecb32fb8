#pragma once

#include <limits>
#include <string>

#include "lidreg/raster.hpp"

namespace lidreg {

/// Exterior orientation: projection center and phi-omega-kappa angles (radians).
struct CameraPose {
  double Xs = 0.0;
  double Ys = 0.0;
  double Zs = 0.0;
  double phi = 0.0;
  double omega = 0.0;
  double kappa = 0.0;
};

/// Interior orientation. Image-plane axes are x right / y up; pixel rows
/// grow downward, so the y sign flips exactly once, in the pixel conversion.
struct CameraIntrinsics {
  double f = 0.1;              // focal length, meters
  double pixel_size = 1e-5;    // meters per sensor pixel
  double principal_col = 0.0;
  double principal_row = 0.0;
  int image_width = 0;
  int image_height = 0;

  void validate() const;
};

/// R = R_Y(phi) * R_X(omega) * R_Z(kappa), row-major. The collinearity
/// coefficients a_i/b_i/c_i are the rows in classical labeling: a* = row 0,
/// b* = row 1, c* = row 2 (so the x numerator uses column 1: a1, b1, c1).
struct RotationMatrix {
  double m[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  double a1() const { return m[0][0]; }
  double a2() const { return m[0][1]; }
  double a3() const { return m[0][2]; }
  double b1() const { return m[1][0]; }
  double b2() const { return m[1][1]; }
  double b3() const { return m[1][2]; }
  double c1() const { return m[2][0]; }
  double c2() const { return m[2][1]; }
  double c3() const { return m[2][2]; }
};

RotationMatrix rotation_from_angles(double phi, double omega, double kappa);
void angles_from_rotation(const RotationMatrix& R, double& phi, double& omega, double& kappa);

struct ImageProjection {
  double x = 0.0;    // image plane, meters
  double y = 0.0;
  double col = 0.0;  // pixels
  double row = 0.0;
};

/// Collinearity projection of a ground point. Throws if the point is at or
/// behind the projection plane.
ImageProjection project_ground_to_image(const CameraPose& pose, const CameraIntrinsics& intr,
                                        double X, double Y, double Z);

struct GroundPoint {
  double X = 0.0;
  double Y = 0.0;
  double Z = 0.0;
  int iterations = 0;
};

/// Casts the pixel ray onto the DSM by fixed-point iteration over the
/// elevation (start at the DSM mean unless start_elevation is given,
/// tolerance 0.01 m, at most 50 rounds).
GroundPoint image_to_ground(const CameraPose& pose, const CameraIntrinsics& intr, double col,
                            double row, const GeoRaster& dsm,
                            double start_elevation = std::numeric_limits<double>::quiet_NaN());

/// Resamples the aerial image onto a north-up ground grid: each target cell
/// reads its elevation from the DSM, projects through the camera and samples
/// the aerial image bilinearly. Cells that project outside the image (or sit
/// on DSM nodata) become NaN nodata.
GeoRaster rectify_to_grid(const RasterGrid& aerial, const CameraPose& pose,
                          const CameraIntrinsics& intr, const GeoRaster& dsm,
                          const GeoTransform& target, int width, int height);

/// out_size x out_size window at ground sample distance gsd centered on
/// (center_X, center_Y); pixel out_size/2 lands exactly on the center.
/// The window must lie inside the DSM extent.
GeoRaster rectify_patch(const RasterGrid& aerial, const CameraPose& pose,
                        const CameraIntrinsics& intr, const GeoRaster& dsm, double center_X,
                        double center_Y, int out_size, double gsd);

struct Camera {
  CameraPose pose;
  CameraIntrinsics intrinsics;
};

/// Key/value text file; angles are stored in degrees, held in radians.
Camera load_camera(const std::string& path);
void save_camera(const Camera& cam, const std::string& path);

}  // namespace lidreg
