#pragma once

namespace lidreg {

/// A matched correspondence: aerial image coordinates paired with ground
/// coordinates read from the LiDAR layers. Residual and inlier flag are
/// filled in by the resection stage. The residual is the RMS of the two
/// pixel-axis reprojection errors, so the reported RMSE is simultaneously
/// the RMS of the per-point residuals and the per-coordinate RMS error.
struct ControlPoint {
  double aerial_col = 0.0;
  double aerial_row = 0.0;
  double ground_X = 0.0;
  double ground_Y = 0.0;
  double ground_Z = 0.0;
  double residual = 0.0;
  bool inlier = true;
};

}  // namespace lidreg
