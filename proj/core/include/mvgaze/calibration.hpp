#pragma once

#include <vector>

#include "mvgaze/estimator.hpp"

namespace mvgaze {

/// One calibration observation: an uncalibrated estimate and the target the
/// eye was actually gazing at (both in screen mm).
struct CalibrationSample {
    Vec2 raw = Vec2::Zero();
    Vec2 target = Vec2::Zero();
    int point_index = 0;
    int frame_index = 0;
};

enum class FitOrder { affine, quadratic };

/// Per-sensor bias-correction map F, fitted by ridge-regularized least
/// squares. Affine uses features [1, x, y]; quadratic adds [x^2, y^2, x*y].
struct CalibrationModel {
    FitOrder order = FitOrder::affine;
    Eigen::MatrixXd coeffs;  // (n_features x 2), column per output coordinate
    double lambda = 0.0;
    double rms_residual_mm = 0.0;
    bool fitted = false;
};

Result<CalibrationModel> fit_bias_correction(const std::vector<CalibrationSample>& samples,
                                             double lambda, FitOrder order);

Vec2 apply_bias_correction(const CalibrationModel& model, const Vec2& raw);

/// Reliability statistics of one sensor at one calibration point.
struct PointStats {
    double mean_error_deg = 0.0;
    double availability = 0.0;  // available frames / frames shown
    int n_samples = 0;
};

struct CalibratedSample {
    Vec2 por = Vec2::Zero();
    Vec2 target = Vec2::Zero();
    int point_index = 0;
};

/// Mean angular error and availability per calibration point for one
/// sensor. `frames_per_point` is the number of frames each point was shown.
std::vector<PointStats> compute_point_stats(const std::vector<CalibratedSample>& samples,
                                            int n_points, int frames_per_point,
                                            const Vec3& eye_position);

/// Per-sensor fusion-weight surface over the screen, sampled on a regular
/// grid with bilinear lookup. Across sensors the values sum to 1 at every
/// node.
struct WeightMap {
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;  // screen rectangle, mm
    int nx = 65, ny = 41;
    std::vector<double> values;  // row-major, ny rows of nx

    double at(int ix, int iy) const { return values[size_t(iy) * nx + ix]; }
    double& at(int ix, int iy) { return values[size_t(iy) * nx + ix]; }
    double lookup(const Vec2& p) const;  // bilinear, clamped to the rectangle
};

/// Build one weight map per sensor from per-point reliability statistics.
/// `stats[s][k]` belongs to sensor s at calibration point k; the targets
/// must form a 3x3 grid. Scores availability/(error + 0.05 deg) are
/// normalized across sensors per point, interpolated bilinearly over the
/// knot grid with clamp extrapolation, then renormalized per node.
Result<std::vector<WeightMap>> build_weight_maps(
    const std::vector<std::vector<PointStats>>& stats,
    const std::vector<Vec2>& calibration_targets, const Screen& screen,
    int grid_nx = 65, int grid_ny = 41);

}  // namespace mvgaze
