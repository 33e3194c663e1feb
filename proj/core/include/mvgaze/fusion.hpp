#pragma once

#include <vector>

#include "mvgaze/calibration.hpp"

namespace mvgaze {

enum class FusionMethod { simple, head_pose, behavior, best_camera };

/// Calibrated output of one sensor for one frame.
struct SensorOutput {
    SensorId sensor;
    Vec2 por = Vec2::Zero();  // screen mm, bias-corrected
    bool available = false;
    double head_yaw_deg = 0.0;  // yaw toward this sensor's camera
};

struct FusedGaze {
    Vec2 por = Vec2::Zero();
    bool available = false;
    std::vector<double> weights;  // parallel to the input outputs, 0 when unavailable
};

/// Unweighted mean of the available outputs.
FusedGaze fuse_simple(const std::vector<SensorOutput>& outputs);

/// Head-pose weighting: lambda = (alpha_max - |yaw|)/alpha_max clamped to
/// [0,1], shared by both eyes of a camera, normalized over available
/// sensors. Falls back to simple averaging when every lambda is zero.
FusedGaze fuse_head_pose(const std::vector<SensorOutput>& outputs, double alpha_max_deg = 45.0);

/// Gazing-behavior weighting: an initial simple average anchors a lookup in
/// each sensor's weight map; looked-up weights are renormalized over the
/// available sensors. `maps` is parallel to `outputs`.
FusedGaze fuse_behavior(const std::vector<SensorOutput>& outputs,
                        const std::vector<const WeightMap*>& maps, const Screen& screen);

/// Use only the camera with the best (smallest) head yaw; its available
/// eyes are averaged.
FusedGaze fuse_best_camera(const std::vector<SensorOutput>& outputs);

}  // namespace mvgaze
