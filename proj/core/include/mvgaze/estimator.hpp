#pragma once

#include "mvgaze/scene.hpp"

namespace mvgaze {

/// Uncalibrated point of regard in screen-plane (X, Y) millimeters.
struct RawGaze {
    Vec2 por = Vec2::Zero();
    SensorId sensor;
};

/// Cross-ratio gaze estimate: the glint-to-LED homography applied to the
/// pupil pixel gives the on-screen point of regard.
Result<RawGaze> estimate_raw_por(const FeatureSet& features, const Screen& screen,
                                 const SensorId& sensor = {});

}  // namespace mvgaze
