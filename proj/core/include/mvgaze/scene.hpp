#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "mvgaze/eye_model.hpp"
#include "mvgaze/geometry.hpp"
#include "mvgaze/rng.hpp"

namespace mvgaze {

/// Screen in the z = 0 plane; origin at the midpoint of the bottom edge,
/// +X to the viewer's right, +Y up, +Z toward the user. One LED sits on
/// each corner, ordered TL, TR, BR, BL.
struct Screen {
    double width_mm = 517.0;   // 24-inch 16:10 panel
    double height_mm = 323.0;

    std::array<Vec3, 4> led_positions() const {
        const double w = width_mm / 2.0, h = height_mm;
        return {Vec3(-w, h, 0), Vec3(w, h, 0), Vec3(w, 0, 0), Vec3(-w, 0, 0)};
    }
    std::array<Vec2, 4> led_screen_xy() const {
        const double w = width_mm / 2.0, h = height_mm;
        return {Vec2(-w, h), Vec2(w, h), Vec2(w, 0), Vec2(-w, 0)};
    }
    Vec3 center() const { return Vec3(0, height_mm / 2.0, 0); }
    bool contains(const Vec2& p) const {
        return p.x() >= -width_mm / 2.0 && p.x() <= width_mm / 2.0 && p.y() >= 0 &&
               p.y() <= height_mm;
    }
    Vec2 clamp(const Vec2& p) const {
        return Vec2(std::clamp(p.x(), -width_mm / 2.0, width_mm / 2.0),
                    std::clamp(p.y(), 0.0, height_mm));
    }
};

enum class LayoutCase { case0, case1 };

struct CameraRig {
    std::vector<PinholeCamera> cameras;
    LayoutCase layout = LayoutCase::case1;
};

/// One (camera, eye) pair; each produces an independent gaze output.
struct SensorId {
    int camera = 0;  // index into CameraRig::cameras
    EyeSide eye = EyeSide::left;

    bool operator==(const SensorId&) const = default;
};

enum class InvalidReason { out_of_fov, behind_camera, no_reflection, no_refraction, degenerate };

/// Per-frame, per-sensor observation: four glint pixels in LED order plus
/// the pupil-center pixel.
struct FeatureSet {
    std::array<Vec2, 4> glints{};
    Vec2 pupil = Vec2::Zero();
    bool valid = false;
    InvalidReason invalid_reason = InvalidReason::out_of_fov;
};

/// case0: C cameras in a centered row below the screen, 50 mm spacing.
/// case1: cameras distributed along the screen border (C=1 bottom-center,
/// C=3 bottom/left/right as in the prototype, otherwise uniformly along the
/// perimeter). All cameras are aimed at `aim` (the default eye position).
CameraRig generate_rig(LayoutCase layout, int count, const Screen& screen,
                       double standoff_mm = 50.0,
                       const Vec3& aim = Vec3(0, 200, 600));

/// Glint and pupil pixels for one eye seen by one camera. Solver failures
/// and out-of-bounds projections yield valid = false with a reason.
FeatureSet synthesize_features(const Screen& screen, const EyeState& eye,
                               const EyeParams& params, const PinholeCamera& camera);

/// Perturb each feature coordinate by an independent uniform draw in
/// [-level, +level] pixels. The validity flag is left untouched.
FeatureSet inject_noise(const FeatureSet& features, double level_px, RngStream& rng);

/// Unsigned yaw (degrees) between the head direction and the eye-to-camera
/// direction, both projected onto the horizontal XZ plane.
Result<double> head_yaw_wrt_camera(const Vec3& head_forward, const Vec3& eye_pos,
                                   const PinholeCamera& camera);

}  // namespace mvgaze
