#pragma once

#include "mvgaze/common.hpp"

namespace mvgaze {

enum class EyeSide { left, right };
enum class HeadMode { follow_target, face_screen };

/// Physiological eye constants. Defaults are the canonical values used
/// throughout the literature for a typical adult eye.
struct EyeParams {
    double cornea_radius_mm = 7.8;    // R
    double cornea_to_pupil_mm = 4.2;  // K, cornea center to pupil center
    double alpha_deg = 5.0;           // horizontal visual/optical axis offset
    double beta_deg = 1.5;            // vertical offset
    double n_cornea = 1.3375;         // refractive index of the cornea/aqueous
    EyeSide side = EyeSide::right;

    void validate() const;
};

/// Instantaneous geometry of one simulated eye; the ground truth the
/// estimator never sees.
struct EyeState {
    Vec3 cornea_center = Vec3::Zero();
    Vec3 optical_axis = Vec3::UnitZ();
    Vec3 visual_axis = Vec3::UnitZ();
    Vec3 pupil_center = Vec3::Zero();
    Vec3 head_forward = Vec3::UnitZ();
};

/// Rotate the visual axis by the kappa offsets (yaw alpha, mirrored for the
/// left eye, then pitch beta) in the eye-local frame whose up is world +Y
/// projected orthogonal to the axis.
Result<Vec3> optical_from_visual(const Vec3& visual, double alpha_deg, double beta_deg,
                                 EyeSide side);

/// Eye gazing from `cornea_center` at `target`. `screen_center` anchors the
/// face-screen head mode.
Result<EyeState> build_eye_state(const EyeParams& params, const Vec3& cornea_center,
                                 const Vec3& target, HeadMode head_mode,
                                 const Vec3& screen_center);

}  // namespace mvgaze
