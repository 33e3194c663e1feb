#include "mvgaze/eye_model.hpp"

#include <Eigen/Geometry>
#include <cmath>

namespace mvgaze {

void EyeParams::validate() const {
    if (cornea_radius_mm <= 0.0) throw std::invalid_argument("cornea_radius must be > 0");
    if (cornea_to_pupil_mm <= 0.0 || cornea_to_pupil_mm >= cornea_radius_mm)
        throw std::invalid_argument("cornea_to_pupil must be in (0, cornea_radius)");
    if (std::abs(alpha_deg) >= 15.0 || std::abs(beta_deg) >= 15.0)
        throw std::invalid_argument("kappa angles must satisfy |alpha|,|beta| < 15 deg");
    if (n_cornea <= 1.0) throw std::invalid_argument("n_cornea must be > 1");
}

Result<Vec3> optical_from_visual(const Vec3& visual, double alpha_deg, double beta_deg,
                                 EyeSide side) {
    using R = Result<Vec3>;
    const Vec3 up_world = Vec3::UnitY();
    Vec3 up = up_world - up_world.dot(visual) * visual;
    if (up.norm() < 1e-9) return R::err(Error::gimbal_degenerate);
    up.normalize();

    // Yaw about the local up axis. The sign puts the right eye's optical
    // axis in the +X half-space when gazing toward -Z.
    const double yaw = deg_to_rad(side == EyeSide::right ? -alpha_deg : alpha_deg);
    const Vec3 yawed = Eigen::AngleAxisd(yaw, up) * visual;

    // Pitch about the local right axis; positive beta tilts toward local up.
    Vec3 right = yawed.cross(up);
    if (right.norm() < 1e-9) return R::err(Error::gimbal_degenerate);
    right.normalize();
    const Vec3 out = Eigen::AngleAxisd(deg_to_rad(beta_deg), right) * yawed;
    return R::ok(out.normalized());
}

Result<EyeState> build_eye_state(const EyeParams& params, const Vec3& cornea_center,
                                 const Vec3& target, HeadMode head_mode,
                                 const Vec3& screen_center) {
    using R = Result<EyeState>;
    const Vec3 gaze = target - cornea_center;
    if (gaze.norm() < 1e-9) return R::err(Error::degenerate);

    EyeState s;
    s.cornea_center = cornea_center;
    s.visual_axis = gaze.normalized();
    const auto optical = optical_from_visual(s.visual_axis, params.alpha_deg,
                                             params.beta_deg, params.side);
    if (!optical) return R::err(optical.error());
    s.optical_axis = *optical;
    s.pupil_center = cornea_center + params.cornea_to_pupil_mm * s.optical_axis;
    s.head_forward = head_mode == HeadMode::follow_target
                         ? s.visual_axis
                         : (screen_center - cornea_center).normalized();
    return R::ok(s);
}

}  // namespace mvgaze
