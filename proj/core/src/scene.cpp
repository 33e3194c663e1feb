#include "mvgaze/scene.hpp"

#include <cmath>

namespace mvgaze {

namespace {

Vec3 perimeter_point(const Screen& screen, double standoff, double t) {
    // Rectangle enclosing the screen at `standoff` distance, walked from the
    // bottom-center toward +X. t is arc length.
    const double hw = screen.width_mm / 2.0 + standoff;
    const double y0 = -standoff;
    const double y1 = screen.height_mm + standoff;
    const double wside = 2.0 * hw;
    const double hside = y1 - y0;
    const double per = 2.0 * (wside + hside);
    t = std::fmod(t, per);
    if (t < 0) t += per;

    double s = t;
    if (s < hw) return Vec3(s, y0, 0);                    // bottom, center -> right
    s -= hw;
    if (s < hside) return Vec3(hw, y0 + s, 0);            // right side, upward
    s -= hside;
    if (s < wside) return Vec3(hw - s, y1, 0);            // top, right -> left
    s -= wside;
    if (s < hside) return Vec3(-hw, y1 - s, 0);           // left side, downward
    s -= hside;
    return Vec3(-hw + s, y0, 0);                          // bottom, left -> center
}

}  // namespace

CameraRig generate_rig(LayoutCase layout, int count, const Screen& screen,
                       double standoff_mm, const Vec3& aim) {
    if (count < 1) throw std::invalid_argument("generate_rig: count must be >= 1");
    CameraRig rig;
    rig.layout = layout;
    rig.cameras.reserve(count);

    if (layout == LayoutCase::case0) {
        const double spacing = 50.0;
        for (int i = 0; i < count; ++i) {
            const double x = (i - (count - 1) / 2.0) * spacing;
            rig.cameras.push_back(
                PinholeCamera::look_at(Vec3(x, -standoff_mm, 0), aim));
        }
        return rig;
    }

    if (count == 1) {
        rig.cameras.push_back(PinholeCamera::look_at(Vec3(0, -standoff_mm, 0), aim));
    } else if (count == 3) {
        // Prototype layout: bottom-center plus left- and right-middle.
        const double hw = screen.width_mm / 2.0 + standoff_mm;
        const double hm = screen.height_mm / 2.0;
        rig.cameras.push_back(PinholeCamera::look_at(Vec3(0, -standoff_mm, 0), aim));
        rig.cameras.push_back(PinholeCamera::look_at(Vec3(-hw, hm, 0), aim));
        rig.cameras.push_back(PinholeCamera::look_at(Vec3(hw, hm, 0), aim));
    } else {
        const double hw = screen.width_mm / 2.0 + standoff_mm;
        const double hside = screen.height_mm + 2.0 * standoff_mm;
        const double per = 2.0 * (2.0 * hw + hside);
        for (int i = 0; i < count; ++i)
            rig.cameras.push_back(
                PinholeCamera::look_at(perimeter_point(screen, standoff_mm, per * i / count), aim));
    }
    return rig;
}

FeatureSet synthesize_features(const Screen& screen, const EyeState& eye,
                               const EyeParams& params, const PinholeCamera& camera) {
    FeatureSet fs;
    const auto invalid = [&](InvalidReason r) {
        fs.valid = false;
        fs.invalid_reason = r;
        return fs;
    };

    const auto leds = screen.led_positions();
    for (int i = 0; i < 4; ++i) {
        const auto refl = reflect_on_sphere(eye.cornea_center, params.cornea_radius_mm,
                                            leds[i], camera.center);
        if (!refl) return invalid(InvalidReason::no_reflection);
        const auto px = project(camera, *refl);
        if (!px.ok())
            return invalid(px.failure == ProjectFailure::behind ? InvalidReason::behind_camera
                                                                : InvalidReason::degenerate);
        if (!camera.in_bounds(*px.px)) return invalid(InvalidReason::out_of_fov);
        fs.glints[i] = *px.px;
    }

    const auto entry = refract_entry_point(eye.cornea_center, params.cornea_radius_mm,
                                           camera.center, eye.pupil_center, 1.0,
                                           params.n_cornea);
    if (!entry) return invalid(InvalidReason::no_refraction);
    const auto px = project(camera, *entry);
    if (!px.ok())
        return invalid(px.failure == ProjectFailure::behind ? InvalidReason::behind_camera
                                                            : InvalidReason::degenerate);
    if (!camera.in_bounds(*px.px)) return invalid(InvalidReason::out_of_fov);
    fs.pupil = *px.px;

    // Reject degenerate glint quadrilaterals (shoelace area in px^2).
    double area2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Vec2& a = fs.glints[i];
        const Vec2& b = fs.glints[(i + 1) % 4];
        area2 += a.x() * b.y() - b.x() * a.y();
    }
    if (std::abs(area2) / 2.0 <= 1.0 || has_collinear_triple(fs.glints, 1e-9))
        return invalid(InvalidReason::degenerate);

    fs.valid = true;
    return fs;
}

FeatureSet inject_noise(const FeatureSet& features, double level_px, RngStream& rng) {
    FeatureSet out = features;
    for (auto& g : out.glints) {
        g.x() += rng.uniform(-level_px, level_px);
        g.y() += rng.uniform(-level_px, level_px);
    }
    out.pupil.x() += rng.uniform(-level_px, level_px);
    out.pupil.y() += rng.uniform(-level_px, level_px);
    return out;
}

Result<double> head_yaw_wrt_camera(const Vec3& head_forward, const Vec3& eye_pos,
                                   const PinholeCamera& camera) {
    using R = Result<double>;
    const Vec2 h(head_forward.x(), head_forward.z());
    if (h.norm() < 1e-9) return R::err(Error::yaw_undefined);
    const Vec3 to_cam = camera.center - eye_pos;
    const Vec2 d(to_cam.x(), to_cam.z());
    if (d.norm() < 1e-12) return R::err(Error::yaw_undefined);
    const double ang = std::atan2(std::abs(h.x() * d.y() - h.y() * d.x()), h.dot(d));
    return R::ok(rad_to_deg(ang));
}

}  // namespace mvgaze
