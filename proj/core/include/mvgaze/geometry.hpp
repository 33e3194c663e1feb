#pragma once

#include <array>
#include <cstdint>

#include "mvgaze/common.hpp"

namespace mvgaze {

/// Pinhole camera with a rigid world-to-camera transform. The camera looks
/// along its local +Z axis; image x grows to the right, image y downward,
/// origin at the top-left pixel. All world units are millimeters.
struct PinholeCamera {
    Vec3 center = Vec3::Zero();      // optical center, world mm
    Mat3 rotation = Mat3::Identity();  // rows: camera x, y, z axes in world coords
    double focal_length_mm = 8.0;
    double pixel_pitch_um = 5.411;
    int width_px = 1280;
    int height_px = 1024;
    Vec2 principal_point = Vec2(640.0, 512.0);

    /// Camera at `center` whose optical axis passes through `target`.
    /// `up` fixes the roll; image y points world-down.
    static PinholeCamera look_at(const Vec3& center, const Vec3& target,
                                 const Vec3& up = Vec3(0, 1, 0));

    Vec3 forward() const { return rotation.row(2).transpose(); }
    bool in_bounds(const Vec2& px) const {
        return px.x() >= 0.0 && px.x() <= width_px && px.y() >= 0.0 && px.y() <= height_px;
    }

    /// Pixel pitch (micrometers) for a given focal length, resolution and
    /// diagonal field of view.
    static double pitch_for_diagonal_fov(double focal_mm, int w, int h, double fov_diag_deg);
};

/// 3x3 planar projective transform, normalized so H(2,2) = 1.
struct Homography {
    Mat3 h = Mat3::Identity();
};

enum class ProjectFailure { behind, degenerate };

struct ProjectResult {
    std::optional<Vec2> px;
    ProjectFailure failure = ProjectFailure::behind;
    bool ok() const { return px.has_value(); }
};

/// Perspective projection of a world point. Points at or behind the optical
/// center fail; points outside the sensor bounds still project (callers
/// check bounds themselves).
ProjectResult project(const PinholeCamera& cam, const Vec3& point);

/// Specular reflection point on a sphere: the surface point q for which a
/// ray from `light` reflects toward `observer`. Solved by bisection on the
/// in-plane arc between the two directions.
Result<Vec3> reflect_on_sphere(const Vec3& center, double radius,
                               const Vec3& light, const Vec3& observer);

/// Surface entry point q such that the ray observer->q, refracted by
/// Snell's law at the sphere boundary, passes through `interior`.
Result<Vec3> refract_entry_point(const Vec3& center, double radius,
                                 const Vec3& observer, const Vec3& interior,
                                 double n_outside, double n_inside);

/// Exact homography from 4 point correspondences (8x8 linear system).
Result<Homography> homography_from_correspondences(const std::array<Vec2, 4>& src,
                                                   const std::array<Vec2, 4>& dst);

Result<Vec2> homography_apply(const Homography& h, const Vec2& p);

/// True if any three of the four points are (nearly) collinear.
bool has_collinear_triple(const std::array<Vec2, 4>& pts, double rel_tol = 1e-9);

}  // namespace mvgaze
