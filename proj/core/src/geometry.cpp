#include "mvgaze/geometry.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace mvgaze {

const char* error_name(Error e) {
    switch (e) {
        case Error::none: return "none";
        case Error::behind: return "behind";
        case Error::degenerate: return "degenerate";
        case Error::no_reflection: return "no_reflection";
        case Error::no_refraction: return "no_refraction";
        case Error::degenerate_configuration: return "degenerate_configuration";
        case Error::point_at_infinity: return "point_at_infinity";
        case Error::gimbal_degenerate: return "gimbal_degenerate";
        case Error::yaw_undefined: return "yaw_undefined";
        case Error::ill_conditioned: return "ill_conditioned";
        case Error::uncalibratable_point: return "uncalibratable_point";
        case Error::unavailable: return "unavailable";
        case Error::uncalibratable: return "uncalibratable";
    }
    return "unknown";
}

PinholeCamera PinholeCamera::look_at(const Vec3& center, const Vec3& target, const Vec3& up) {
    PinholeCamera cam;
    cam.center = center;
    const Vec3 forward = (target - center).normalized();
    Vec3 right = up.cross(forward);
    if (right.norm() < 1e-12)
        throw std::invalid_argument("look_at: view direction parallel to up vector");
    right.normalize();
    const Vec3 down = right.cross(forward);  // image y grows world-downward
    cam.rotation.row(0) = right.transpose();
    cam.rotation.row(1) = down.transpose();
    cam.rotation.row(2) = forward.transpose();
    return cam;
}

double PinholeCamera::pitch_for_diagonal_fov(double focal_mm, int w, int h, double fov_diag_deg) {
    const double diag_px = std::sqrt(double(w) * w + double(h) * h);
    return 2.0 * focal_mm * std::tan(deg_to_rad(fov_diag_deg) / 2.0) / diag_px * 1000.0;
}

ProjectResult project(const PinholeCamera& cam, const Vec3& point) {
    const Vec3 pc = cam.rotation * (point - cam.center);
    if ((point - cam.center).norm() < 1e-12)
        return {std::nullopt, ProjectFailure::degenerate};
    if (pc.z() <= 1e-12)
        return {std::nullopt, ProjectFailure::behind};
    const double scale = cam.focal_length_mm / (cam.pixel_pitch_um * 1e-3);
    const Vec2 px = cam.principal_point + scale / pc.z() * Vec2(pc.x(), pc.y());
    return {px, ProjectFailure::behind};
}

namespace {

// Unsigned angle between two 2D vectors.
double angle2(const Vec2& a, const Vec2& b) {
    return std::atan2(std::abs(a.x() * b.y() - a.y() * b.x()), a.dot(b));
}

// Signed angle from a to b.
double signed_angle2(const Vec2& a, const Vec2& b) {
    return std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
}

}  // namespace

Result<Vec3> reflect_on_sphere(const Vec3& center, double radius,
                               const Vec3& light, const Vec3& observer) {
    using R = Result<Vec3>;
    const Vec3 l = light - center;
    const Vec3 o = observer - center;
    const double dl = l.norm();
    const double dobs = o.norm();
    if (dl <= radius || dobs <= radius) return R::err(Error::no_reflection);

    const Vec3 u = l / dl;
    Vec3 w = o - o.dot(u) * u;
    const double wn = w.norm();
    if (wn < 1e-12 * dobs) {
        // Collinear: retroreflection along the shared direction, or occluded.
        if (o.dot(u) > 0.0) return R::ok(center + radius * u);
        return R::err(Error::no_reflection);
    }
    const Vec3 v = w / wn;
    const double delta = std::atan2(wn, o.dot(u));  // in (0, pi)

    // In-plane coordinates: light at (dl, 0), observer at do*(cos d, sin d).
    const Vec2 l2(dl, 0.0);
    const Vec2 o2(o.dot(u), wn);

    const auto residual = [&](double phi) {
        const Vec2 n(std::cos(phi), std::sin(phi));
        const Vec2 q = radius * n;
        return angle2(n, l2 - q) - angle2(n, o2 - q);
    };

    double lo = 0.0, hi = delta;
    double flo = residual(lo);  // -angle to observer: <= 0
    double fhi = residual(hi);  // >= 0
    if (flo > 0.0 || fhi < 0.0) return R::err(Error::no_reflection);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = residual(mid);
        if (fm <= 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    const double phi = 0.5 * (lo + hi);
    const Vec2 n(std::cos(phi), std::sin(phi));
    const Vec2 q2 = radius * n;
    // The found point must actually face both endpoints.
    if (n.dot(l2 - q2) <= 0.0 || n.dot(o2 - q2) <= 0.0)
        return R::err(Error::no_reflection);
    return R::ok(center + radius * (std::cos(phi) * u + std::sin(phi) * v));
}

Result<Vec3> refract_entry_point(const Vec3& center, double radius,
                                 const Vec3& observer, const Vec3& interior,
                                 double n_outside, double n_inside) {
    using R = Result<Vec3>;
    if (n_outside <= 0.0 || n_inside <= 0.0) return R::err(Error::no_refraction);
    const Vec3 o = observer - center;
    const Vec3 p = interior - center;
    const double dobs = o.norm();
    const double dp = p.norm();
    if (dobs <= radius || dp >= radius) return R::err(Error::no_refraction);

    const Vec3 u = o / dobs;
    Vec3 w = p - p.dot(u) * u;
    const double wn = w.norm();
    if (dp < 1e-12 || wn < 1e-12 * std::max(dp, 1.0)) {
        // Interior point on the observer axis: normal incidence, no bending.
        return R::ok(center + radius * u);
    }
    const Vec3 v = w / wn;
    const double eta = n_outside / n_inside;

    const Vec2 o2(dobs, 0.0);
    const Vec2 p2(p.dot(u), wn);

    // Signed in-plane miss angle of the refracted ray w.r.t. the interior
    // point. NaN marks total internal reflection at that entry angle.
    const auto miss = [&](double phi) {
        const Vec2 n(std::cos(phi), std::sin(phi));
        const Vec2 q = radius * n;
        const Vec2 d = (q - o2).normalized();
        const double cos_i = -d.dot(n);
        const double k = 1.0 - eta * eta * (1.0 - cos_i * cos_i);
        if (k < 0.0) return std::numeric_limits<double>::quiet_NaN();
        const Vec2 t = eta * d + (eta * cos_i - std::sqrt(k)) * n;
        return signed_angle2(t, p2 - q);
    };

    // Entry point is visible from the observer only while cos(phi) > R/do.
    const double phi_max = std::acos(radius / dobs) - 1e-9;
    const int n_steps = 1024;
    double prev_phi = 0.0;
    double prev_f = miss(prev_phi);
    double lo = -1.0, hi = -1.0;
    for (int i = 1; i <= n_steps; ++i) {
        const double phi = phi_max * double(i) / n_steps;
        const double f = miss(phi);
        if (std::isfinite(prev_f) && std::isfinite(f) &&
            (prev_f == 0.0 || (prev_f > 0.0) != (f > 0.0))) {
            lo = prev_phi;
            hi = phi;
            break;
        }
        prev_phi = phi;
        prev_f = f;
    }
    if (lo < 0.0) return R::err(Error::no_refraction);

    double flo = miss(lo);
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = miss(mid);
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    const double phi = 0.5 * (lo + hi);
    return R::ok(center + radius * (std::cos(phi) * u + std::sin(phi) * v));
}

bool has_collinear_triple(const std::array<Vec2, 4>& pts, double rel_tol) {
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
            for (int c = b + 1; c < 4; ++c) {
                const Vec2 ab = pts[b] - pts[a];
                const Vec2 ac = pts[c] - pts[a];
                const double cross = std::abs(ab.x() * ac.y() - ab.y() * ac.x());
                const double scale = ab.norm() * ac.norm();
                if (cross <= rel_tol * std::max(scale, 1e-30)) return true;
            }
    return false;
}

Result<Homography> homography_from_correspondences(const std::array<Vec2, 4>& src,
                                                   const std::array<Vec2, 4>& dst) {
    using R = Result<Homography>;
    if (has_collinear_triple(src) || has_collinear_triple(dst))
        return R::err(Error::degenerate_configuration);

    Eigen::Matrix<double, 8, 8> a = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 8, 1> b;
    for (int i = 0; i < 4; ++i) {
        const double x = src[i].x(), y = src[i].y();
        const double xp = dst[i].x(), yp = dst[i].y();
        a.row(2 * i) << x, y, 1, 0, 0, 0, -x * xp, -y * xp;
        a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -x * yp, -y * yp;
        b(2 * i) = xp;
        b(2 * i + 1) = yp;
    }
    Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 8, 8>> qr(a);
    if (qr.rank() < 8) return R::err(Error::degenerate_configuration);
    const Eigen::Matrix<double, 8, 1> h = qr.solve(b);

    Homography out;
    out.h << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
    if (std::abs(out.h.determinant()) <= 1e-12)
        return R::err(Error::degenerate_configuration);
    return R::ok(out);
}

Result<Vec2> homography_apply(const Homography& h, const Vec2& p) {
    using R = Result<Vec2>;
    const Vec3 q = h.h * Vec3(p.x(), p.y(), 1.0);
    if (std::abs(q.z()) < 1e-12) return R::err(Error::point_at_infinity);
    return R::ok(Vec2(q.x() / q.z(), q.y() / q.z()));
}

}  // namespace mvgaze
