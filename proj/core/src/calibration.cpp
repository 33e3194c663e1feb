#include "mvgaze/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "mvgaze/experiments.hpp"

namespace mvgaze {

namespace {

int n_features(FitOrder order) { return order == FitOrder::affine ? 3 : 6; }

Eigen::RowVectorXd featurize(FitOrder order, const Vec2& z) {
    Eigen::RowVectorXd row(n_features(order));
    row(0) = 1.0;
    row(1) = z.x();
    row(2) = z.y();
    if (order == FitOrder::quadratic) {
        row(3) = z.x() * z.x();
        row(4) = z.y() * z.y();
        row(5) = z.x() * z.y();
    }
    return row;
}

int count_spanning_targets(const std::vector<CalibrationSample>& samples) {
    std::set<std::pair<double, double>> uniq;
    for (const auto& s : samples) uniq.insert({s.target.x(), s.target.y()});
    return int(uniq.size());
}

}  // namespace

Result<CalibrationModel> fit_bias_correction(const std::vector<CalibrationSample>& samples,
                                             double lambda, FitOrder order) {
    using R = Result<CalibrationModel>;
    const int m = n_features(order);
    const int n = int(samples.size());
    const int min_samples = order == FitOrder::affine ? 6 : 12;
    const int min_targets = order == FitOrder::affine ? 3 : 5;
    if (n < min_samples || count_spanning_targets(samples) < min_targets)
        return R::err(Error::ill_conditioned);

    Eigen::MatrixXd phi(n, m);
    Eigen::MatrixXd targets(n, 2);
    for (int i = 0; i < n; ++i) {
        phi.row(i) = featurize(order, samples[i].raw);
        targets.row(i) << samples[i].target.x(), samples[i].target.y();
    }

    // Normal equations with ridge on everything but the intercept.
    Eigen::MatrixXd gram = phi.transpose() * phi;
    for (int j = 1; j < m; ++j) gram(j, j) += lambda;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible()) return R::err(Error::ill_conditioned);

    CalibrationModel model;
    model.order = order;
    model.lambda = lambda;
    model.coeffs = lu.solve(phi.transpose() * targets);
    model.rms_residual_mm = std::sqrt((phi * model.coeffs - targets).squaredNorm() / n);
    model.fitted = true;
    return R::ok(model);
}

Vec2 apply_bias_correction(const CalibrationModel& model, const Vec2& raw) {
    if (!model.fitted) throw std::logic_error("apply_bias_correction: model not fitted");
    const Eigen::RowVectorXd row = featurize(model.order, raw);
    const Eigen::RowVector2d out = row * model.coeffs;
    return Vec2(out(0), out(1));
}

std::vector<PointStats> compute_point_stats(const std::vector<CalibratedSample>& samples,
                                            int n_points, int frames_per_point,
                                            const Vec3& eye_position) {
    std::vector<PointStats> stats(n_points);
    std::vector<double> err_sum(n_points, 0.0);
    for (const auto& s : samples) {
        auto& st = stats[s.point_index];
        err_sum[s.point_index] +=
            angular_error(Vec3(s.target.x(), s.target.y(), 0.0), s.por, eye_position);
        st.n_samples += 1;
    }
    for (int k = 0; k < n_points; ++k) {
        auto& st = stats[k];
        st.availability = frames_per_point > 0 ? double(st.n_samples) / frames_per_point : 0.0;
        st.mean_error_deg = st.n_samples > 0 ? err_sum[k] / st.n_samples : 0.0;
    }
    return stats;
}

double WeightMap::lookup(const Vec2& p) const {
    const double x = std::clamp(p.x(), x0, x1);
    const double y = std::clamp(p.y(), y0, y1);
    const double fx = (x - x0) / (x1 - x0) * (nx - 1);
    const double fy = (y - y0) / (y1 - y0) * (ny - 1);
    const int ix = std::min(int(fx), nx - 2);
    const int iy = std::min(int(fy), ny - 2);
    const double tx = fx - ix;
    const double ty = fy - iy;
    return (1 - tx) * (1 - ty) * at(ix, iy) + tx * (1 - ty) * at(ix + 1, iy) +
           (1 - tx) * ty * at(ix, iy + 1) + tx * ty * at(ix + 1, iy + 1);
}

Result<std::vector<WeightMap>> build_weight_maps(
    const std::vector<std::vector<PointStats>>& stats,
    const std::vector<Vec2>& calibration_targets, const Screen& screen,
    int grid_nx, int grid_ny) {
    using R = Result<std::vector<WeightMap>>;
    constexpr double kErrorFloorDeg = 0.05;
    const int n_sensors = int(stats.size());
    const int n_points = int(calibration_targets.size());

    // Sort the calibration targets into a 3x3 knot grid.
    std::vector<double> xs, ys;
    for (const auto& t : calibration_targets) {
        if (std::none_of(xs.begin(), xs.end(),
                         [&](double v) { return std::abs(v - t.x()) < 1e-6; }))
            xs.push_back(t.x());
        if (std::none_of(ys.begin(), ys.end(),
                         [&](double v) { return std::abs(v - t.y()) < 1e-6; }))
            ys.push_back(t.y());
    }
    if (xs.size() != 3 || ys.size() != 3)
        throw std::invalid_argument("build_weight_maps: targets must form a 3x3 grid");
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());

    // Normalized per-point weights, stored on the knot grid per sensor.
    std::vector<std::array<double, 9>> knots(n_sensors);
    for (int k = 0; k < n_points; ++k) {
        double sum = 0.0;
        for (int s = 0; s < n_sensors; ++s)
            sum += stats[s][k].availability / (stats[s][k].mean_error_deg + kErrorFloorDeg);
        if (sum <= 0.0) return R::err(Error::uncalibratable_point);
        int ix = -1, iy = -1;
        for (int i = 0; i < 3; ++i) {
            if (std::abs(xs[i] - calibration_targets[k].x()) < 1e-6) ix = i;
            if (std::abs(ys[i] - calibration_targets[k].y()) < 1e-6) iy = i;
        }
        for (int s = 0; s < n_sensors; ++s)
            knots[s][size_t(iy) * 3 + ix] =
                stats[s][k].availability / (stats[s][k].mean_error_deg + kErrorFloorDeg) / sum;
    }

    const auto knot_lookup = [&](const std::array<double, 9>& kn, double x, double y) {
        const double cx = std::clamp(x, xs[0], xs[2]);
        const double cy = std::clamp(y, ys[0], ys[2]);
        const int ix = cx < xs[1] ? 0 : 1;
        const int iy = cy < ys[1] ? 0 : 1;
        const double tx = (cx - xs[ix]) / (xs[ix + 1] - xs[ix]);
        const double ty = (cy - ys[iy]) / (ys[iy + 1] - ys[iy]);
        return (1 - tx) * (1 - ty) * kn[size_t(iy) * 3 + ix] +
               tx * (1 - ty) * kn[size_t(iy) * 3 + ix + 1] +
               (1 - tx) * ty * kn[size_t(iy + 1) * 3 + ix] +
               tx * ty * kn[size_t(iy + 1) * 3 + ix + 1];
    };

    std::vector<WeightMap> maps(n_sensors);
    for (auto& m : maps) {
        m.x0 = -screen.width_mm / 2.0;
        m.x1 = screen.width_mm / 2.0;
        m.y0 = 0.0;
        m.y1 = screen.height_mm;
        m.nx = grid_nx;
        m.ny = grid_ny;
        m.values.assign(size_t(grid_nx) * grid_ny, 0.0);
    }
    for (int iy = 0; iy < grid_ny; ++iy) {
        for (int ix = 0; ix < grid_nx; ++ix) {
            const double x = maps[0].x0 + (maps[0].x1 - maps[0].x0) * ix / (grid_nx - 1);
            const double y = maps[0].y0 + (maps[0].y1 - maps[0].y0) * iy / (grid_ny - 1);
            double sum = 0.0;
            for (int s = 0; s < n_sensors; ++s) {
                maps[s].at(ix, iy) = knot_lookup(knots[s], x, y);
                sum += maps[s].at(ix, iy);
            }
            // Interpolated values stay normalized up to rounding, but keep
            // the sum-to-one invariant exact.
            if (sum > 0.0)
                for (int s = 0; s < n_sensors; ++s) maps[s].at(ix, iy) /= sum;
        }
    }
    return R::ok(maps);
}

}  // namespace mvgaze
