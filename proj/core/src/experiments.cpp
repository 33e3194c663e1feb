#include "mvgaze/experiments.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <tuple>

namespace mvgaze {

namespace {

constexpr std::uint64_t kPhaseCalibration = 1;
constexpr std::uint64_t kPhaseTest = 2;
constexpr std::uint64_t kPhaseTestPoints = 3;

std::uint64_t key_of(double v) { return std::bit_cast<std::uint64_t>(v); }

std::uint64_t position_key(const Vec3& p) {
    RngStream h(0, {key_of(p.x()), key_of(p.y()), key_of(p.z())});
    return h.next_u64();
}

const char* scenario_name(Scenario s) { return s == Scenario::sh ? "SH" : "MH"; }
const char* layout_name(LayoutCase l) { return l == LayoutCase::case0 ? "case0" : "case1"; }

const char* fusion_name(FusionMethod f) {
    switch (f) {
        case FusionMethod::simple: return "simple";
        case FusionMethod::head_pose: return "head_pose";
        case FusionMethod::behavior: return "behavior";
        case FusionMethod::best_camera: return "best_camera";
    }
    return "?";
}

std::string fmt_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string fmt_fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

double angular_error(const Vec3& true_target, const Vec2& estimated_por,
                     const Vec3& eye_position) {
    const Vec3 a = true_target - eye_position;
    const Vec3 b = Vec3(estimated_por.x(), estimated_por.y(), 0.0) - eye_position;
    const double cross = a.cross(b).norm();
    return rad_to_deg(std::atan2(cross, a.dot(b)));
}

ScenarioRunner::ScenarioRunner(const ScenarioSpec& spec)
    : spec_(spec),
      rig_(generate_rig(spec.layout, spec.camera_count, spec.screen, spec.standoff_mm,
                        spec.calibration_position)) {
    spec_.eye_params.validate();
    if (!spec_.noise_multipliers.empty() &&
        int(spec_.noise_multipliers.size()) != spec_.camera_count)
        throw std::invalid_argument("noise_multipliers size must match camera count");
    for (int c = 0; c < spec_.camera_count; ++c) {
        if (spec_.two_eyes) {
            sensors_.push_back({c, EyeSide::left});
            sensors_.push_back({c, EyeSide::right});
        } else {
            sensors_.push_back({c, spec_.eye_params.side});
        }
    }
}

std::vector<Vec2> ScenarioRunner::calibration_targets() const {
    const Screen& s = spec_.screen;
    const double mx = 0.1 * s.width_mm, my = 0.1 * s.height_mm;
    std::vector<double> xs = {-s.width_mm / 2 + mx, 0.0, s.width_mm / 2 - mx};
    std::vector<double> ys = {my, s.height_mm / 2, s.height_mm - my};
    std::vector<Vec2> pts;
    for (double y : ys)
        for (double x : xs) pts.emplace_back(x, y);
    return pts;
}

std::vector<Vec2> ScenarioRunner::test_points() const {
    const Screen& s = spec_.screen;
    const double cw = s.width_mm / 3.0, ch = s.height_mm / 3.0;
    std::vector<Vec2> pts;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
            for (int p = 0; p < 2; ++p) {
                RngStream rng(spec_.seed, {kPhaseTestPoints, std::uint64_t(j),
                                           std::uint64_t(i), std::uint64_t(p)});
                const double x = -s.width_mm / 2 + cw * (i + rng.next_double());
                const double y = ch * (j + rng.next_double());
                pts.emplace_back(x, y);
            }
    return pts;
}

std::vector<Vec3> ScenarioRunner::eye_positions(const Vec3& head) const {
    if (!spec_.two_eyes) return {head};
    return {head + Vec3(-spec_.ipd_mm / 2, 0, 0), head + Vec3(spec_.ipd_mm / 2, 0, 0)};
}

EyeParams ScenarioRunner::params_for(EyeSide side) const {
    EyeParams p = spec_.eye_params;
    p.side = side;
    return p;
}

double ScenarioRunner::camera_noise(int camera, double level) const {
    if (spec_.noise_multipliers.empty()) return level;
    return level * spec_.noise_multipliers[camera];
}

ScenarioRunner::FrameOutputs ScenarioRunner::simulate_frame(
    const Vec3& head, const Vec2& target, double noise_level, std::uint64_t phase,
    std::uint64_t pos_key, int point_index, int frame_index) const {
    const Vec3 target3(target.x(), target.y(), 0.0);
    const Vec3 head_forward = spec_.head_mode == HeadMode::follow_target
                                  ? (target3 - head).normalized()
                                  : (spec_.screen.center() - head).normalized();

    // Per-camera yaw, shared by both eyes.
    std::vector<double> yaw(rig_.cameras.size(), 90.0);
    for (size_t c = 0; c < rig_.cameras.size(); ++c) {
        const auto y = head_yaw_wrt_camera(head_forward, head, rig_.cameras[c]);
        if (y) yaw[c] = *y;
    }

    FrameOutputs fo;
    fo.outputs.resize(sensors_.size());
    for (size_t s = 0; s < sensors_.size(); ++s) {
        const SensorId id = sensors_[s];
        SensorOutput& out = fo.outputs[s];
        out.sensor = id;
        out.head_yaw_deg = yaw[id.camera];
        out.available = false;

        const Vec3 eye_pos = spec_.two_eyes
                                 ? (id.eye == EyeSide::left ? eye_positions(head)[0]
                                                            : eye_positions(head)[1])
                                 : head;
        const auto state = build_eye_state(params_for(id.eye), eye_pos, target3,
                                           spec_.head_mode, spec_.screen.center());
        if (!state) continue;

        FeatureSet fs = synthesize_features(spec_.screen, *state, params_for(id.eye),
                                            rig_.cameras[id.camera]);
        RngStream rng(spec_.seed, {phase, pos_key, key_of(noise_level),
                                   std::uint64_t(point_index), std::uint64_t(frame_index),
                                   std::uint64_t(id.camera),
                                   std::uint64_t(id.eye == EyeSide::left ? 0 : 1)});
        fs = inject_noise(fs, camera_noise(id.camera, noise_level), rng);
        if (!fs.valid) continue;
        const auto raw = estimate_raw_por(fs, spec_.screen, id);
        if (!raw) continue;
        out.por = raw->por;
        out.available = true;
    }
    return fo;
}

Result<CalibrationOutcome> ScenarioRunner::calibrate(double noise_level) {
    using R = Result<CalibrationOutcome>;
    CalibrationOutcome out;
    out.sensors = sensors_;
    out.targets = calibration_targets();
    const int n_points = int(out.targets.size());
    const std::uint64_t pos_key = position_key(spec_.calibration_position);

    std::vector<std::vector<CalibrationSample>> samples(sensors_.size());
    for (int k = 0; k < n_points; ++k) {
        for (int j = 0; j < spec_.calibration_frames; ++j) {
            const auto frame = simulate_frame(spec_.calibration_position, out.targets[k],
                                              noise_level, kPhaseCalibration, pos_key, k, j);
            for (size_t s = 0; s < sensors_.size(); ++s)
                if (frame.outputs[s].available)
                    samples[s].push_back({frame.outputs[s].por, out.targets[k], k, j});
        }
    }

    bool any_samples = false;
    for (const auto& v : samples) any_samples = any_samples || !v.empty();
    if (!any_samples) return R::err(Error::uncalibratable);

    out.models.resize(sensors_.size());
    out.sensor_ok.assign(sensors_.size(), false);
    out.stats.assign(sensors_.size(), std::vector<PointStats>(n_points));

    const auto eyes = eye_positions(spec_.calibration_position);
    bool any_ok = false;
    for (size_t s = 0; s < sensors_.size(); ++s) {
        const auto fit = fit_bias_correction(samples[s], spec_.ridge_lambda, spec_.fit_order);
        if (!fit) continue;
        out.models[s] = *fit;
        out.sensor_ok[s] = true;
        any_ok = true;

        std::vector<CalibratedSample> calibrated;
        calibrated.reserve(samples[s].size());
        for (const auto& sm : samples[s])
            calibrated.push_back({apply_bias_correction(out.models[s], sm.raw), sm.target,
                                  sm.point_index});
        const Vec3 eye_pos =
            spec_.two_eyes ? (sensors_[s].eye == EyeSide::left ? eyes[0] : eyes[1]) : eyes[0];
        out.stats[s] = compute_point_stats(calibrated, n_points, spec_.calibration_frames,
                                           eye_pos);
    }
    if (!any_ok) return R::err(Error::uncalibratable);

    auto maps = build_weight_maps(out.stats, out.targets, spec_.screen,
                                  spec_.weight_grid_nx, spec_.weight_grid_ny);
    if (!maps) return R::err(maps.error());
    out.weight_maps = std::move(*maps);

    calib_ = out;
    calibrated_ = true;
    return R::ok(out);
}

ScenarioRunner::EvalResult ScenarioRunner::evaluate(const Vec3& head, double noise_level,
                                                    const std::vector<Vec2>& points,
                                                    int jobs) const {
    if (!calibrated_) throw std::logic_error("evaluate called before calibrate");
    const std::uint64_t pos_key = position_key(head);

    struct Accum {
        double err_sum = 0.0;
        int n_frames = 0;
        int n_available = 0;
        std::vector<double> sensor_err;
        std::vector<int> sensor_avail;
    };

    const auto eval_point = [&](int ip) {
        Accum a;
        a.sensor_err.assign(sensors_.size(), 0.0);
        a.sensor_avail.assign(sensors_.size(), 0);
        const Vec2& target = points[ip];
        const Vec3 target3(target.x(), target.y(), 0.0);
        std::vector<const WeightMap*> maps(sensors_.size());
        for (size_t s = 0; s < sensors_.size(); ++s) maps[s] = &calib_.weight_maps[s];

        for (int j = 0; j < spec_.test_frames; ++j) {
            auto frame = simulate_frame(head, target, noise_level, kPhaseTest, pos_key, ip, j);
            for (size_t s = 0; s < sensors_.size(); ++s) {
                auto& o = frame.outputs[s];
                if (!o.available || !calib_.sensor_ok[s]) {
                    o.available = false;
                    continue;
                }
                o.por = apply_bias_correction(calib_.models[s], o.por);
                a.sensor_err[s] += angular_error(target3, o.por, head);
                a.sensor_avail[s] += 1;
            }

            FusedGaze fused;
            switch (spec_.fusion) {
                case FusionMethod::simple: fused = fuse_simple(frame.outputs); break;
                case FusionMethod::head_pose:
                    fused = fuse_head_pose(frame.outputs, spec_.alpha_max_deg);
                    break;
                case FusionMethod::behavior:
                    fused = fuse_behavior(frame.outputs, maps, spec_.screen);
                    break;
                case FusionMethod::best_camera: fused = fuse_best_camera(frame.outputs); break;
            }
            a.n_frames += 1;
            if (fused.available) {
                a.n_available += 1;
                a.err_sum += angular_error(target3, fused.por, head);
            }
        }
        return a;
    };

    std::vector<Accum> per_point(points.size());
    if (jobs <= 1) {
        for (size_t ip = 0; ip < points.size(); ++ip) per_point[ip] = eval_point(int(ip));
    } else {
        std::vector<std::future<Accum>> futures;
        futures.reserve(points.size());
        for (size_t ip = 0; ip < points.size(); ++ip)
            futures.push_back(std::async(std::launch::async, eval_point, int(ip)));
        for (size_t ip = 0; ip < points.size(); ++ip) per_point[ip] = futures[ip].get();
    }

    EvalResult r;
    std::vector<double> serr(sensors_.size(), 0.0);
    std::vector<int> savail(sensors_.size(), 0);
    double err_sum = 0.0;
    for (const auto& a : per_point) {
        err_sum += a.err_sum;
        r.n_frames += a.n_frames;
        r.n_available += a.n_available;
        for (size_t s = 0; s < sensors_.size(); ++s) {
            serr[s] += a.sensor_err[s];
            savail[s] += a.sensor_avail[s];
        }
    }
    r.mean_error_deg = r.n_available > 0 ? err_sum / r.n_available
                                         : std::numeric_limits<double>::quiet_NaN();
    r.availability_pct = r.n_frames > 0 ? 100.0 * r.n_available / r.n_frames : 0.0;
    for (size_t s = 0; s < sensors_.size(); ++s) {
        SensorBreakdown b;
        b.sensor = sensors_[s];
        b.availability_pct = r.n_frames > 0 ? 100.0 * savail[s] / r.n_frames : 0.0;
        b.mean_error_deg = savail[s] > 0 ? serr[s] / savail[s]
                                         : std::numeric_limits<double>::quiet_NaN();
        r.sensors.push_back(b);
    }
    return r;
}

Result<MetricsReport> run_scenario(const ScenarioSpec& spec, int jobs) {
    using R = Result<MetricsReport>;
    ScenarioRunner runner(spec);
    const auto points = runner.test_points();
    MetricsReport report;

    const auto add_row = [&](double noise, const std::string& axis, double disp,
                             const ScenarioRunner::EvalResult& e) {
        MetricsRow row;
        row.scenario = scenario_name(spec.scenario);
        row.layout = layout_name(spec.layout);
        row.cameras = spec.camera_count;
        row.fusion = fusion_name(spec.fusion);
        row.noise = noise;
        row.axis = axis;
        row.displacement_mm = disp;
        row.mean_error_deg = e.mean_error_deg;
        row.availability_pct = e.availability_pct;
        row.n_frames = e.n_frames;
        report.rows.push_back(row);
        report.per_sensor.push_back(e.sensors);
    };

    for (double level : spec.noise_levels) {
        const auto cal = runner.calibrate(level);
        if (!cal) return R::err(cal.error());

        if (spec.scenario == Scenario::sh) {
            add_row(level, "none", 0.0,
                    runner.evaluate(spec.calibration_position, level, points, jobs));
            continue;
        }
        const std::array<std::pair<const char*, const std::vector<double>*>, 3> axes = {
            {{"X", &spec.mh_x_offsets}, {"Y", &spec.mh_y_offsets}, {"Z", &spec.mh_z_offsets}}};
        for (const auto& [name, offsets] : axes) {
            for (double d : *offsets) {
                Vec3 pos = spec.calibration_position;
                if (name[0] == 'X') pos.x() += d;
                if (name[0] == 'Y') pos.y() += d;
                if (name[0] == 'Z') pos.z() += d;
                add_row(level, name, d, runner.evaluate(pos, level, points, jobs));
            }
        }
    }
    return R::ok(report);
}

MetricsReport summarize(const std::vector<MetricsReport>& reports) {
    MetricsReport merged;
    for (const auto& r : reports) {
        merged.rows.insert(merged.rows.end(), r.rows.begin(), r.rows.end());
        merged.per_sensor.insert(merged.per_sensor.end(), r.per_sensor.begin(),
                                 r.per_sensor.end());
    }
    std::vector<size_t> order(merged.rows.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        const auto& ra = merged.rows[a];
        const auto& rb = merged.rows[b];
        return std::tie(ra.scenario, ra.layout, ra.cameras, ra.fusion, ra.noise, ra.axis,
                        ra.displacement_mm) <
               std::tie(rb.scenario, rb.layout, rb.cameras, rb.fusion, rb.noise, rb.axis,
                        rb.displacement_mm);
    });
    MetricsReport out;
    for (size_t i : order) {
        out.rows.push_back(merged.rows[i]);
        out.per_sensor.push_back(merged.per_sensor[i]);
    }
    return out;
}

std::string csv_header() {
    return "scenario,layout,cameras,fusion,noise,axis,displacement_mm,mean_error_deg,"
           "availability_pct,n_frames";
}

std::string row_to_csv(const MetricsRow& row) {
    std::ostringstream os;
    os << row.scenario << ',' << row.layout << ',' << row.cameras << ',' << row.fusion << ','
       << fmt_num(row.noise) << ',' << row.axis << ',' << fmt_num(row.displacement_mm) << ',';
    // An empty error cell means no frame was available, which is distinct
    // from a measured error of zero.
    if (std::isfinite(row.mean_error_deg)) os << fmt_fixed(row.mean_error_deg);
    os << ',' << fmt_fixed(row.availability_pct) << ',' << row.n_frames;
    return os.str();
}

std::string report_to_csv(const MetricsReport& report) {
    std::ostringstream os;
    os << csv_header() << '\n';
    for (const auto& row : report.rows) os << row_to_csv(row) << '\n';
    return os.str();
}

}  // namespace mvgaze
