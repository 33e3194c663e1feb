#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvgaze/fusion.hpp"

namespace mvgaze {

enum class Scenario { sh, mh };

/// Declarative description of one simulation experiment. MH scenarios
/// displace the head along one axis at a time from the calibration
/// position without refitting the calibration.
struct ScenarioSpec {
    Scenario scenario = Scenario::sh;
    LayoutCase layout = LayoutCase::case1;
    int camera_count = 1;
    std::vector<double> noise_levels = {0.0};
    std::vector<double> noise_multipliers;  // per camera; empty = all 1.0

    Vec3 calibration_position = Vec3(0, 200, 600);
    std::vector<double> mh_x_offsets = {-200, -150, -100, -50, 0, 50, 100, 150, 200};
    std::vector<double> mh_y_offsets = {-200, -150, -100, -50, 0, 50, 100, 150, 200};
    std::vector<double> mh_z_offsets = {-200, -150, -100, -50, 0, 50, 100, 150, 200};

    int calibration_frames = 100;  // frames per calibration point
    int test_frames = 100;         // frames per test point
    std::uint64_t seed = 42;
    FusionMethod fusion = FusionMethod::simple;
    HeadMode head_mode = HeadMode::follow_target;

    EyeParams eye_params;  // side is overridden per simulated eye
    bool two_eyes = true;
    double ipd_mm = 62.0;

    double ridge_lambda = 0.0;
    FitOrder fit_order = FitOrder::affine;
    Screen screen;
    double standoff_mm = 50.0;
    double alpha_max_deg = 45.0;
    int weight_grid_nx = 65;
    int weight_grid_ny = 41;
};

struct SensorBreakdown {
    SensorId sensor;
    double mean_error_deg = 0.0;
    double availability_pct = 0.0;
};

struct MetricsRow {
    std::string scenario;
    std::string layout;
    int cameras = 0;
    std::string fusion;
    double noise = 0.0;
    std::string axis;  // "none", "X", "Y" or "Z"
    double displacement_mm = 0.0;
    double mean_error_deg = 0.0;  // NaN when no frame was available
    double availability_pct = 0.0;
    int n_frames = 0;
};

struct MetricsReport {
    std::vector<MetricsRow> rows;
    std::vector<std::vector<SensorBreakdown>> per_sensor;  // parallel to rows
};

/// Visual angle (degrees) at `eye_position` between the rays toward the
/// true target and toward the estimate lifted into the screen plane.
double angular_error(const Vec3& true_target, const Vec2& estimated_por,
                     const Vec3& eye_position);

/// Fitted calibration state of one scenario at one noise level.
struct CalibrationOutcome {
    std::vector<SensorId> sensors;
    std::vector<CalibrationModel> models;       // per sensor
    std::vector<bool> sensor_ok;                // fit succeeded
    std::vector<std::vector<PointStats>> stats; // per sensor per point
    std::vector<WeightMap> weight_maps;         // per sensor
    std::vector<Vec2> targets;                  // the 9 calibration points
};

/// Drives one ScenarioSpec: the 9-point calibration phase and per-position
/// test evaluations. Exposed separately from run_scenario so tests can
/// evaluate arbitrary positions and target sets.
class ScenarioRunner {
public:
    explicit ScenarioRunner(const ScenarioSpec& spec);

    const CameraRig& rig() const { return rig_; }
    const ScenarioSpec& spec() const { return spec_; }

    /// 3x3 grid with 10% screen margins, row-major bottom to top.
    std::vector<Vec2> calibration_targets() const;

    /// 18 seeded test points, 2 per cell of a 3x3 screen partition.
    std::vector<Vec2> test_points() const;

    Result<CalibrationOutcome> calibrate(double noise_level);

    struct EvalResult {
        double mean_error_deg = 0.0;
        double availability_pct = 0.0;
        int n_frames = 0;
        int n_available = 0;
        std::vector<SensorBreakdown> sensors;
    };

    /// Test phase at one head position with the current calibration.
    EvalResult evaluate(const Vec3& head_position, double noise_level,
                        const std::vector<Vec2>& points, int jobs = 1) const;

private:
    struct FrameOutputs {
        std::vector<SensorOutput> outputs;
    };
    FrameOutputs simulate_frame(const Vec3& head_position, const Vec2& target,
                                double noise_level, std::uint64_t phase,
                                std::uint64_t pos_key, int point_index,
                                int frame_index) const;

    std::vector<Vec3> eye_positions(const Vec3& head_position) const;
    EyeParams params_for(EyeSide side) const;
    double camera_noise(int camera, double level) const;

    ScenarioSpec spec_;
    CameraRig rig_;
    std::vector<SensorId> sensors_;
    CalibrationOutcome calib_;
    bool calibrated_ = false;
};

Result<MetricsReport> run_scenario(const ScenarioSpec& spec, int jobs = 1);

/// Merge reports and sort rows by configuration for side-by-side trend
/// comparisons.
MetricsReport summarize(const std::vector<MetricsReport>& reports);

std::string report_to_csv(const MetricsReport& report);
std::string csv_header();
std::string row_to_csv(const MetricsRow& row);

}  // namespace mvgaze
