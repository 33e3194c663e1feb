#include <CLI11.hpp>

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>
#include <vector>

#include "mvgaze/config.hpp"
#include "mvgaze/rng.hpp"

namespace fs = std::filesystem;
using namespace mvgaze;

namespace {

std::string resolve_out_dir(const std::string& flag_value, const std::string& config_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("MVGAZE_OUT"); env && *env) return env;
    return config_value;
}

int cmd_simulate(const std::string& config_path, std::uint64_t seed_override, bool has_seed,
                 const std::string& out_flag, int jobs) {
    RunConfig cfg = parse_config(config_path);
    if (has_seed) {
        cfg.seed = seed_override;
        for (auto& e : cfg.entries) e.base.seed = seed_override;
    }
    const std::string out_dir = resolve_out_dir(out_flag, cfg.output_dir);

    auto runs = expand_runs(cfg);
    std::vector<std::string> names;
    std::vector<MetricsReport> reports;
    for (const auto& run : runs) {
        std::cout << "running " << run.name << " ..." << std::flush;
        const auto report = run_scenario(run.spec, jobs);
        if (!report) {
            std::cout << '\n';
            std::cerr << "error: scenario " << run.name << " failed: "
                      << error_name(report.error()) << '\n';
            return 1;
        }
        std::cout << " done (" << report->rows.size() << " rows)\n";
        names.push_back(run.name);
        reports.push_back(*report);
    }
    const auto paths = write_reports(names, reports, cfg, out_dir);
    for (const auto& p : paths) std::cout << "wrote " << p << '\n';
    return 0;
}

// Minimal CSV reader for our own report schema.
MetricsReport read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    MetricsReport report;
    std::string line;
    std::getline(in, line);
    if (line != csv_header()) throw std::runtime_error(path + ": unexpected CSV header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        MetricsRow row;
        std::getline(ss, row.scenario, ',');
        std::getline(ss, row.layout, ',');
        std::getline(ss, field, ',');
        row.cameras = std::stoi(field);
        std::getline(ss, row.fusion, ',');
        std::getline(ss, field, ',');
        row.noise = std::stod(field);
        std::getline(ss, row.axis, ',');
        std::getline(ss, field, ',');
        row.displacement_mm = std::stod(field);
        std::getline(ss, field, ',');
        row.mean_error_deg =
            field.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(field);
        std::getline(ss, field, ',');
        row.availability_pct = std::stod(field);
        std::getline(ss, field, ',');
        row.n_frames = std::stoi(field);
        report.rows.push_back(row);
        report.per_sensor.emplace_back();
    }
    return report;
}

int cmd_report(const std::vector<std::string>& csv_paths, const std::string& out_flag) {
    std::vector<MetricsReport> reports;
    for (const auto& p : csv_paths) reports.push_back(read_csv(p));
    const MetricsReport merged = summarize(reports);

    const std::string out_dir = resolve_out_dir(out_flag, ".");
    fs::create_directories(out_dir);
    const std::string merged_path = (fs::path(out_dir) / "summary.csv").string();
    std::ofstream out(merged_path, std::ios::binary);
    out << report_to_csv(merged);
    std::cout << "wrote " << merged_path << '\n';

    // Side-by-side case0 vs case1 table per (cameras, noise) for trend reads.
    std::map<std::tuple<std::string, int, std::string, double, std::string, double>,
             std::pair<std::string, std::string>>
        pivot;
    for (const auto& row : merged.rows) {
        auto key = std::make_tuple(row.scenario, row.cameras, row.fusion, row.noise, row.axis,
                                   row.displacement_mm);
        std::ostringstream cell;
        if (std::isfinite(row.mean_error_deg)) cell << row.mean_error_deg;
        cell << " (" << row.availability_pct << "%)";
        if (row.layout == "case0")
            pivot[key].first = cell.str();
        else
            pivot[key].second = cell.str();
    }
    std::cout << "scenario cameras fusion noise axis disp | case0 | case1\n";
    for (const auto& [key, cells] : pivot) {
        const auto& [sc, cams, fusion, noise, axis, disp] = key;
        std::cout << sc << ' ' << cams << ' ' << fusion << ' ' << noise << ' ' << axis << ' '
                  << disp << " | " << (cells.first.empty() ? "-" : cells.first) << " | "
                  << (cells.second.empty() ? "-" : cells.second) << '\n';
    }
    return 0;
}

int cmd_selftest() {
    int failures = 0;
    const auto check = [&](bool ok, const char* what) {
        std::cout << (ok ? "ok   " : "FAIL ") << what << '\n';
        if (!ok) ++failures;
    };

    RngStream rng(7);
    bool refl_ok = true;
    for (int i = 0; i < 200; ++i) {
        const Vec3 c(rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50));
        const double r = rng.uniform(5, 10);
        const auto rand_outside = [&] {
            while (true) {
                const Vec3 p(rng.uniform(-300, 300), rng.uniform(-300, 300),
                             rng.uniform(-300, 300));
                if ((p - c).norm() > r * 1.5) return p;
            }
        };
        const Vec3 light = rand_outside(), obs = rand_outside();
        const auto q = reflect_on_sphere(c, r, light, obs);
        if (!q) continue;
        const Vec3 n = (*q - c).normalized();
        const Vec3 li = (light - *q).normalized();
        const Vec3 oi = (obs - *q).normalized();
        const double res = std::abs(std::acos(std::clamp(n.dot(li), -1.0, 1.0)) -
                                    std::acos(std::clamp(n.dot(oi), -1.0, 1.0)));
        refl_ok = refl_ok && res < 1e-9 && std::abs((*q - c).norm() - r) < 1e-9;
    }
    check(refl_ok, "sphere reflection residuals < 1e-9");

    const std::array<Vec2, 4> src = {Vec2(0, 0), Vec2(10, 1), Vec2(9, 8), Vec2(-1, 7)};
    const std::array<Vec2, 4> dst = {Vec2(0, 0), Vec2(500, 0), Vec2(500, 300), Vec2(0, 300)};
    const auto h = homography_from_correspondences(src, dst);
    bool homog_ok = h.has_value();
    if (homog_ok)
        for (int i = 0; i < 4; ++i)
            homog_ok = homog_ok && (*homography_apply(*h, src[i]) - dst[i]).norm() < 1e-9;
    check(homog_ok, "4-point homography round trip < 1e-9");

    std::vector<SensorOutput> outs(2);
    outs[0] = {{0, EyeSide::left}, Vec2(0, 0), true, 15.0};
    outs[1] = {{1, EyeSide::left}, Vec2(3, 3), true, 30.0};
    const auto fused = fuse_head_pose(outs, 45.0);
    check(fused.available && std::abs(fused.weights[0] - 2.0 / 3.0) < 1e-12 &&
              std::abs(fused.weights[1] - 1.0 / 3.0) < 1e-12,
          "head-pose fusion weights {15,30} -> {2/3, 1/3}");

    std::cout << (failures == 0 ? "selftest passed\n" : "selftest FAILED\n");
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-view gaze estimation simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::uint64_t seed = 0;
    int jobs = 1;
    std::vector<std::string> csv_paths;

    auto* sim = app.add_subcommand("simulate", "Run scenarios from a config file");
    sim->add_option("--config", config_path, "Run configuration (JSON)")->required();
    auto* seed_opt = sim->add_option("--seed", seed, "Override the config seed");
    sim->add_option("--jobs", jobs, "Worker thread count")->check(CLI::PositiveNumber);
    sim->add_option("--out", out_dir, "Output directory (overrides config and MVGAZE_OUT)");

    auto* rep = app.add_subcommand("report", "Merge and pivot existing report CSVs");
    rep->add_option("csvs", csv_paths, "Report CSV files")->required()->expected(-1);
    rep->add_option("--out", out_dir, "Output directory");

    app.add_subcommand("selftest", "Run built-in consistency checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("simulate"))
            return cmd_simulate(config_path, seed, seed_opt->count() > 0, out_dir, jobs);
        if (app.got_subcommand("report")) return cmd_report(csv_paths, out_dir);
        return cmd_selftest();
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 1;
    }
}
