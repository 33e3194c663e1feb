#include "mvgaze/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mvgaze {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path + ": " + msg);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (const auto& [key, _] : obj.items())
        if (!allowed.count(key)) fail(path + "." + key, "unknown key");
}

double get_num(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail(path + "." + key, "expected a number");
    return obj[key].get<double>();
}

std::vector<double> get_num_list(const json& obj, const std::string& path, const char* key,
                                 std::vector<double> fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_array() || obj[key].empty())
        fail(path + "." + key, "expected a non-empty array of numbers");
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number()) fail(path + "." + key, "expected a non-empty array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

LayoutCase parse_layout(const std::string& s, const std::string& path) {
    if (s == "case0") return LayoutCase::case0;
    if (s == "case1") return LayoutCase::case1;
    fail(path, "invalid layout '" + s + "' (expected case0 or case1)");
}

FusionMethod parse_fusion(const std::string& s, const std::string& path) {
    if (s == "simple") return FusionMethod::simple;
    if (s == "head_pose") return FusionMethod::head_pose;
    if (s == "behavior") return FusionMethod::behavior;
    if (s == "best_camera") return FusionMethod::best_camera;
    fail(path, "invalid fusion method '" + s + "'");
}

const char* layout_str(LayoutCase l) { return l == LayoutCase::case0 ? "case0" : "case1"; }

const char* fusion_str(FusionMethod f) {
    switch (f) {
        case FusionMethod::simple: return "simple";
        case FusionMethod::head_pose: return "head_pose";
        case FusionMethod::behavior: return "behavior";
        case FusionMethod::best_camera: return "best_camera";
    }
    return "simple";
}

ScenarioEntry parse_entry(const json& e, const std::string& path) {
    check_keys(e, path,
               {"name", "scenario", "layouts", "cameras", "fusion", "noise_levels",
                "noise_multipliers", "calibration_position", "mh_x_offsets", "mh_y_offsets",
                "mh_z_offsets", "calibration_frames", "test_frames", "head_mode", "two_eyes",
                "ipd_mm", "ridge_lambda", "fit_order", "alpha_max_deg", "standoff_mm",
                "eye"});
    ScenarioEntry entry;
    if (!e.contains("name") || !e["name"].is_string()) fail(path + ".name", "required string");
    entry.name = e["name"].get<std::string>();

    if (!e.contains("scenario")) fail(path + ".scenario", "required (SH or MH)");
    const std::string sc = e["scenario"].get<std::string>();
    if (sc != "SH" && sc != "MH") fail(path + ".scenario", "expected SH or MH");
    entry.base.scenario = sc == "SH" ? Scenario::sh : Scenario::mh;

    if (e.contains("layouts")) {
        entry.layouts.clear();
        for (const auto& l : e["layouts"])
            entry.layouts.push_back(parse_layout(l.get<std::string>(), path + ".layouts"));
        if (entry.layouts.empty()) fail(path + ".layouts", "sweep list must be non-empty");
    }
    if (e.contains("cameras")) {
        entry.camera_counts.clear();
        for (const auto& c : e["cameras"]) {
            const int n = c.get<int>();
            if (n < 1) fail(path + ".cameras", "camera count must be >= 1");
            entry.camera_counts.push_back(n);
        }
        if (entry.camera_counts.empty()) fail(path + ".cameras", "sweep list must be non-empty");
    }
    if (e.contains("fusion")) {
        entry.fusions.clear();
        for (const auto& f : e["fusion"])
            entry.fusions.push_back(parse_fusion(f.get<std::string>(), path + ".fusion"));
        if (entry.fusions.empty()) fail(path + ".fusion", "sweep list must be non-empty");
    }

    entry.base.noise_levels = get_num_list(e, path, "noise_levels", {0.0});
    for (double n : entry.base.noise_levels)
        if (n < 0) fail(path + ".noise_levels", "noise level must be >= 0");
    if (e.contains("noise_multipliers"))
        entry.base.noise_multipliers = get_num_list(e, path, "noise_multipliers", {});

    if (e.contains("calibration_position")) {
        const auto v = get_num_list(e, path, "calibration_position", {});
        if (v.size() != 3) fail(path + ".calibration_position", "expected [x, y, z] mm");
        entry.base.calibration_position = Vec3(v[0], v[1], v[2]);
    }
    entry.base.mh_x_offsets = get_num_list(e, path, "mh_x_offsets", entry.base.mh_x_offsets);
    entry.base.mh_y_offsets = get_num_list(e, path, "mh_y_offsets", entry.base.mh_y_offsets);
    entry.base.mh_z_offsets = get_num_list(e, path, "mh_z_offsets", entry.base.mh_z_offsets);

    entry.base.calibration_frames =
        int(get_num(e, path, "calibration_frames", entry.base.calibration_frames));
    entry.base.test_frames = int(get_num(e, path, "test_frames", entry.base.test_frames));
    if (entry.base.calibration_frames < 1 || entry.base.test_frames < 1)
        fail(path, "frame counts must be >= 1");

    if (e.contains("head_mode")) {
        const std::string hm = e["head_mode"].get<std::string>();
        if (hm == "follow_target")
            entry.base.head_mode = HeadMode::follow_target;
        else if (hm == "face_screen")
            entry.base.head_mode = HeadMode::face_screen;
        else
            fail(path + ".head_mode", "expected follow_target or face_screen");
    }
    if (e.contains("two_eyes")) entry.base.two_eyes = e["two_eyes"].get<bool>();
    entry.base.ipd_mm = get_num(e, path, "ipd_mm", entry.base.ipd_mm);
    entry.base.ridge_lambda = get_num(e, path, "ridge_lambda", entry.base.ridge_lambda);
    if (entry.base.ridge_lambda < 0) fail(path + ".ridge_lambda", "must be >= 0");
    if (e.contains("fit_order")) {
        const std::string fo = e["fit_order"].get<std::string>();
        if (fo == "affine")
            entry.base.fit_order = FitOrder::affine;
        else if (fo == "quadratic")
            entry.base.fit_order = FitOrder::quadratic;
        else
            fail(path + ".fit_order", "expected affine or quadratic");
    }
    entry.base.alpha_max_deg = get_num(e, path, "alpha_max_deg", entry.base.alpha_max_deg);
    entry.base.standoff_mm = get_num(e, path, "standoff_mm", entry.base.standoff_mm);

    if (e.contains("eye")) {
        const auto& eye = e["eye"];
        check_keys(eye, path + ".eye",
                   {"cornea_radius_mm", "cornea_to_pupil_mm", "alpha_deg", "beta_deg",
                    "n_cornea"});
        auto& p = entry.base.eye_params;
        p.cornea_radius_mm = get_num(eye, path + ".eye", "cornea_radius_mm", p.cornea_radius_mm);
        p.cornea_to_pupil_mm =
            get_num(eye, path + ".eye", "cornea_to_pupil_mm", p.cornea_to_pupil_mm);
        p.alpha_deg = get_num(eye, path + ".eye", "alpha_deg", p.alpha_deg);
        p.beta_deg = get_num(eye, path + ".eye", "beta_deg", p.beta_deg);
        p.n_cornea = get_num(eye, path + ".eye", "n_cornea", p.n_cornea);
        try {
            p.validate();
        } catch (const std::exception& ex) {
            fail(path + ".eye", ex.what());
        }
    }
    return entry;
}

}  // namespace

RunConfig parse_config_string(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw ConfigError(std::string("config parse error: ") + ex.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    check_keys(root, "$", {"version", "seed", "output_dir", "screen", "scenarios"});

    RunConfig cfg;
    if (!root.contains("version")) fail("$.version", "required");
    cfg.version = root["version"].get<int>();
    if (cfg.version != 1) fail("$.version", "unknown config version " + std::to_string(cfg.version));
    if (root.contains("seed")) cfg.seed = root["seed"].get<std::uint64_t>();
    if (root.contains("output_dir")) cfg.output_dir = root["output_dir"].get<std::string>();

    Screen screen;
    if (root.contains("screen")) {
        check_keys(root["screen"], "$.screen", {"width_mm", "height_mm"});
        screen.width_mm = get_num(root["screen"], "$.screen", "width_mm", screen.width_mm);
        screen.height_mm = get_num(root["screen"], "$.screen", "height_mm", screen.height_mm);
        if (screen.width_mm <= 0 || screen.height_mm <= 0)
            fail("$.screen", "dimensions must be > 0");
    }

    if (!root.contains("scenarios") || !root["scenarios"].is_array() ||
        root["scenarios"].empty())
        fail("$.scenarios", "required non-empty array");
    int i = 0;
    for (const auto& e : root["scenarios"]) {
        auto entry = parse_entry(e, "$.scenarios[" + std::to_string(i) + "]");
        entry.base.screen = screen;
        entry.base.seed = cfg.seed;
        cfg.entries.push_back(std::move(entry));
        ++i;
    }
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_string(ss.str());
}

std::string config_to_json(const RunConfig& config) {
    json root;
    root["version"] = config.version;
    root["seed"] = config.seed;
    root["output_dir"] = config.output_dir;
    if (!config.entries.empty()) {
        const Screen& s = config.entries.front().base.screen;
        root["screen"] = {{"width_mm", s.width_mm}, {"height_mm", s.height_mm}};
    }
    root["scenarios"] = json::array();
    for (const auto& e : config.entries) {
        json j;
        j["name"] = e.name;
        j["scenario"] = e.base.scenario == Scenario::sh ? "SH" : "MH";
        j["layouts"] = json::array();
        for (auto l : e.layouts) j["layouts"].push_back(layout_str(l));
        j["cameras"] = e.camera_counts;
        j["fusion"] = json::array();
        for (auto f : e.fusions) j["fusion"].push_back(fusion_str(f));
        j["noise_levels"] = e.base.noise_levels;
        if (!e.base.noise_multipliers.empty())
            j["noise_multipliers"] = e.base.noise_multipliers;
        j["calibration_position"] = {e.base.calibration_position.x(),
                                     e.base.calibration_position.y(),
                                     e.base.calibration_position.z()};
        j["mh_x_offsets"] = e.base.mh_x_offsets;
        j["mh_y_offsets"] = e.base.mh_y_offsets;
        j["mh_z_offsets"] = e.base.mh_z_offsets;
        j["calibration_frames"] = e.base.calibration_frames;
        j["test_frames"] = e.base.test_frames;
        j["head_mode"] =
            e.base.head_mode == HeadMode::follow_target ? "follow_target" : "face_screen";
        j["two_eyes"] = e.base.two_eyes;
        j["ipd_mm"] = e.base.ipd_mm;
        j["ridge_lambda"] = e.base.ridge_lambda;
        j["fit_order"] = e.base.fit_order == FitOrder::affine ? "affine" : "quadratic";
        j["alpha_max_deg"] = e.base.alpha_max_deg;
        j["standoff_mm"] = e.base.standoff_mm;
        j["eye"] = {{"cornea_radius_mm", e.base.eye_params.cornea_radius_mm},
                    {"cornea_to_pupil_mm", e.base.eye_params.cornea_to_pupil_mm},
                    {"alpha_deg", e.base.eye_params.alpha_deg},
                    {"beta_deg", e.base.eye_params.beta_deg},
                    {"n_cornea", e.base.eye_params.n_cornea}};
        root["scenarios"].push_back(j);
    }
    return root.dump(2);
}

std::vector<NamedSpec> expand_runs(const RunConfig& config) {
    std::vector<NamedSpec> runs;
    for (const auto& e : config.entries)
        for (auto layout : e.layouts)
            for (int count : e.camera_counts)
                for (auto fusion : e.fusions) {
                    NamedSpec run;
                    run.spec = e.base;
                    run.spec.layout = layout;
                    run.spec.camera_count = count;
                    run.spec.fusion = fusion;
                    run.name = e.name + "_" + layout_str(layout) + "_c" +
                               std::to_string(count) + "_" + fusion_str(fusion);
                    runs.push_back(std::move(run));
                }
    return runs;
}

std::vector<std::string> write_reports(const std::vector<std::string>& names,
                                       const std::vector<MetricsReport>& reports,
                                       const RunConfig& config,
                                       const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> paths;
    for (size_t i = 0; i < reports.size(); ++i) {
        const std::string path = (fs::path(out_dir) / (names[i] + ".csv")).string();
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path);
        out << report_to_csv(reports[i]);
        paths.push_back(path);
    }
    json manifest;
    manifest["manifest_version"] = 1;
    manifest["seed"] = config.seed;
    manifest["config"] = json::parse(config_to_json(config));
    manifest["outputs"] = names;
    const std::string mpath = (fs::path(out_dir) / "manifest.json").string();
    std::ofstream mout(mpath, std::ios::binary);
    if (!mout) throw std::runtime_error("cannot write " + mpath);
    mout << manifest.dump(2) << '\n';
    paths.push_back(mpath);
    return paths;
}

std::string calibration_to_json(const CalibrationOutcome& calibration) {
    json root;
    root["calibration_version"] = 1;
    root["sensors"] = json::array();
    for (size_t s = 0; s < calibration.sensors.size(); ++s) {
        json j;
        j["camera"] = calibration.sensors[s].camera;
        j["eye"] = calibration.sensors[s].eye == EyeSide::left ? "L" : "R";
        j["fitted"] = calibration.sensor_ok[s];
        if (calibration.sensor_ok[s]) {
            const auto& m = calibration.models[s];
            j["model"] = {{"order", m.order == FitOrder::affine ? "affine" : "quadratic"},
                          {"lambda", m.lambda},
                          {"rms_residual_mm", m.rms_residual_mm},
                          {"coeffs", json::array()}};
            for (int r = 0; r < m.coeffs.rows(); ++r)
                j["model"]["coeffs"].push_back({m.coeffs(r, 0), m.coeffs(r, 1)});
        }
        const auto& map = calibration.weight_maps[s];
        j["weight_map"] = {{"x0", map.x0}, {"x1", map.x1}, {"y0", map.y0}, {"y1", map.y1},
                           {"nx", map.nx}, {"ny", map.ny}, {"values", map.values}};
        json stats = json::array();
        for (const auto& st : calibration.stats[s])
            stats.push_back({{"mean_error_deg", st.mean_error_deg},
                             {"availability", st.availability},
                             {"n_samples", st.n_samples}});
        j["point_stats"] = stats;
        root["sensors"].push_back(j);
    }
    root["targets"] = json::array();
    for (const auto& t : calibration.targets) root["targets"].push_back({t.x(), t.y()});
    return root.dump(2);
}

CalibrationOutcome calibration_from_json(const std::string& text) {
    const json root = json::parse(text);
    if (!root.contains("calibration_version") || root["calibration_version"].get<int>() != 1)
        throw ConfigError("unknown calibration_version");
    CalibrationOutcome out;
    for (const auto& j : root["sensors"]) {
        SensorId id;
        id.camera = j["camera"].get<int>();
        id.eye = j["eye"].get<std::string>() == "L" ? EyeSide::left : EyeSide::right;
        out.sensors.push_back(id);

        CalibrationModel m;
        const bool fitted = j["fitted"].get<bool>();
        if (fitted) {
            const auto& jm = j["model"];
            m.order = jm["order"].get<std::string>() == "affine" ? FitOrder::affine
                                                                 : FitOrder::quadratic;
            m.lambda = jm["lambda"].get<double>();
            m.rms_residual_mm = jm["rms_residual_mm"].get<double>();
            const auto& rows = jm["coeffs"];
            m.coeffs.resize(rows.size(), 2);
            for (size_t r = 0; r < rows.size(); ++r) {
                m.coeffs(r, 0) = rows[r][0].get<double>();
                m.coeffs(r, 1) = rows[r][1].get<double>();
            }
            m.fitted = true;
        }
        out.models.push_back(std::move(m));
        out.sensor_ok.push_back(fitted);

        const auto& jm = j["weight_map"];
        WeightMap map;
        map.x0 = jm["x0"].get<double>();
        map.x1 = jm["x1"].get<double>();
        map.y0 = jm["y0"].get<double>();
        map.y1 = jm["y1"].get<double>();
        map.nx = jm["nx"].get<int>();
        map.ny = jm["ny"].get<int>();
        map.values = jm["values"].get<std::vector<double>>();
        out.weight_maps.push_back(std::move(map));

        std::vector<PointStats> stats;
        for (const auto& st : j["point_stats"])
            stats.push_back({st["mean_error_deg"].get<double>(),
                             st["availability"].get<double>(), st["n_samples"].get<int>()});
        out.stats.push_back(std::move(stats));
    }
    for (const auto& t : root["targets"])
        out.targets.emplace_back(t[0].get<double>(), t[1].get<double>());
    return out;
}

}  // namespace mvgaze
