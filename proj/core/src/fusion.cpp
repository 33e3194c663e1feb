#include "mvgaze/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mvgaze {

namespace {

FusedGaze weighted_fuse(const std::vector<SensorOutput>& outputs,
                        std::vector<double> weights) {
    FusedGaze out;
    out.weights.assign(outputs.size(), 0.0);
    double sum = 0.0;
    for (size_t i = 0; i < outputs.size(); ++i) {
        if (!outputs[i].available) weights[i] = 0.0;
        sum += weights[i];
    }
    if (sum <= 0.0) return out;  // unavailable
    Vec2 por = Vec2::Zero();
    for (size_t i = 0; i < outputs.size(); ++i) {
        const double w = weights[i] / sum;
        out.weights[i] = w;
        por += w * outputs[i].por;
    }
    out.por = por;
    out.available = true;
    return out;
}

}  // namespace

FusedGaze fuse_simple(const std::vector<SensorOutput>& outputs) {
    std::vector<double> w(outputs.size(), 1.0);
    return weighted_fuse(outputs, std::move(w));
}

FusedGaze fuse_head_pose(const std::vector<SensorOutput>& outputs, double alpha_max_deg) {
    if (alpha_max_deg <= 0.0) throw std::invalid_argument("fuse_head_pose: alpha_max must be > 0");
    std::vector<double> w(outputs.size());
    double sum = 0.0;
    for (size_t i = 0; i < outputs.size(); ++i) {
        w[i] = std::clamp((alpha_max_deg - std::abs(outputs[i].head_yaw_deg)) / alpha_max_deg,
                          0.0, 1.0);
        if (outputs[i].available) sum += w[i];
    }
    if (sum <= 0.0) return fuse_simple(outputs);
    return weighted_fuse(outputs, std::move(w));
}

FusedGaze fuse_behavior(const std::vector<SensorOutput>& outputs,
                        const std::vector<const WeightMap*>& maps, const Screen& screen) {
    const FusedGaze anchor = fuse_simple(outputs);
    if (!anchor.available) return anchor;
    const Vec2 at = screen.clamp(anchor.por);
    std::vector<double> w(outputs.size(), 0.0);
    for (size_t i = 0; i < outputs.size(); ++i)
        if (outputs[i].available && maps[i]) w[i] = maps[i]->lookup(at);
    FusedGaze fused = weighted_fuse(outputs, std::move(w));
    // All looked-up weights zero: fall back to the anchor average.
    return fused.available ? fused : anchor;
}

FusedGaze fuse_best_camera(const std::vector<SensorOutput>& outputs) {
    double best_yaw = std::numeric_limits<double>::infinity();
    int best_cam = -1;
    for (const auto& o : outputs)
        if (o.available && std::abs(o.head_yaw_deg) < best_yaw) {
            best_yaw = std::abs(o.head_yaw_deg);
            best_cam = o.sensor.camera;
        }
    std::vector<double> w(outputs.size(), 0.0);
    for (size_t i = 0; i < outputs.size(); ++i)
        if (outputs[i].sensor.camera == best_cam) w[i] = 1.0;
    return weighted_fuse(outputs, std::move(w));
}

}  // namespace mvgaze
