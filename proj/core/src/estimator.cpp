#include "mvgaze/estimator.hpp"

namespace mvgaze {

Result<RawGaze> estimate_raw_por(const FeatureSet& features, const Screen& screen,
                                 const SensorId& sensor) {
    using R = Result<RawGaze>;
    if (!features.valid) return R::err(Error::unavailable);

    const auto h = homography_from_correspondences(features.glints, screen.led_screen_xy());
    if (!h) return R::err(h.error());
    const auto por = homography_apply(*h, features.pupil);
    if (!por) return R::err(Error::degenerate_configuration);

    RawGaze g;
    g.por = *por;
    g.sensor = sensor;
    return R::ok(g);
}

}  // namespace mvgaze
