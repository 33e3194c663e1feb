#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <optional>
#include <stdexcept>
#include <string>

namespace mvgaze {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Failure codes shared across modules. Most solvers report expected
// geometric failures through Result rather than exceptions.
enum class Error {
    none,
    behind,
    degenerate,
    no_reflection,
    no_refraction,
    degenerate_configuration,
    point_at_infinity,
    gimbal_degenerate,
    yaw_undefined,
    ill_conditioned,
    uncalibratable_point,
    unavailable,
    uncalibratable,
};

const char* error_name(Error e);

template <typename T>
class Result {
public:
    static Result ok(T v) {
        Result r;
        r.value_ = std::move(v);
        return r;
    }
    static Result err(Error e) {
        Result r;
        r.error_ = e;
        return r;
    }

    bool has_value() const { return value_.has_value(); }
    explicit operator bool() const { return has_value(); }

    const T& value() const {
        if (!value_) throw std::logic_error(std::string("Result::value on error: ") + error_name(error_));
        return *value_;
    }
    T& value() {
        if (!value_) throw std::logic_error(std::string("Result::value on error: ") + error_name(error_));
        return *value_;
    }
    const T& operator*() const { return value(); }
    const T* operator->() const { return &value(); }

    Error error() const { return error_; }

private:
    Result() = default;
    std::optional<T> value_;
    Error error_ = Error::none;
};

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

}  // namespace mvgaze
