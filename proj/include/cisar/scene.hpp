#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "cisar/errors.hpp"

namespace cisar {

/// A straight reflector. Zero-length segments act as point scatterers.
/// `weight` is the radar reflectivity; the camera sees geometry only.
struct Segment {
    Eigen::Vector3d a;
    Eigen::Vector3d b;
    double weight = 1.0;
    std::string label = "body";

    double length() const { return (b - a).norm(); }
};

struct Extent {
    Eigen::Vector3d lo = Eigen::Vector3d::Zero();
    Eigen::Vector3d hi = Eigen::Vector3d::Zero();
};

/// Parametric extended target: weighted line segments on a turntable
/// centered at the origin of the target frame.
struct Scene {
    std::vector<Segment> segments;

    Extent extent() const {
        Extent e;
        if (segments.empty()) return e;
        e.lo = segments.front().a;
        e.hi = segments.front().a;
        for (const auto& s : segments) {
            e.lo = e.lo.cwiseMin(s.a).cwiseMin(s.b);
            e.hi = e.hi.cwiseMax(s.a).cwiseMax(s.b);
        }
        return e;
    }

    /// Largest ground-plane distance from the turntable axis to any endpoint.
    double ground_radius() const {
        double r = 0.0;
        for (const auto& s : segments) {
            r = std::max(r, std::hypot(s.a.x(), s.a.y()));
            r = std::max(r, std::hypot(s.b.x(), s.b.y()));
        }
        return r;
    }

    void validate() const {
        for (const auto& s : segments) {
            if (s.weight < 0.0) throw ConfigError("scene: segment weight must be >= 0");
            if (!s.a.allFinite() || !s.b.allFinite())
                throw ConfigError("scene: segment endpoints must be finite");
        }
    }
};

/// Scene rotated by `angle_rad` about the vertical turntable axis.
inline Scene rotated(const Scene& scene, double angle_rad) {
    const double c = std::cos(angle_rad), s = std::sin(angle_rad);
    Scene out = scene;
    for (auto& seg : out.segments) {
        auto rot = [&](const Eigen::Vector3d& p) {
            return Eigen::Vector3d(c * p.x() - s * p.y(), s * p.x() + c * p.y(), p.z());
        };
        seg.a = rot(seg.a);
        seg.b = rot(seg.b);
    }
    return out;
}

}  // namespace cisar
