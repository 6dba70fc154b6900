#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "cisar/errors.hpp"
#include "cisar/image.hpp"
#include "cisar/radar.hpp"
#include "cisar/sim.hpp"

namespace cisar {

/// Square Cartesian pixel grid in the target (turntable) frame, pixel (0,0)
/// at the top-left corner.
struct PixelGrid {
    int side = 64;
    double extent = 2.0;  // meters covered edge to edge
    double center_x = 0.0;
    double center_y = 0.0;

    void validate() const {
        if (side < 1) throw ConfigError("pixel grid: side must be >= 1");
        if (extent <= 0) throw ConfigError("pixel grid: extent must be positive");
    }

    double pixel_size() const { return extent / side; }

    /// World coordinates of the pixel center at (row i, column j).
    std::pair<double, double> world(int i, int j) const {
        const double s = pixel_size();
        return {center_x + (j + 0.5) * s - extent / 2.0,
                center_y + extent / 2.0 - (i + 0.5) * s};
    }

    Eigen::Index pixel_count() const { return static_cast<Eigen::Index>(side) * side; }
};

/// Linear interpolation along rows (range direction) to kappa-fold density;
/// azimuth rows are left untouched. The tail holds the last sample so the
/// output has exactly kappa * cols columns.
inline Eigen::MatrixXd upsample_columns(const Eigen::MatrixXd& m, int kappa) {
    if (kappa < 1) throw ConfigError("upsample: order must be >= 1");
    if (kappa == 1) return m;
    const Eigen::Index rows = m.rows(), cols = m.cols();
    Eigen::MatrixXd out(rows, cols * kappa);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (int f = 0; f < kappa; ++f) {
            const double frac = static_cast<double>(f) / kappa;
            if (j + 1 < cols)
                out.col(j * kappa + f) = (1.0 - frac) * m.col(j) + frac * m.col(j + 1);
            else
                out.col(j * kappa + f) = m.col(j);
        }
    }
    return out;
}

/// Per-pixel lookup indices into the range-upsampled reflectivity of one
/// aperture position; -1 marks pixels outside the scanned wedge or the
/// range window.
struct ApertureIndexMap {
    Eigen::ArrayXXi itheta;  // side x side, azimuth index or -1
    Eigen::ArrayXXi irange;  // side x side, upsampled range index or -1

    static constexpr int kOutOfView = -1;
};

/// Maps every pixel of the target-frame grid into aperture l's polar frame:
/// the pixel's world point rides the turntable to its rotated position, and
/// its sensor angle and range are quantized to the nearest cell of the
/// upsampled grid.
inline ApertureIndexMap index_map(const PixelGrid& grid, const RadarConfig& cfg,
                                  const PolarGrid& polar, int l, int kappa) {
    if (l < 1 || l > cfg.aperture_count)
        throw ConfigError("index map: aperture index out of range");
    if (kappa < 1) throw ConfigError("index map: upsample order must be >= 1");
    grid.validate();
    const double angle = cfg.aperture_angle(l);
    const double c = std::cos(angle), s = std::sin(angle);
    const double dr_up = polar.dr / kappa;
    const int n_r_up = polar.n_r * kappa;

    ApertureIndexMap map;
    map.itheta = Eigen::ArrayXXi::Constant(grid.side, grid.side, ApertureIndexMap::kOutOfView);
    map.irange = Eigen::ArrayXXi::Constant(grid.side, grid.side, ApertureIndexMap::kOutOfView);
    for (int i = 0; i < grid.side; ++i) {
        for (int j = 0; j < grid.side; ++j) {
            auto [qx, qy] = grid.world(i, j);
            const double px = c * qx - s * qy;
            const double py = s * qx + c * qy;
            auto [theta, range] = sensor_polar(px, py, cfg.standoff);
            const int it = static_cast<int>(std::lround((theta - polar.theta_min_deg) / polar.fine_step_deg));
            const int ir = static_cast<int>(std::lround((range - polar.r_min) / dr_up));
            if (it < 0 || it >= polar.n_x || ir < 0 || ir >= n_r_up) continue;
            map.itheta(i, j) = it;
            map.irange(i, j) = ir;
        }
    }
    return map;
}

/// Pulls one aperture's reconstruction onto the pixel grid; out-of-view
/// pixels contribute zero. Returns the packed image vector.
inline Eigen::VectorXd backproject_aperture(const Eigen::MatrixXd& upsampled,
                                            const ApertureIndexMap& map) {
    const int side = static_cast<int>(map.itheta.rows());
    Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(side) * side);
    for (int j = 0; j < side; ++j)
        for (int i = 0; i < side; ++i) {
            const int it = map.itheta(i, j), ir = map.irange(i, j);
            if (it < 0) continue;
            if (it >= upsampled.rows() || ir < 0 || ir >= upsampled.cols())
                throw NumericError("backproject: index map inconsistent with upsampled matrix");
            r(i + static_cast<Eigen::Index>(j) * side) = upsampled(it, ir);
        }
    return r;
}

inline Eigen::VectorXd backproject_aperture(const ReflectivityMap& xhat,
                                            const ApertureIndexMap& map, int kappa) {
    return backproject_aperture(upsample_columns(xhat.cells, kappa), map);
}

/// Pixelwise sum of every aperture's contribution, normalized to unit peak.
inline Image composite(const Stack& stack, int side) {
    if (stack.dim() != static_cast<Eigen::Index>(side) * side)
        throw NumericError("composite: stack dimension is not side*side");
    Eigen::VectorXd sum = stack.columns.rowwise().sum();
    return normalize_max(unpack(sum, side, side));
}

}  // namespace cisar
