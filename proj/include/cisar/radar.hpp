#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "cisar/errors.hpp"
#include "cisar/scene.hpp"

namespace cisar {

/// Scanning-radar sensing parameters. Angles are in degrees, distances in
/// meters. Defaults follow the 300 GHz bench sensor and desk geometry.
struct RadarConfig {
    double range_resolution = 0.03;  // range bin width
    double angular_step = 0.25;      // scan step between azimuth samples
    double beamwidth_3db = 1.3;      // two-way 3 dB beamwidth
    double scan_min = -13.0;
    double scan_max = 13.0;
    int aperture_count = 72;         // positions on the circular aperture
    double standoff = 3.65;          // sensor to turntable axis
    double noise_std = 0.01;
    int azimuth_upsample = 4;        // reflectivity grid density over scan grid

    void validate() const {
        if (range_resolution <= 0 || angular_step <= 0 || beamwidth_3db <= 0 || standoff <= 0)
            throw ConfigError("radar config: resolutions, beamwidth and standoff must be positive");
        if (scan_min >= scan_max)
            throw ConfigError("radar config: scan_min must be below scan_max");
        if (aperture_count < 1)
            throw ConfigError("radar config: aperture_count must be >= 1");
        if (azimuth_upsample < 1)
            throw ConfigError("radar config: azimuth_upsample must be >= 1");
        if (noise_std < 0)
            throw ConfigError("radar config: noise_std must be >= 0");
        double steps = (scan_max - scan_min) / angular_step;
        if (std::abs(steps - std::round(steps)) > 1e-9)
            throw ConfigError("radar config: scan span must be a whole number of angular steps");
    }

    /// Scan samples per aperture position.
    int n_theta() const {
        return static_cast<int>(std::round((scan_max - scan_min) / angular_step)) + 1;
    }

    /// Azimuth reflectivity samples per aperture position.
    int n_x() const { return n_theta() * azimuth_upsample; }

    /// Reflectivity grid step in degrees.
    double fine_step() const { return angular_step / azimuth_upsample; }

    /// Turntable angle of aperture position l (1-based), radians.
    double aperture_angle(int l) const {
        return 2.0 * std::numbers::pi * (l - 1) / aperture_count;
    }
};

/// Discrete samples of the antenna beam h(theta), peak-normalized, symmetric
/// about the center tap.
struct BeamPattern {
    Eigen::VectorXd taps;  // length 2*half_width + 1
    int half_width = 0;
    double step_deg = 0.0;

    double tap(int offset) const { return taps(half_width + offset); }
};

/// Gaussian mainlobe with full width at half maximum equal to the two-way
/// 3 dB beamwidth, sampled every `step_deg` and truncated at three sigma.
inline BeamPattern beam_pattern(double beamwidth_3db_deg, double step_deg) {
    if (beamwidth_3db_deg < step_deg)
        throw ConfigError("beam pattern: beamwidth below the angular step (under-resolved beam)");
    const double sigma = beamwidth_3db_deg / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
    BeamPattern beam;
    beam.half_width = static_cast<int>(std::floor(3.0 * sigma / step_deg));
    beam.step_deg = step_deg;
    beam.taps.resize(2 * beam.half_width + 1);
    for (int k = -beam.half_width; k <= beam.half_width; ++k) {
        double theta = k * step_deg;
        beam.taps(beam.half_width + k) = std::exp(-theta * theta / (2.0 * sigma * sigma));
    }
    return beam;
}

inline BeamPattern beam_pattern(const RadarConfig& cfg) {
    return beam_pattern(cfg.beamwidth_3db, cfg.angular_step);
}

/// Beam sampled on the reflectivity grid, for building the forward operator.
inline BeamPattern fine_beam_pattern(const RadarConfig& cfg) {
    return beam_pattern(cfg.beamwidth_3db, cfg.fine_step());
}

/// Forward model acting per range bin: each bin of the reflectivity vector is
/// convolved with the beam on the fine azimuth grid and subsampled onto the
/// scan grid. Equivalent to the Kronecker product of an identity over range
/// bins with the dense convolve-then-select block.
struct MeasurementOperator {
    Eigen::MatrixXd per_bin;  // n_theta x n_x, shared by every range bin
    int range_bins = 1;

    int n_theta() const { return static_cast<int>(per_bin.rows()); }
    int n_x() const { return static_cast<int>(per_bin.cols()); }
    Eigen::Index rows() const { return static_cast<Eigen::Index>(n_theta()) * range_bins; }
    Eigen::Index cols() const { return static_cast<Eigen::Index>(n_x()) * range_bins; }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
        if (x.size() != cols())
            throw NumericError("measurement operator: input length mismatch");
        Eigen::VectorXd y(rows());
        for (int bin = 0; bin < range_bins; ++bin)
            y.segment(static_cast<Eigen::Index>(bin) * n_theta(), n_theta()).noalias() =
                per_bin * x.segment(static_cast<Eigen::Index>(bin) * n_x(), n_x());
        return y;
    }

    Eigen::VectorXd apply_adjoint(const Eigen::VectorXd& y) const {
        if (y.size() != rows())
            throw NumericError("measurement operator: adjoint input length mismatch");
        Eigen::VectorXd x(cols());
        for (int bin = 0; bin < range_bins; ++bin)
            x.segment(static_cast<Eigen::Index>(bin) * n_x(), n_x()).noalias() =
                per_bin.transpose() * y.segment(static_cast<Eigen::Index>(bin) * n_theta(), n_theta());
        return x;
    }

    /// Materialized matrix; intended for small diagnostic problems only.
    Eigen::MatrixXd dense() const {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows(), cols());
        for (int bin = 0; bin < range_bins; ++bin)
            a.block(static_cast<Eigen::Index>(bin) * n_theta(),
                    static_cast<Eigen::Index>(bin) * n_x(), n_theta(), n_x()) = per_bin;
        return a;
    }
};

/// Builds the convolve-then-subsample block from beam taps placed on the
/// n_x grid: row t reads the beam centered at fine index t*(n_x/n_theta),
/// zero-padded at the scan edges.
inline MeasurementOperator build_operator(const BeamPattern& beam, int n_x, int n_theta,
                                          int n_r) {
    if (n_x < n_theta)
        throw ConfigError("operator: reflectivity grid must be at least as fine as the scan grid");
    if (n_theta < 1 || n_r < 1)
        throw ConfigError("operator: grid sizes must be positive");
    if (n_x % n_theta != 0)
        throw ConfigError("operator: non-integer subsample ratio n_x/n_theta");
    const int ratio = n_x / n_theta;
    MeasurementOperator op;
    op.range_bins = n_r;
    op.per_bin = Eigen::MatrixXd::Zero(n_theta, n_x);
    for (int t = 0; t < n_theta; ++t) {
        const int center = t * ratio;
        for (int k = -beam.half_width; k <= beam.half_width; ++k) {
            int j = center - k;
            if (j >= 0 && j < n_x) op.per_bin(t, j) = beam.tap(k);
        }
    }
    return op;
}

/// Polar sampling grid shared by the simulator and the reconstruction:
/// fine azimuth angles cross range bins centered on the standoff distance.
struct PolarGrid {
    int n_x = 0;
    int n_r = 0;
    double theta_min_deg = 0.0;
    double fine_step_deg = 0.0;
    double r_min = 0.0;
    double dr = 0.0;

    double angle_of(int i) const { return theta_min_deg + i * fine_step_deg; }
    double range_of(int j) const { return r_min + j * dr; }
};

/// Derives the polar grid from the sensing geometry and the target size.
/// The range window covers the scene's ground-plane footprint about the
/// standoff distance with a two-bin margin.
inline PolarGrid polar_grid(const RadarConfig& cfg, double scene_ground_radius) {
    PolarGrid g;
    g.n_x = cfg.n_x();
    g.theta_min_deg = cfg.scan_min;
    g.fine_step_deg = cfg.fine_step();
    g.dr = cfg.range_resolution;
    double half = (std::ceil(scene_ground_radius / g.dr) + 2.0) * g.dr;
    half = std::min(half, cfg.standoff - g.dr);  // keep the window in front of the sensor
    int half_bins = static_cast<int>(std::round(half / g.dr));
    g.n_r = 2 * half_bins + 1;
    g.r_min = cfg.standoff - half_bins * g.dr;
    return g;
}

inline PolarGrid polar_grid(const RadarConfig& cfg, const Scene& scene) {
    return polar_grid(cfg, scene.ground_radius());
}

/// Ground-plane polar coordinates of a world point as seen by the sensor,
/// which sits at (0, -standoff) looking along +y. Returns (azimuth degrees
/// from boresight, range meters).
inline std::pair<double, double> sensor_polar(double x, double y, double standoff) {
    const double rel_y = y + standoff;
    const double theta = std::atan2(x, rel_y) * 180.0 / std::numbers::pi;
    const double range = std::hypot(x, rel_y);
    return {theta, range};
}

}  // namespace cisar
