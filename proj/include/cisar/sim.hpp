#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cisar/image.hpp"
#include "cisar/radar.hpp"
#include "cisar/scene.hpp"

namespace cisar {

/// Azimuth x range reflectivity of one aperture position on the polar grid.
struct ReflectivityMap {
    Eigen::MatrixXd cells;  // n_x rows (azimuth) x n_r cols (range)
    PolarGrid grid;
};

/// Range-profiled azimuth measurements of one aperture position, range bins
/// concatenated: y[t + bin*n_theta] is scan sample t of range bin `bin`.
struct Measurement {
    int aperture_index = 1;
    Eigen::VectorXd y;
};

namespace detail {

struct PolarSample {
    int itheta;
    int irange;
    double range;
    double value;
};

inline void collect_segment_samples(const Segment& seg, const PolarGrid& grid, double standoff,
                                    std::vector<PolarSample>& out) {
    const double len = seg.length();
    // Sample step small against both the range bin and the azimuth arc length.
    const double ds = std::min(grid.dr, standoff * grid.fine_step_deg * std::numbers::pi / 180.0) / 4.0;
    const int n = len > 0.0 ? static_cast<int>(std::ceil(len / ds)) + 1 : 1;
    for (int s = 0; s < n; ++s) {
        const double t = n > 1 ? static_cast<double>(s) / (n - 1) : 0.0;
        const Eigen::Vector3d p = seg.a + t * (seg.b - seg.a);
        auto [theta, range] = sensor_polar(p.x(), p.y(), standoff);
        const int itheta = static_cast<int>(std::lround((theta - grid.theta_min_deg) / grid.fine_step_deg));
        const int irange = static_cast<int>(std::lround((range - grid.r_min) / grid.dr));
        if (itheta < 0 || itheta >= grid.n_x || irange < 0 || irange >= grid.n_r) continue;
        const double value = len > 0.0 ? seg.weight * (len / n) : seg.weight;
        out.push_back({itheta, irange, range, value});
    }
}

}  // namespace detail

/// Ground-truth reflectivity of aperture position l: the scene is rotated by
/// the turntable angle, projected onto the sensor's polar grid, and weights
/// are accumulated per cell. Within each azimuth column only samples within
/// one range bin of the nearest return survive; deeper ones are occluded.
inline ReflectivityMap rasterize_scene(const Scene& scene, const RadarConfig& cfg, int l,
                                       const PolarGrid& grid) {
    if (l < 1 || l > cfg.aperture_count)
        throw ConfigError("rasterize: aperture index out of range");
    const Scene view = rotated(scene, cfg.aperture_angle(l));

    std::vector<detail::PolarSample> samples;
    for (const auto& seg : view.segments)
        detail::collect_segment_samples(seg, grid, cfg.standoff, samples);

    std::vector<double> nearest(static_cast<size_t>(grid.n_x),
                                std::numeric_limits<double>::infinity());
    for (const auto& s : samples)
        nearest[static_cast<size_t>(s.itheta)] = std::min(nearest[static_cast<size_t>(s.itheta)], s.range);

    ReflectivityMap map;
    map.grid = grid;
    map.cells = Eigen::MatrixXd::Zero(grid.n_x, grid.n_r);
    for (const auto& s : samples)
        if (s.range <= nearest[static_cast<size_t>(s.itheta)] + grid.dr)
            map.cells(s.itheta, s.irange) += s.value;
    return map;
}

/// y_l = A x_l + noise, with i.i.d. zero-mean Gaussian noise whose generator
/// is seeded from (seed, l) so per-aperture synthesis is reproducible in any
/// execution order.
inline Measurement synthesize(const ReflectivityMap& truth, const MeasurementOperator& op, int l,
                              double noise_std, uint64_t seed) {
    if (truth.cells.rows() != op.n_x() || truth.cells.cols() != op.range_bins)
        throw NumericError("synthesize: reflectivity and operator dimensions disagree");
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(truth.cells.data(), truth.cells.size());
    Measurement m;
    m.aperture_index = l;
    m.y = op.apply(x);
    if (noise_std > 0.0) {
        std::seed_seq seq{static_cast<uint64_t>(seed), static_cast<uint64_t>(l)};
        std::mt19937_64 rng(seq);
        std::normal_distribution<double> noise(0.0, noise_std);
        for (Eigen::Index i = 0; i < m.y.size(); ++i) m.y(i) += noise(rng);
    }
    return m;
}

inline Measurement synthesize(const Scene& scene, const RadarConfig& cfg, int l,
                              const MeasurementOperator& op, const PolarGrid& grid,
                              uint64_t seed) {
    return synthesize(rasterize_scene(scene, cfg, l, grid), op, l, cfg.noise_std, seed);
}

/// Synthetic greyscale camera view from the sensor platform: orthographic
/// projection of the rotated scene onto the plane facing the sensor
/// (horizontal position x vertical height), anti-aliased by bilinear
/// splatting. Geometry is drawn at unit brightness regardless of radar
/// reflectivity, so optically visible structure need not be radar-bright.
inline Image render_camera(const Scene& scene, const RadarConfig& cfg, int l, int cam_res,
                           double view_extent) {
    if (l < 1 || l > cfg.aperture_count)
        throw ConfigError("render_camera: aperture index out of range");
    if (cam_res < 1) throw ConfigError("render_camera: resolution must be positive");
    if (view_extent <= 0) throw ConfigError("render_camera: view extent must be positive");
    const Scene view = rotated(scene, cfg.aperture_angle(l));
    Image img = Image::zeros(cam_res, cam_res);

    const double px = view_extent / cam_res;  // meters per pixel
    auto splat = [&](double x, double z, double amount) {
        // Image columns span x in [-E/2, E/2]; rows span height z in [0, E],
        // ground at the bottom row.
        const double col = (x / view_extent + 0.5) * cam_res - 0.5;
        const double row = (1.0 - z / view_extent) * cam_res - 0.5;
        const int c0 = static_cast<int>(std::floor(col));
        const int r0 = static_cast<int>(std::floor(row));
        const double fc = col - c0, fr = row - r0;
        const double w[4] = {(1 - fr) * (1 - fc), (1 - fr) * fc, fr * (1 - fc), fr * fc};
        const int rr[4] = {r0, r0, r0 + 1, r0 + 1};
        const int cc[4] = {c0, c0 + 1, c0, c0 + 1};
        for (int k = 0; k < 4; ++k)
            if (rr[k] >= 0 && rr[k] < cam_res && cc[k] >= 0 && cc[k] < cam_res)
                img(rr[k], cc[k]) += amount * w[k];
    };

    for (const auto& seg : view.segments) {
        const double len = seg.length();
        const int n = len > 0.0 ? static_cast<int>(std::ceil(len / (px / 2.0))) + 1 : 1;
        const double amount = len > 0.0 ? len / (n * px) : 1.0;
        for (int s = 0; s < n; ++s) {
            const double t = n > 1 ? static_cast<double>(s) / (n - 1) : 0.0;
            const Eigen::Vector3d p = seg.a + t * (seg.b - seg.a);
            splat(p.x(), p.z(), amount);
        }
    }
    return normalize_max(img);
}

}  // namespace cisar
