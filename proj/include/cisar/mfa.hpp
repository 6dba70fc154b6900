#pragma once

#include <Eigen/Dense>

#include "cisar/embed.hpp"
#include "cisar/errors.hpp"
#include "cisar/image.hpp"
#include "cisar/manifold.hpp"

namespace cisar {

/// Procrustes alignment between the two coefficient sets: an orthogonal
/// rotation plus a global scale mapping radar coefficients toward the
/// camera's coefficient frame.
struct ProcrustesMap {
    double scale = 1.0;
    Eigen::MatrixXd rotation;  // n x n orthogonal
};

/// Aligns via the SVD of the cross-coefficient matrix; requires both
/// manifolds to retain the same dimension.
inline ProcrustesMap fit_procrustes(const Eigen::MatrixXd& p_r, const Eigen::MatrixXd& p_s) {
    if (p_r.rows() != p_s.rows())
        throw ConfigError("procrustes: manifolds retain different dimensions");
    if (p_r.cols() != p_s.cols())
        throw ConfigError("procrustes: coefficient sets differ in sample count");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(p_r * p_s.transpose(),
                                          Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double denom = (p_r * p_r.transpose()).trace();
    if (denom <= 0.0) throw NumericError("procrustes: radar coefficients have no energy");

    ProcrustesMap map;
    map.rotation = svd.matrixU() * svd.matrixV().transpose();
    map.scale = svd.singularValues().sum() / denom;
    return map;
}

/// Aligned radar coefficients: k * Q^T * p.
inline Eigen::VectorXd align_coeffs(const ProcrustesMap& map, const Eigen::VectorXd& p) {
    if (p.size() != map.rotation.rows()) throw NumericError("procrustes: coefficient size mismatch");
    return map.scale * (map.rotation.transpose() * p);
}

inline Eigen::MatrixXd align_coeffs(const ProcrustesMap& map, const Eigen::MatrixXd& p) {
    if (p.rows() != map.rotation.rows()) throw NumericError("procrustes: coefficient size mismatch");
    return map.scale * (map.rotation.transpose() * p);
}

/// Single-level alignment baseline: the test image's coefficients are mapped
/// through the Procrustes transform and lifted back to the image domain.
inline Image apply_mfa(const Eigen::VectorXd& p_t, const ProcrustesMap& map, const Manifold& man_r,
                       int height, int width) {
    Eigen::VectorXd pixels = lift(man_r, align_coeffs(map, p_t));
    pixels = pixels.cwiseMax(0.0);
    return normalize_max(unpack(pixels, height, width));
}

/// Alignment extended by neighborhood embedding: neighbors and sum-one
/// weights are found on the camera side, then applied to the aligned radar
/// coefficients of the same training indices before lifting.
inline Image ml_mfa_transfer(int t, const Eigen::MatrixXd& p_r, const Eigen::MatrixXd& p_s,
                             const ProcrustesMap& map, int k, const Manifold& man_r, int height,
                             int width) {
    if (t < 0 || t >= p_s.cols()) throw ConfigError("ml-mfa: test index out of range");
    const Eigen::MatrixXd aligned_r = align_coeffs(map, p_r);
    const NeighborSet camera_neighbors = knn(p_s, p_s.col(t), k, t);
    const Eigen::VectorXd w = lle_weights(p_s.col(t), camera_neighbors.values);

    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(p_r.rows());
    for (int i = 0; i < camera_neighbors.k(); ++i)
        coeffs += w(i) * aligned_r.col(camera_neighbors.indices[static_cast<size_t>(i)]);

    Eigen::VectorXd pixels = lift(man_r, coeffs);
    pixels = pixels.cwiseMax(0.0);
    return normalize_max(unpack(pixels, height, width));
}

}  // namespace cisar
