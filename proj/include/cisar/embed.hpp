#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <vector>

#include "cisar/cca.hpp"
#include "cisar/errors.hpp"
#include "cisar/image.hpp"
#include "cisar/manifold.hpp"

namespace cisar {

/// K nearest training points of a query, ordered by ascending distance with
/// index as the tie break. `values` keeps one column per neighbor; scalar
/// canonical coefficients are the one-row case.
struct NeighborSet {
    std::vector<int> indices;
    Eigen::MatrixXd values;  // dim x K

    int k() const { return static_cast<int>(indices.size()); }
};

/// Nearest neighbors of `query` among the columns of `points`. When the
/// query is itself a training point, pass its index as `self_index` so it is
/// skipped (train equals test in this pipeline); -1 disables the exclusion.
inline NeighborSet knn(const Eigen::MatrixXd& points, const Eigen::VectorXd& query, int k,
                       int self_index = -1) {
    const int count = static_cast<int>(points.cols());
    if (points.rows() != query.size()) throw NumericError("knn: query dimension mismatch");
    const int available = self_index >= 0 ? count - 1 : count;
    if (k < 1 || k > available)
        throw ConfigError("knn: neighbor count out of range for the training set");

    std::vector<std::pair<double, int>> order;
    order.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        if (i == self_index) continue;
        order.emplace_back((points.col(i) - query).norm(), i);
    }
    std::sort(order.begin(), order.end());  // pairs sort by distance, then index

    NeighborSet set;
    set.indices.resize(static_cast<size_t>(k));
    set.values.resize(points.rows(), k);
    for (int i = 0; i < k; ++i) {
        set.indices[static_cast<size_t>(i)] = order[static_cast<size_t>(i)].second;
        set.values.col(i) = points.col(order[static_cast<size_t>(i)].second);
    }
    return set;
}

/// Scalar convenience for canonical coefficients.
inline NeighborSet knn(const Eigen::VectorXd& coeffs, double query, int k, int self_index = -1) {
    Eigen::MatrixXd points = coeffs.transpose();  // 1 x L
    Eigen::VectorXd q(1);
    q(0) = query;
    return knn(points, q, k, self_index);
}

/// Sum-one weights reconstructing the query from its neighbors: the local
/// Gram system G w = 1 is solved with a fixed relative ridge (G has rank at
/// most the point dimension, so the plain system is singular whenever K
/// exceeds it) and the solution is rescaled to sum one.
inline Eigen::VectorXd lle_weights(const Eigen::VectorXd& query,
                                   const Eigen::MatrixXd& neighbor_values) {
    if (neighbor_values.rows() != query.size())
        throw NumericError("lle weights: neighbor dimension mismatch");
    const int k = static_cast<int>(neighbor_values.cols());
    if (k < 1) throw ConfigError("lle weights: need at least one neighbor");

    const Eigen::MatrixXd diff = (-neighbor_values).colwise() + query;  // query - neighbors
    Eigen::MatrixXd gram = diff.transpose() * diff;
    const double trace = gram.trace();
    if (trace <= 0.0) {
        // Every neighbor coincides with the query; any convex combination is
        // exact, take the uniform one.
        return Eigen::VectorXd::Constant(k, 1.0 / k);
    }
    gram.diagonal().array() += 1e-9 * trace / k;
    Eigen::VectorXd w = Eigen::LDLT<Eigen::MatrixXd>(gram).solve(Eigen::VectorXd::Ones(k));
    const double sum = w.sum();
    if (!std::isfinite(sum) || sum == 0.0) throw NumericError("lle weights: singular local system");
    return w / sum;
}

inline Eigen::VectorXd lle_weights(double query, const NeighborSet& neighbors) {
    Eigen::VectorXd q(1);
    q(0) = query;
    return lle_weights(q, neighbors.values);
}

/// Applies camera-learnt weights to the radar-side neighbor coefficients.
inline double transfer(const Eigen::VectorXd& weights, const NeighborSet& radar_neighbors) {
    if (radar_neighbors.values.rows() != 1)
        throw NumericError("transfer: expected scalar neighbor values");
    if (weights.size() != radar_neighbors.values.cols())
        throw NumericError("transfer: weight and neighbor counts differ");
    return (radar_neighbors.values * weights)(0);
}

/// Lifts the transferred canonical coefficient back to the image domain:
/// the minimum-norm coefficient update along b_r is added to the test
/// image's own coefficients, the result leaves the manifold through `lift`,
/// and the image is clamped nonnegative and peak-normalized.
inline Image reconstruct_image(double a_hat, const Eigen::VectorXd& p_t, const CcaSubspace& cca,
                               const Manifold& man, int height, int width) {
    const double norm2 = cca.b_r.squaredNorm();
    if (norm2 <= 0.0) throw NumericError("reconstruct: degenerate coherent subspace");
    const Eigen::VectorXd coeffs = p_t + cca.b_r * (a_hat / norm2);
    Eigen::VectorXd pixels = lift(man, coeffs);
    pixels = pixels.cwiseMax(0.0);
    return normalize_max(unpack(pixels, height, width));
}

}  // namespace cisar
