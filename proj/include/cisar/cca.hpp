#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "cisar/errors.hpp"

namespace cisar {

/// One-dimensional coherent subspace between the two coefficient sets: a
/// canonical basis vector per modality, scaled to unit projected variance,
/// plus the achieved canonical correlation and the covariance blocks kept
/// for diagnostics.
struct CcaSubspace {
    Eigen::VectorXd b_r;
    Eigen::VectorXd b_s;
    double lambda_max = 0.0;
    Eigen::MatrixXd q_r;
    Eigen::MatrixXd q_s;
    Eigen::MatrixXd q_rs;
    bool regularized = false;  // a ridge was required to invert a covariance
};

namespace detail {

// Symmetric inverse square root with a ridge fallback for near-singular
// covariances; `regularized` reports whether the ridge was needed.
inline Eigen::MatrixXd inverse_sqrt_spd(const Eigen::MatrixXd& q, const char* name,
                                        bool& regularized) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
    if (eig.info() != Eigen::Success) throw NumericError(std::string(name) + ": eigensolver failed");
    const double max_eig = eig.eigenvalues().maxCoeff();
    if (max_eig <= 0.0)
        throw NumericError(std::string(name) + ": covariance is rank deficient beyond repair");
    Eigen::VectorXd vals = eig.eigenvalues();
    if (vals.minCoeff() < 1e-12 * max_eig) {
        const double ridge = 1e-10 * q.trace() / q.rows();
        vals.array() += ridge;
        regularized = true;
        if (vals.minCoeff() <= 0.0)
            throw NumericError(std::string(name) + ": covariance is rank deficient beyond repair");
    }
    return eig.eigenvectors() * vals.cwiseSqrt().cwiseInverse().asDiagonal() *
           eig.eigenvectors().transpose();
}

}  // namespace detail

/// Solves the two-block generalized eigenproblem for the most correlated
/// pair of projections by whitening: the top eigenpair of
/// W_r Q_rs Q_s^-1 Q_rs^T W_r with W_r = Q_r^-1/2 gives b_r, and b_s follows
/// from the stationarity relation. Both vectors satisfy the unit-variance
/// constraints; the sign pair is fixed by making the first nonzero entry of
/// b_r positive.
inline CcaSubspace fit_cca(const Eigen::MatrixXd& p_r, const Eigen::MatrixXd& p_s) {
    if (p_r.cols() != p_s.cols()) throw ConfigError("cca: coefficient sets differ in sample count");
    const Eigen::Index count = p_r.cols();
    if (count < 2) throw ConfigError("cca: need at least two samples");

    CcaSubspace sub;
    sub.q_r = (p_r * p_r.transpose()) / count;
    sub.q_s = (p_s * p_s.transpose()) / count;
    sub.q_rs = (p_r * p_s.transpose()) / count;

    const Eigen::MatrixXd w_r = detail::inverse_sqrt_spd(sub.q_r, "cca radar covariance",
                                                         sub.regularized);
    const Eigen::MatrixXd w_s = detail::inverse_sqrt_spd(sub.q_s, "cca camera covariance",
                                                         sub.regularized);

    // Whitened cross-covariance; its top singular pair carries the canonical
    // correlation and both basis directions.
    const Eigen::MatrixXd coupling = w_r * sub.q_rs * w_s;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(coupling, Eigen::ComputeThinU | Eigen::ComputeThinV);
    sub.lambda_max = svd.singularValues()(0);
    sub.b_r = w_r * svd.matrixU().col(0);
    sub.b_s = w_s * svd.matrixV().col(0);

    // Enforce the unit-variance constraints exactly.
    const double vr = sub.b_r.transpose() * sub.q_r * sub.b_r;
    const double vs = sub.b_s.transpose() * sub.q_s * sub.b_s;
    if (vr <= 0.0 || vs <= 0.0) throw NumericError("cca: degenerate canonical directions");
    sub.b_r /= std::sqrt(vr);
    sub.b_s /= std::sqrt(vs);

    // Correlation positive, then a deterministic overall sign.
    const double corr = sub.b_r.transpose() * sub.q_rs * sub.b_s;
    if (corr < 0.0) sub.b_s = -sub.b_s;
    for (Eigen::Index i = 0; i < sub.b_r.size(); ++i) {
        if (sub.b_r(i) != 0.0) {
            if (sub.b_r(i) < 0.0) {
                sub.b_r = -sub.b_r;
                sub.b_s = -sub.b_s;
            }
            break;
        }
    }
    // Recompute against the normalized pair so the reported value matches
    // the sample correlation of the canonical coefficients exactly.
    sub.lambda_max = sub.b_r.transpose() * sub.q_rs * sub.b_s;
    return sub;
}

/// Canonical coefficients of a whole training set: a = P^T b.
inline Eigen::VectorXd canonical_coeffs(const Eigen::MatrixXd& p, const Eigen::VectorXd& b) {
    if (p.rows() != b.size()) throw NumericError("cca: coefficient dimension mismatch");
    return p.transpose() * b;
}

/// Canonical coefficient of a single image's manifold coefficients.
inline double canonical_coeff(const Eigen::VectorXd& p_t, const Eigen::VectorXd& b) {
    if (p_t.size() != b.size()) throw NumericError("cca: coefficient dimension mismatch");
    return p_t.dot(b);
}

}  // namespace cisar
