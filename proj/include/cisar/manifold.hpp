#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "cisar/errors.hpp"
#include "cisar/image.hpp"

namespace cisar {

/// Affine PCA subspace of an image stack: orthonormal basis of the leading
/// principal directions, the column mean, and the full variance spectrum in
/// descending order.
struct Manifold {
    Eigen::MatrixXd basis;     // dim x retained, orthonormal columns
    Eigen::VectorXd mean;      // length dim
    Eigen::VectorXd spectrum;  // all eigenvalues of the sample covariance, descending
    int retained = 0;
    bool rank_limited = false;  // true when the request exceeded the data rank

    double trailing_variance() const {
        return spectrum.size() > retained ? spectrum.tail(spectrum.size() - retained).sum() : 0.0;
    }
};

namespace detail {

// Deterministic sign: the entry of largest magnitude is made positive.
inline void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index idx = 0;
    v.cwiseAbs().maxCoeff(&idx);
    if (v(idx) < 0.0) v = -v;
}

}  // namespace detail

/// Fits the top-k principal directions of the stack's sample covariance
/// (1/L scaling). When pixels outnumber apertures the eigendecomposition
/// runs on the L x L Gram matrix instead of the full covariance.
inline Manifold fit_manifold(const Stack& stack, int k) {
    const int dim = stack.dim(), count = stack.count();
    if (count < 2) throw ConfigError("manifold: need at least two images");
    if (k < 1 || k > std::min(dim, count))
        throw ConfigError("manifold: retained dimension out of range");

    auto [centered, mean] = center(stack);
    const Eigen::MatrixXd& x = centered.columns;

    Manifold man;
    man.mean = std::move(mean.mean);

    const int spectrum_len = std::min(dim, count);
    man.spectrum.resize(spectrum_len);
    man.basis.resize(dim, k);

    if (dim <= count) {
        Eigen::MatrixXd cov = (x * x.transpose()) / count;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
        if (eig.info() != Eigen::Success) throw NumericError("manifold: eigendecomposition failed");
        // Eigen reports ascending order; flip to descending.
        for (int i = 0; i < spectrum_len; ++i)
            man.spectrum(i) = std::max(eig.eigenvalues()(spectrum_len - 1 - i), 0.0);
        const double rank_tol = 1e-12 * std::max(man.spectrum(0), 1.0);
        int kept = 0;
        for (; kept < k; ++kept) {
            if (man.spectrum(kept) <= rank_tol) break;
            man.basis.col(kept) = eig.eigenvectors().col(spectrum_len - 1 - kept);
            detail::fix_sign(man.basis.col(kept));
        }
        man.retained = kept;
    } else {
        Eigen::MatrixXd gram = (x.transpose() * x) / count;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
        if (eig.info() != Eigen::Success) throw NumericError("manifold: eigendecomposition failed");
        for (int i = 0; i < spectrum_len; ++i)
            man.spectrum(i) = std::max(eig.eigenvalues()(spectrum_len - 1 - i), 0.0);
        const double rank_tol = 1e-12 * std::max(man.spectrum(0), 1.0);
        int kept = 0;
        for (; kept < k; ++kept) {
            const double lam = man.spectrum(kept);
            if (lam <= rank_tol) break;
            // Lift the Gram eigenvector back to pixel space and normalize.
            man.basis.col(kept) =
                x * eig.eigenvectors().col(spectrum_len - 1 - kept) / std::sqrt(lam * count);
            detail::fix_sign(man.basis.col(kept));
        }
        man.retained = kept;
    }
    man.rank_limited = man.retained < k;
    man.basis.conservativeResize(dim, man.retained);
    return man;
}

/// Projection coefficients of a packed image against the manifold.
inline Eigen::VectorXd project(const Manifold& man, const Eigen::VectorXd& x) {
    if (x.size() != man.mean.size()) throw NumericError("manifold: projection dimension mismatch");
    return man.basis.transpose() * (x - man.mean);
}

/// Coefficients of every column of a stack, as a retained x count matrix.
inline Eigen::MatrixXd project(const Manifold& man, const Stack& stack) {
    if (stack.dim() != man.mean.size()) throw NumericError("manifold: projection dimension mismatch");
    return man.basis.transpose() * (stack.columns.colwise() - man.mean);
}

/// Back to the image domain; the column mean is restored so reconstructions
/// keep their DC level.
inline Eigen::VectorXd lift(const Manifold& man, const Eigen::VectorXd& coeffs) {
    if (coeffs.size() != man.retained) throw NumericError("manifold: coefficient dimension mismatch");
    return man.basis * coeffs + man.mean;
}

}  // namespace cisar
