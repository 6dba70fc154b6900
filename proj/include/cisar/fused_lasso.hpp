#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cisar/errors.hpp"
#include "cisar/radar.hpp"
#include "cisar/sim.hpp"

namespace cisar {

/// First differences of consecutive azimuth samples within each range bin.
/// Rows never straddle a bin boundary; fusing across unrelated range bins
/// has no physical meaning.
struct FusionMatrix {
    int n_x = 0;
    int n_r = 1;

    Eigen::Index rows() const { return static_cast<Eigen::Index>(n_x - 1) * n_r; }
    Eigen::Index cols() const { return static_cast<Eigen::Index>(n_x) * n_r; }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
        if (x.size() != cols()) throw NumericError("fusion matrix: input length mismatch");
        Eigen::VectorXd d(rows());
        for (int bin = 0; bin < n_r; ++bin) {
            auto seg = x.segment(static_cast<Eigen::Index>(bin) * n_x, n_x);
            d.segment(static_cast<Eigen::Index>(bin) * (n_x - 1), n_x - 1) =
                seg.tail(n_x - 1) - seg.head(n_x - 1);
        }
        return d;
    }

    Eigen::MatrixXd dense() const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows(), cols());
        for (int bin = 0; bin < n_r; ++bin)
            for (int k = 0; k + 1 < n_x; ++k) {
                Eigen::Index row = static_cast<Eigen::Index>(bin) * (n_x - 1) + k;
                m(row, static_cast<Eigen::Index>(bin) * n_x + k) = -1.0;
                m(row, static_cast<Eigen::Index>(bin) * n_x + k + 1) = 1.0;
            }
        return m;
    }
};

inline FusionMatrix fusion_matrix(int n_x, int n_r) {
    if (n_x < 2) throw ConfigError("fusion matrix: need at least two azimuth samples");
    if (n_r < 1) throw ConfigError("fusion matrix: need at least one range bin");
    return FusionMatrix{n_x, n_r};
}

struct SolverOptions {
    int max_iter = 2000;
    double tol = 1e-6;   // relative iterate change at which to stop
    double rho = 1.0;    // step scale relative to the inverse Lipschitz bound

    void validate() const {
        if (max_iter < 1) throw ConfigError("solver: max_iter must be >= 1");
        if (tol <= 0) throw ConfigError("solver: tol must be positive");
        if (rho <= 0) throw ConfigError("solver: rho must be positive");
    }
};

struct FusedLassoProblem {
    MeasurementOperator op;
    Eigen::VectorXd y;
    double lambda_e = 0.0;
    double lambda_f = 0.0;

    FusionMatrix fusion() const { return FusionMatrix{op.n_x(), op.range_bins}; }

    void validate() const {
        if (lambda_e < 0 || lambda_f < 0)
            throw ConfigError("fused lasso: penalties must be >= 0");
        if (y.size() != op.rows())
            throw NumericError("fused lasso: measurement length mismatch");
        if (!y.allFinite() || !op.per_bin.allFinite())
            throw NumericError("fused lasso: non-finite inputs");
    }
};

struct SolveResult {
    Eigen::VectorXd x;
    int iterations = 0;
    double objective = 0.0;
    bool converged = false;
    std::vector<double> objective_trace;  // objective after each iteration, entry 0 = start
};

/// Exact solution of min_x 0.5*||x - y||^2 + lam * sum|x[i+1] - x[i]|
/// by Condat's direct non-iterative algorithm.
inline void tv_denoise_1d(const double* y, double* x, int n, double lam) {
    if (n <= 0) return;
    if (n == 1 || lam <= 0.0) {
        std::copy(y, y + n, x);
        return;
    }
    int k = 0, k0 = 0, km = 0, kp = 0;
    double vmin = y[0] - lam, vmax = y[0] + lam;
    double umin = lam, umax = -lam;
    while (true) {
        if (k == n - 1) {
            // Tail: flush pending segments, then the remainder at its mean level.
            if (umin < 0.0) {
                do x[k0++] = vmin; while (k0 <= km);
                k = km = k0;
                vmin = y[k];
                umin = lam;
                umax = y[k] + lam - vmax;
            } else if (umax > 0.0) {
                do x[k0++] = vmax; while (k0 <= kp);
                k = kp = k0;
                vmax = y[k];
                umax = -lam;
                umin = y[k] - lam - vmin;
            } else {
                const double level = vmin + umin / (k - k0 + 1);
                while (k0 <= k) x[k0++] = level;
                return;
            }
            if (k == n - 1) continue;
        }
        if (y[k + 1] + umin < vmin - lam) {  // level must jump down
            do x[k0++] = vmin; while (k0 <= km);
            k = km = kp = k0;
            vmin = y[k];
            vmax = y[k] + 2.0 * lam;
            umin = lam;
            umax = -lam;
        } else if (y[k + 1] + umax > vmax + lam) {  // level must jump up
            do x[k0++] = vmax; while (k0 <= kp);
            k = km = kp = k0;
            vmin = y[k] - 2.0 * lam;
            vmax = y[k];
            umin = lam;
            umax = -lam;
        } else {  // extend the current segment
            ++k;
            umin += y[k] - vmin;
            umax += y[k] - vmax;
            if (umin >= lam) {
                vmin += (umin - lam) / (k - k0 + 1);
                umin = lam;
                km = k;
            }
            if (umax <= -lam) {
                vmax += (umax + lam) / (k - k0 + 1);
                umax = -lam;
                kp = k;
            }
        }
    }
}

inline Eigen::VectorXd tv_denoise_1d(const Eigen::VectorXd& y, double lam) {
    Eigen::VectorXd x(y.size());
    tv_denoise_1d(y.data(), x.data(), static_cast<int>(y.size()), lam);
    return x;
}

inline double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

/// Proximal map of lam_e*||x||_1 + lam_f*||Dx||_1 on a chain: total-variation
/// denoising followed by soft thresholding (the two steps compose exactly).
inline Eigen::VectorXd fused_prox(const Eigen::VectorXd& v, double lam_e, double lam_f) {
    Eigen::VectorXd x = lam_f > 0.0 ? tv_denoise_1d(v, lam_f) : v;
    if (lam_e > 0.0)
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = soft_threshold(x(i), lam_e);
    return x;
}

inline double fused_objective(const FusedLassoProblem& p, const Eigen::VectorXd& x) {
    const Eigen::VectorXd r = p.y - p.op.apply(x);
    double obj = r.squaredNorm() + p.lambda_e * x.lpNorm<1>();
    if (p.lambda_f > 0.0) obj += p.lambda_f * p.fusion().apply(x).lpNorm<1>();
    return obj;
}

/// Monotone accelerated proximal-gradient solver for the fused-lasso
/// objective. The data term gradient is evaluated per range bin through the
/// shared convolution block; the nonsmooth part is handled by the exact
/// fused proximal map, so the objective never increases across iterations.
/// Momentum restarts whenever a candidate fails the descent test.
class FusedLassoSolver {
public:
    FusedLassoSolver(const MeasurementOperator& op, double lambda_e, double lambda_f,
                     const SolverOptions& opts = {})
        : op_(op), lambda_e_(lambda_e), lambda_f_(lambda_f), opts_(opts) {
        opts_.validate();
        if (lambda_e < 0 || lambda_f < 0)
            throw ConfigError("fused lasso: penalties must be >= 0");
        if (!op.per_bin.allFinite()) throw NumericError("fused lasso: non-finite operator");
        bt_b_ = op.per_bin.transpose() * op.per_bin;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(bt_b_);
        lipschitz_ = 2.0 * std::max(eig.eigenvalues().maxCoeff(), 0.0);
    }

    SolveResult solve(const Eigen::VectorXd& y) const {
        if (y.size() != op_.rows()) throw NumericError("fused lasso: measurement length mismatch");
        if (!y.allFinite()) throw NumericError("fused lasso: non-finite measurements");
        const int n_x = op_.n_x(), n_r = op_.range_bins;
        using Mat = Eigen::MatrixXd;
        const Eigen::Map<const Mat> ymat(y.data(), op_.n_theta(), n_r);
        const Mat bty = op_.per_bin.transpose() * ymat;

        const double step =
            lipschitz_ > 0.0 ? opts_.rho / lipschitz_ : opts_.rho;  // zero operator: any step works
        auto objective = [&](const Mat& xm) {
            double obj = (ymat - op_.per_bin * xm).squaredNorm() +
                         lambda_e_ * xm.cwiseAbs().sum();
            if (lambda_f_ > 0.0)
                obj += lambda_f_ *
                       (xm.bottomRows(n_x - 1) - xm.topRows(n_x - 1)).cwiseAbs().sum();
            return obj;
        };
        auto prox_columns = [&](Mat& m) {
            for (int j = 0; j < n_r; ++j)
                m.col(j) = fused_prox(m.col(j), lambda_e_ * step, lambda_f_ * step);
        };

        Mat x = bty;  // warm start at the adjoint image of the data
        Mat x_prev = x, z = x, grad(n_x, n_r), candidate(n_x, n_r);
        double t = 1.0;
        double obj = objective(x);

        SolveResult result;
        result.objective_trace.reserve(static_cast<size_t>(opts_.max_iter) + 1);
        result.objective_trace.push_back(obj);
        int it = 0;
        for (; it < opts_.max_iter; ++it) {
            grad.noalias() = 2.0 * (bt_b_ * z - bty);
            candidate = z - step * grad;
            prox_columns(candidate);
            const double cand_obj = objective(candidate);

            x_prev.swap(x);
            bool accepted = cand_obj <= obj;
            if (accepted) {
                x = candidate;
                obj = cand_obj;
            } else {
                x = x_prev;  // keep the incumbent, restart momentum below
            }
            const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
            if (accepted) {
                z = x + (t / t_next) * (candidate - x) + ((t - 1.0) / t_next) * (x - x_prev);
            } else {
                z = x;  // restart momentum from the incumbent
            }
            t = accepted ? t_next : 1.0;
            result.objective_trace.push_back(obj);

            if (accepted) {
                const double denom = std::max(x_prev.norm(), 1e-30);
                if ((x - x_prev).norm() / denom < opts_.tol) {
                    result.converged = true;
                    ++it;
                    break;
                }
            }
        }
        result.iterations = it;
        result.objective = obj;
        result.x = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
        return result;
    }

    double lipschitz() const { return lipschitz_; }

private:
    MeasurementOperator op_;
    double lambda_e_;
    double lambda_f_;
    SolverOptions opts_;
    Eigen::MatrixXd bt_b_;
    double lipschitz_ = 0.0;
};

inline SolveResult solve(const FusedLassoProblem& problem, const SolverOptions& opts = {}) {
    problem.validate();
    return FusedLassoSolver(problem.op, problem.lambda_e, problem.lambda_f, opts).solve(problem.y);
}

/// Deconvolves one aperture's measurements back onto the fine polar grid.
inline ReflectivityMap reconstruct_aperture(const Measurement& meas, const MeasurementOperator& op,
                                            const PolarGrid& grid, double lambda_e, double lambda_f,
                                            const SolverOptions& opts = {}) {
    if (grid.n_x != op.n_x() || grid.n_r != op.range_bins)
        throw NumericError("reconstruct: grid and operator dimensions disagree");
    FusedLassoProblem problem{op, meas.y, lambda_e, lambda_f};
    SolveResult res = solve(problem, opts);
    ReflectivityMap map;
    map.grid = grid;
    map.cells = Eigen::Map<const Eigen::MatrixXd>(res.x.data(), grid.n_x, grid.n_r);
    return map;
}

}  // namespace cisar
