#pragma once

#include <Eigen/Dense>
#include <utility>

#include "cisar/errors.hpp"

namespace cisar {

/// Greyscale intensity image. Pixels are addressed as (row, column) with
/// row 0 at the top; intensities are nonnegative finite reals.
struct Image {
    Eigen::MatrixXd pixels;  // height x width

    Image() = default;
    explicit Image(Eigen::MatrixXd p) : pixels(std::move(p)) {}

    static Image zeros(int height, int width) {
        return Image(Eigen::MatrixXd::Zero(height, width));
    }

    int height() const { return static_cast<int>(pixels.rows()); }
    int width() const { return static_cast<int>(pixels.cols()); }

    double operator()(int row, int col) const { return pixels(row, col); }
    double& operator()(int row, int col) { return pixels(row, col); }
};

/// One packed image vector per aperture position, stored as the columns of
/// a dim x count matrix.
struct Stack {
    Eigen::MatrixXd columns;  // dim x count

    Stack() = default;
    explicit Stack(Eigen::MatrixXd c) : columns(std::move(c)) {}

    int dim() const { return static_cast<int>(columns.rows()); }
    int count() const { return static_cast<int>(columns.cols()); }
};

/// Per-pixel average over the columns of a stack.
struct ColumnMean {
    Eigen::VectorXd mean;
};

/// Flattens an image into a column vector in lexicographic (column) order:
/// element i + j*height is pixel (row i, column j).
inline Eigen::VectorXd pack(const Image& img) {
    return Eigen::Map<const Eigen::VectorXd>(img.pixels.data(), img.pixels.size());
}

/// Inverse of pack for the given dimensions.
inline Image unpack(const Eigen::VectorXd& v, int height, int width) {
    if (v.size() != static_cast<Eigen::Index>(height) * width)
        throw NumericError("unpack: vector length does not match image dimensions");
    return Image(Eigen::Map<const Eigen::MatrixXd>(v.data(), height, width));
}

/// Subtracts the per-pixel mean over columns. Returns the centered stack and
/// the mean that restores the input when added back.
inline std::pair<Stack, ColumnMean> center(const Stack& stack) {
    if (stack.count() < 1)
        throw NumericError("center: stack has no columns");
    Eigen::VectorXd mean = stack.columns.rowwise().mean();
    Stack centered(stack.columns.colwise() - mean);
    return {std::move(centered), ColumnMean{std::move(mean)}};
}

/// Scales so the maximum intensity is 1. An all-zero image is returned
/// unchanged; empty apertures occur legitimately in simulation.
inline Image normalize_max(const Image& img) {
    double peak = img.pixels.size() > 0 ? img.pixels.maxCoeff() : 0.0;
    if (peak <= 0.0) return img;
    return Image(img.pixels / peak);
}

}  // namespace cisar
