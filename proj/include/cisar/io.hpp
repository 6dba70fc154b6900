#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "cisar/errors.hpp"
#include "cisar/image.hpp"

namespace cisar {

namespace detail {

// Shortest decimal string that parses back to the identical double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& token, const std::string& context) {
    double v = 0.0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw IoError(IoError::Kind::MalformedHeader, context + ": bad number '" + token + "'");
    return v;
}

}  // namespace detail

/// Writes a matrix as plain text: a "rows cols" header line, then the values
/// row by row. Values round-trip exactly.
inline void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out)
        throw IoError(IoError::Kind::WriteFailure, "cannot open for writing: " + path.string());
    out << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out << ' ';
            out << detail::format_double(m(i, j));
        }
        out << '\n';
    }
    if (!out)
        throw IoError(IoError::Kind::WriteFailure, "write failed: " + path.string());
}

inline Eigen::MatrixXd load_matrix(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError(IoError::Kind::NotFound, "cannot open: " + path.string());
    long rows = -1, cols = -1;
    if (!(in >> rows >> cols) || rows < 0 || cols < 0)
        throw IoError(IoError::Kind::MalformedHeader, "bad matrix header: " + path.string());
    Eigen::MatrixXd m(rows, cols);
    std::string token;
    for (long i = 0; i < rows; ++i)
        for (long j = 0; j < cols; ++j) {
            if (!(in >> token))
                throw IoError(IoError::Kind::DimensionMismatch,
                              "matrix file truncated: " + path.string());
            m(i, j) = detail::parse_double(token, path.string());
        }
    return m;
}

inline void save_stack(const std::filesystem::path& path, const Stack& s) {
    save_matrix(path, s.columns);
}

inline Stack load_stack(const std::filesystem::path& path) {
    return Stack(load_matrix(path));
}

/// Writes a 16-bit binary PGM (P5, maxval 65535, big-endian samples).
/// Intensities are clamped to [0,1] and quantized with round-half-up.
inline void save_image_pgm(const std::filesystem::path& path, const Image& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError(IoError::Kind::WriteFailure, "cannot open for writing: " + path.string());
    out << "P5\n" << img.width() << ' ' << img.height() << "\n65535\n";
    std::vector<unsigned char> row(static_cast<size_t>(img.width()) * 2);
    for (int i = 0; i < img.height(); ++i) {
        for (int j = 0; j < img.width(); ++j) {
            double v = img(i, j);
            if (v < 0.0) v = 0.0;
            if (v > 1.0) v = 1.0;
            auto q = static_cast<uint16_t>(std::floor(v * 65535.0 + 0.5));
            row[2 * j] = static_cast<unsigned char>(q >> 8);
            row[2 * j + 1] = static_cast<unsigned char>(q & 0xff);
        }
        out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out)
        throw IoError(IoError::Kind::WriteFailure, "write failed: " + path.string());
}

inline Image load_image_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError(IoError::Kind::NotFound, "cannot open: " + path.string());
    std::string magic;
    in >> magic;
    if (magic != "P5")
        throw IoError(IoError::Kind::MalformedHeader, "not a binary PGM: " + path.string());
    long width = 0, height = 0, maxval = 0;
    // Header tokens may be separated by whitespace or '#' comment lines.
    auto next_long = [&](long& out_val) {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            try {
                out_val = std::stol(tok);
            } catch (...) {
                throw IoError(IoError::Kind::MalformedHeader, "bad PGM header: " + path.string());
            }
            return;
        }
        throw IoError(IoError::Kind::MalformedHeader, "bad PGM header: " + path.string());
    };
    next_long(width);
    next_long(height);
    next_long(maxval);
    if (width <= 0 || height <= 0 || maxval != 65535)
        throw IoError(IoError::Kind::MalformedHeader,
                      "unsupported PGM header (need 16-bit greyscale): " + path.string());
    in.get();  // single whitespace byte before the raster
    Image img = Image::zeros(static_cast<int>(height), static_cast<int>(width));
    std::vector<unsigned char> row(static_cast<size_t>(width) * 2);
    for (long i = 0; i < height; ++i) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size()));
        if (!in)
            throw IoError(IoError::Kind::DimensionMismatch, "PGM raster truncated: " + path.string());
        for (long j = 0; j < width; ++j) {
            uint16_t q = static_cast<uint16_t>((row[2 * j] << 8) | row[2 * j + 1]);
            img(static_cast<int>(i), static_cast<int>(j)) = q / 65535.0;
        }
    }
    return img;
}

}  // namespace cisar
