#pragma once

#include <stdexcept>
#include <string>

namespace cisar {

// Bad flags, bad config file, inconsistent parameters. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A pipeline stage input is absent or unusable. CLI exit code 3.
class MissingArtifactError : public std::runtime_error {
public:
    explicit MissingArtifactError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite data, rank deficiency, solver breakdown. CLI exit code 4.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// File I/O problems, each load failure reported distinctly.
class IoError : public std::runtime_error {
public:
    enum class Kind { NotFound, MalformedHeader, DimensionMismatch, WriteFailure };

    IoError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

}  // namespace cisar
