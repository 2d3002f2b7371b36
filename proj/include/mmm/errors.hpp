#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mmm {

/// Base class for every error raised by the library. Each subclass carries a
/// stable machine-readable code that the CLI forwards verbatim.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Series or matrix shapes that do not fit together.
class DimensionError : public Error {
public:
    explicit DimensionError(const std::string& msg) : Error("E_DIMENSION", msg) {}
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error("E_DOMAIN", msg) {}
};

/// Model specification, parameter layout or named-parameter mismatch.
class StructuralError : public Error {
public:
    explicit StructuralError(const std::string& msg) : Error("E_STRUCTURE", msg) {}
};

/// Malformed input file (CSV panel or configuration).
class IngestionError : public Error {
public:
    explicit IngestionError(const std::string& msg) : Error("E_INGEST", msg) {}
};

class OptimizationError : public Error {
public:
    explicit OptimizationError(const std::string& msg) : Error("E_OPTIMIZE", msg) {}
};

class SamplerError : public Error {
public:
    explicit SamplerError(const std::string& msg) : Error("E_SAMPLER", msg) {}
};

/// Singular or rank-deficient design matrix.
class LinearAlgebraError : public Error {
public:
    explicit LinearAlgebraError(const std::string& msg) : Error("E_LINALG", msg) {}
};

/// A metric that is undefined for the supplied inputs.
class MetricError : public Error {
public:
    explicit MetricError(const std::string& msg) : Error("E_METRIC", msg) {}
};

}  // namespace mmm
