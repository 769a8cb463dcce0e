#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace anisoflow {

enum class ErrorKind {
    ZeroVector,
    InvalidParams,
    NotPositiveDefinite,
    NoConvergence,
    DegenerateMetric,
    Collapse,
    MeshDegenerate,
    GradientDegenerate,
    WrongInitialData,
    InsufficientSnapshots,
    NotMeanConvex,
    NotConvexInitially,
    NotNestedInitially,
    RedistributionActive,
    FileNotFound,
    SchemaViolation,
    IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Schema errors name the offending key, e.g. "flow.cfl".
class SchemaViolation : public Error {
public:
    SchemaViolation(std::string key, std::string reason)
        : Error(ErrorKind::SchemaViolation, key + ": " + reason),
          key_(std::move(key)),
          reason_(std::move(reason)) {}

    const std::string& key() const noexcept { return key_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string key_;
    std::string reason_;
};

}  // namespace anisoflow
