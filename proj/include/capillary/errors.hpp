#pragma once

#include <stdexcept>
#include <string>

#include "capillary/vec2.hpp"

namespace capillary {

/// Coarse failure classes; the CLI maps each to its own exit status.
enum class ErrorKind { Config = 1, Infeasible = 2, Numerical = 3, Io = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InvalidCurve : public Error {
public:
    explicit InvalidCurve(const std::string& what) : Error(ErrorKind::Numerical, "invalid curve: " + what) {}
};

class OnCurveError : public Error {
public:
    explicit OnCurveError(const Vec2& p)
        : Error(ErrorKind::Numerical, "on-curve: query point lies on the curve"), point(p) {}
    Vec2 point;
};

class WindingClassError : public Error {
public:
    WindingClassError(const Vec2& w, int winding)
        : Error(ErrorKind::Infeasible, "winding-class violation: winding " + std::to_string(winding) +
                                           " at witness point"),
          witness(w), value(winding) {}
    Vec2 witness;
    int value;
};

class CollapsedConfiguration : public Error {
public:
    CollapsedConfiguration(std::size_t i, std::size_t j)
        : Error(ErrorKind::Numerical, "collapsed configuration: midpoints of segments " + std::to_string(i) +
                                          " and " + std::to_string(j) + " coincide"),
          seg_i(i), seg_j(j) {}
    std::size_t seg_i;
    std::size_t seg_j;
};

class ProjectionOutOfRange : public Error {
public:
    explicit ProjectionOutOfRange(const std::string& what)
        : Error(ErrorKind::Infeasible, "projection out of range: " + what) {}
};

class ConfigError : public Error {
public:
    ConfigError(std::size_t line, const std::string& what)
        : Error(ErrorKind::Config, line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_no(line) {}
    std::size_t line_no;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

} // namespace capillary
