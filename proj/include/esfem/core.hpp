#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace esfem {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// |grad d| vanished where a normal was requested.
class DegenerateGradient : public Error {
public:
    using Error::Error;
};

/// An iterative geometric solve (closest point, boundary snap) did not converge.
class NoConvergence : public Error {
public:
    using Error::Error;
};

class DegenerateTriangle : public Error {
public:
    using Error::Error;
};

class WrongMotionKind : public Error {
public:
    using Error::Error;
};

class NoExactSolution : public Error {
public:
    using Error::Error;
};

class SolverDiverged : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class EmptySeries : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

inline constexpr double pi = 3.14159265358979323846;

} // namespace esfem
