#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace lpbf {

/// Lateral position or direction in micrometres.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;

  double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure produced or received non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

constexpr double kMicron = 1e-6;
constexpr double kPi = 3.14159265358979323846;

}  // namespace lpbf
