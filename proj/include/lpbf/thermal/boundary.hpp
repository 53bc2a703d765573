#pragma once

#include <array>
#include <string>

namespace lpbf::thermal {

/// Domain faces that carry a configurable condition. The top surface is
/// always adiabatic and is not listed.
enum class Face { XMin = 0, XMax, YMin, YMax, Bottom };

inline constexpr std::array<Face, 5> kAllFaces{Face::XMin, Face::XMax, Face::YMin,
                                               Face::YMax, Face::Bottom};

std::string to_string(Face f);

struct FaceCondition {
  enum class Kind { Adiabatic, FixedTemp };

  Kind kind = Kind::Adiabatic;
  double t_ref = 0.0;  // K, only meaningful for FixedTemp

  static FaceCondition adiabatic() { return {}; }
  static FaceCondition fixed(double t) { return {Kind::FixedTemp, t}; }

  bool is_fixed() const { return kind == Kind::FixedTemp; }

  /// Ghost value mirrored across the face from an interior value.
  /// Adiabatic faces reflect the value; fixed faces reflect it about t_ref,
  /// which pins the face itself at t_ref.
  double ghost(double interior) const {
    return is_fixed() ? 2.0 * t_ref - interior : interior;
  }

  /// +1 for an adiabatic image source, -1 for a fixed-temperature one.
  double image_sign() const { return is_fixed() ? -1.0 : 1.0; }

  bool operator==(const FaceCondition&) const = default;
};

struct BoundaryCondition {
  std::array<FaceCondition, 5> faces{};

  static BoundaryCondition all_adiabatic() { return {}; }

  const FaceCondition& operator[](Face f) const { return faces[static_cast<int>(f)]; }
  FaceCondition& operator[](Face f) { return faces[static_cast<int>(f)]; }

  void validate() const;
  bool operator==(const BoundaryCondition&) const = default;
};

}  // namespace lpbf::thermal
