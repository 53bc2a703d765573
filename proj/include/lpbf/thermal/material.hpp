#pragma once

namespace lpbf::thermal {

/// Uniform thermophysical properties of the powder bed (SI units).
struct MaterialParams {
  double absorptivity = 0.3;     // [-]
  double conductivity = 21.5;    // W/mK
  double heat_capacity = 505.0;  // J/kgK
  double density = 7910.0;       // kg/m^3
  double melt_temp = 1673.0;     // K
  double ambient_temp = 300.0;   // K

  void validate() const;
  bool operator==(const MaterialParams&) const = default;
};

/// Gaussian surface heat source.
struct LaserParams {
  double power = 0.0;          // W
  double beam_sigma_um = 13.75;

  void validate() const;
  bool operator==(const LaserParams&) const = default;
};

/// k / (rho c_p), m^2/s.
double thermal_diffusivity(const MaterialParams& m);

/// rho c_p, J/(m^3 K).
inline double volumetric_heat_capacity(const MaterialParams& m) {
  return m.density * m.heat_capacity;
}

}  // namespace lpbf::thermal
