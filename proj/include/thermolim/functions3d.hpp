#pragma once

// Three-dimensional test functions represented analytically: weighted bump
// profiles centred on the z-axis. Pairings with axisymmetric functions reduce
// to two-dimensional quadratures in local spherical coordinates.

#include <functional>
#include <vector>

namespace thermolim {

/// Composite Gauss-Legendre (20 nodes per panel) on [a, b].
double composite_gauss(const std::function<double(double)>& fn, double a, double b,
                       int panels = 16);

/// weight * b(|x - z0 e_z| / radius) / N with N chosen so that the integral
/// over R^3 equals `weight`; b(u) = exp(-1/(1-u^2)) for u < 1.
struct AxialBump {
  double z0 = 0.0;
  double radius = 1.0;
  double weight = 1.0;

  /// Radial profile about the bump centre, rho = distance from the centre.
  double profile(double rho) const;
  /// (2 pi)^{-3/2} integral f(x) e^{-ip.x} d^3x for z0 = 0 (radial bumps only).
  double fourier_radial(double p) const;
};

/// Finite sum of axial bumps.
class TestFunction3D {
 public:
  TestFunction3D() = default;
  explicit TestFunction3D(std::vector<AxialBump> parts) : parts_(std::move(parts)) {}

  const std::vector<AxialBump>& parts() const { return parts_; }
  double integral() const;
  /// max |x| over the support.
  double support_radius() const;
  /// f(x) at cylindrical position (rho_perp, z).
  double value(double rho_perp, double z) const;

  /// integral f(x) z s(|x|) d^3x for a radial shape s (evaluated numerically).
  double pair_z_weighted(const std::function<double(double)>& s, int order = 48) const;
  /// integral f(x) g(|x|) d^3x.
  double pair_radial(const std::function<double(double)>& g, int order = 48) const;

  /// f(-x) (z -> -z for axial bumps).
  TestFunction3D reflected() const;

 private:
  std::vector<AxialBump> parts_;
};

}  // namespace thermolim
