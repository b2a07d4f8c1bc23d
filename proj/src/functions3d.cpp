#include "thermolim/functions3d.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "thermolim/errors.hpp"
#include "thermolim/grid.hpp"

namespace thermolim {

double composite_gauss(const std::function<double(double)>& fn, double a, double b, int panels) {
  using boost::math::quadrature::gauss;
  if (panels < 1) panels = 1;
  const double h = (b - a) / panels;
  double s = 0.0;
  for (int i = 0; i < panels; ++i) s += gauss<double, 20>::integrate(fn, a + i * h, a + (i + 1) * h);
  return s;
}

namespace {

// integral_0^1 u^2 exp(-1/(1-u^2)) du
double unit_bump_moment() {
  static const double value =
      composite_gauss([](double u) { return u * u * bump_profile(u, 0.0, 1.0); }, 0.0, 1.0, 64);
  return value;
}

}  // namespace

double AxialBump::profile(double rho) const {
  const double norm = 4.0 * std::numbers::pi * radius * radius * radius * unit_bump_moment();
  return weight * bump_profile(rho, 0.0, radius) / norm;
}

double AxialBump::fourier_radial(double p) const {
  if (z0 != 0.0) throw UsageError("radial Fourier transform needs a bump centred at the origin");
  const double pref = 4.0 * std::numbers::pi / std::pow(2.0 * std::numbers::pi, 1.5);
  return pref * composite_gauss(
                    [&](double r) {
                      const double x = p * r;
                      const double sinc = std::abs(x) < 1e-6 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
                      return r * r * profile(r) * sinc;
                    },
                    0.0, radius, 48);
}

double TestFunction3D::integral() const {
  double s = 0.0;
  for (const auto& b : parts_) s += b.weight;
  return s;
}

double TestFunction3D::support_radius() const {
  double r = 0.0;
  for (const auto& b : parts_) r = std::max(r, std::abs(b.z0) + b.radius);
  return r;
}

double TestFunction3D::value(double rho_perp, double z) const {
  double s = 0.0;
  for (const auto& b : parts_) s += b.profile(std::hypot(rho_perp, z - b.z0));
  return s;
}

// Local spherical coordinates about each bump centre: x = z0 e_z + rho w, with
// m = cos(angle between w and e_z); the azimuth integrates to 2 pi.
double TestFunction3D::pair_z_weighted(const std::function<double(double)>& s, int order) const {
  double total = 0.0;
  const int panels = std::max(1, order / 20);
  for (const auto& b : parts_) {
    auto radial = [&](double rho) {
      const double pr = b.profile(rho);
      if (pr == 0.0) return 0.0;
      auto angular = [&](double m) {
        const double z = b.z0 + rho * m;
        const double r = std::sqrt(std::max(0.0, rho * rho + b.z0 * b.z0 + 2.0 * b.z0 * rho * m));
        return z * s(r);
      };
      return rho * rho * pr * composite_gauss(angular, -1.0, 1.0, panels);
    };
    total += 2.0 * std::numbers::pi * composite_gauss(radial, 0.0, b.radius, std::max(8, order / 2));
  }
  return total;
}

double TestFunction3D::pair_radial(const std::function<double(double)>& g, int order) const {
  double total = 0.0;
  const int panels = std::max(1, order / 20);
  for (const auto& b : parts_) {
    auto radial = [&](double rho) {
      const double pr = b.profile(rho);
      if (pr == 0.0) return 0.0;
      auto angular = [&](double m) {
        return g(std::sqrt(std::max(0.0, rho * rho + b.z0 * b.z0 + 2.0 * b.z0 * rho * m)));
      };
      return rho * rho * pr * composite_gauss(angular, -1.0, 1.0, panels);
    };
    total += 2.0 * std::numbers::pi * composite_gauss(radial, 0.0, b.radius, std::max(8, order / 2));
  }
  return total;
}

TestFunction3D TestFunction3D::reflected() const {
  std::vector<AxialBump> out = parts_;
  for (auto& b : out) b.z0 = -b.z0;
  return TestFunction3D(std::move(out));
}

}  // namespace thermolim
