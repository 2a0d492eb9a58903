#include "periph/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace periph::geometry {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

}  // namespace

double boundary_area_from_genus(int genus) {
  if (genus < 2) {
    throw std::domain_error("genus " + std::to_string(genus) +
                            " admits no hyperbolic structure (need genus >= 2)");
  }
  return 4.0 * std::numbers::pi * static_cast<double>(genus - 1);
}

double collar_volume(double area, double width) {
  require(area > 0.0, "collar_volume: area must be positive");
  require(width >= 0.0, "collar_volume: width must be non-negative");
  return 0.25 * area * (2.0 * width + std::sinh(2.0 * width));
}

double collar_modified_volume(double area, double width) {
  require(area > 0.0, "collar_modified_volume: area must be positive");
  require(width >= 0.0, "collar_modified_volume: width must be non-negative");
  return 0.25 * area * (1.0 + std::cosh(2.0 * width));
}

double collar_width_from_volume(double area, double volume) {
  require(area > 0.0, "collar_width_from_volume: area must be positive");
  require(volume >= 0.0, "collar_width_from_volume: volume must be non-negative");
  if (volume == 0.0) return 0.0;

  double lo = 0.0;
  double hi = std::max(1.0, std::log1p(4.0 * volume / area));
  while (collar_volume(area, hi) < volume) {
    lo = hi;
    hi *= 2.0;
  }

  const double target_residual = 1e-13 * std::max(1.0, volume);
  double d = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = collar_volume(area, d) - volume;
    if (std::abs(f) <= target_residual) break;
    if (f > 0.0) {
      hi = d;
    } else {
      lo = d;
    }
    // d/dd collar_volume = 2 * modified volume > 0
    const double slope = 2.0 * collar_modified_volume(area, d);
    double next = d - f / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == d) break;
    d = next;
  }
  return d;
}

double relative_torus_area(double lattice_covolume, double radius) {
  require(lattice_covolume > 0.0, "relative_torus_area: covolume must be positive");
  require(radius > 0.0, "relative_torus_area: radius must be positive");
  return lattice_covolume / (radius * radius);
}

double cusp_partner_volume(double product, double volume) {
  require(product > 0.0, "cusp_partner_volume: product must be positive");
  require(volume > 0.0, "cusp_partner_volume: volume must be positive");
  return product / volume;
}

double cusp_volume_given_collar(double relative_area, double width) {
  require(relative_area > 0.0, "cusp_volume_given_collar: relative area must be positive");
  require(width >= 0.0, "cusp_volume_given_collar: width must be non-negative");
  return 0.5 * relative_area * std::exp(-2.0 * width);
}

double collar_partner_width(double width_sum, double width) {
  require(width > 0.0 && width < width_sum,
          "collar_partner_width: width must lie strictly inside (0, sum)");
  return width_sum - width;
}

}  // namespace periph::geometry
