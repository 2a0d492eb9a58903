#pragma once

// Closed-form volume formulas for boundary collars and cusp neighbourhoods,
// plus the three tangency relations between pairs of peripheral components.
//
// Units: widths d are hyperbolic lengths, volumes are hyperbolic volumes,
// areas are hyperbolic (collars) or Euclidean-normalized (relative torus
// areas). All functions are pure and throw std::domain_error on inputs
// outside their stated domain.

namespace periph::geometry {

/// Area of a closed orientable hyperbolic surface of genus g >= 2, i.e. 4*pi*(g-1).
double boundary_area_from_genus(int genus);

/// Volume of the width-d collar of a geodesic boundary surface of the given
/// area: (area/4) * (2d + sinh 2d).
double collar_volume(double area, double width);

/// (area/4) * (1 + cosh 2d). Half the derivative of collar_volume in d.
double collar_modified_volume(double area, double width);

/// Inverse of collar_volume in the width. No closed form exists, so this is a
/// safeguarded Newton iteration on a bisection bracket.
double collar_width_from_volume(double area, double volume);

/// Cusp torus area relative to a boundary component: covolume / r^2.
double relative_torus_area(double lattice_covolume, double radius);

/// Volume of a cusp kept tangent to another cusp of volume v when the
/// product of the two volumes is K.
double cusp_partner_volume(double product, double volume);

/// Volume of a cusp tangent to a collar of width d: (R/2) * exp(-2d), where R
/// is the cusp's torus area relative to the collar's boundary component.
double cusp_volume_given_collar(double relative_area, double width);

/// Width of a collar kept tangent to another collar of width d when the sum
/// of widths is D.
double collar_partner_width(double width_sum, double width);

}  // namespace periph::geometry
