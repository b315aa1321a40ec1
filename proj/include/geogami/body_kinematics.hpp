#pragma once

#include <array>

#include <Eigen/Core>

#include "geogami/units.hpp"

// Planar body geometry: corner radii, the mass-weighted offset of the four
// corner masses, the world-frame centre of mass and its rates. Positions are
// in mm, angles in rad, and the body rolls without slip along +x as phi
// increases.
namespace geogami::body {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Quad = std::array<double, 4>;

/// Ray angles (pi/2, 0, 3pi/2, pi): corner 1 up, 2 right, 3 down, 4 left.
inline constexpr Quad kCanonicalRayAngles{kPi / 2.0, 0.0, 3.0 * kPi / 2.0,
                                          kPi};

struct MassLayout {
  double central_mass_kg = 0.2;
  Quad corner_mass_kg{0.1, 0.1, 0.1, 0.1};
  Quad ray_angle_rad = kCanonicalRayAngles;
  Quad rest_radius_mm{94.4, 94.4, 94.4, 94.4};

  double total_mass() const;
  /// Throws zero_mass / invalid_argument on a broken layout.
  void validate() const;

  bool operator==(const MassLayout&) const = default;
};

struct BodyState {
  double roll_angle_rad = 0.0;
  double support_radius_mm = 94.4;
  Quad contraction_mm{0.0, 0.0, 0.0, 0.0};
  double time_s = 0.0;

  bool operator==(const BodyState&) const = default;
};

/// Time derivatives of the shape and roll variables.
struct StateRates {
  double roll_rate = 0.0;            // rad/s
  double support_radius_rate = 0.0;  // mm/s
  Quad radius_rate{0.0, 0.0, 0.0, 0.0};  // dr_i/dt, mm/s
};

/// r_i = R_i - u_i. Corner is 1-based. Throws radius_inversion if u_i >= R_i.
double instantaneous_radius(const MassLayout& layout, int corner,
                            double contraction_mm);
/// All four radii of a state.
Quad radii(const MassLayout& layout, const BodyState& state);

/// No-slip translation of the body centre, (R phi, 0).
Vec2 body_center(double roll_angle, double support_radius);

Mat2 rotation_matrix(double angle);

/// d_b = (1/M_T) sum m_i r_i (cos a_i, sin a_i) for arbitrary ray angles.
Vec2 body_mass_offset(const MassLayout& layout, const Quad& radii);
/// Component form for the canonical layout:
/// ((m2 r2 - m4 r4) / M_T, (m1 r1 - m3 r3) / M_T).
Vec2 canonical_mass_offset(const MassLayout& layout, const Quad& radii);

/// r_G = r_s + R(phi) d_b.
Vec2 world_com(const MassLayout& layout, const BodyState& state);
/// Same quantity expanded into scalar components.
Vec2 world_com_components(const MassLayout& layout, const BodyState& state);
/// d r_G / dt for the given rates.
Vec2 world_com_velocity(const MassLayout& layout, const BodyState& state,
                        const StateRates& rates);

/// Kinematic offset point (R phi + (r2 - r4) cos phi, -(r1 - r3) sin phi).
Vec2 offset_point(const BodyState& state, const Quad& radii);
/// Exact time derivative of offset_point.
Vec2 offset_point_velocity(const BodyState& state, const Quad& radii,
                           const StateRates& rates);

}  // namespace geogami::body
