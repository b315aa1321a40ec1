#include "geogami/body_kinematics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "geogami/error.hpp"

namespace geogami::body {

double MassLayout::total_mass() const {
  double total = central_mass_kg;
  for (double m : corner_mass_kg) total += m;
  return total;
}

void MassLayout::validate() const {
  if (!(central_mass_kg >= 0.0)) {
    throw Error(Errc::invalid_argument, "central mass must be >= 0");
  }
  for (double m : corner_mass_kg) {
    if (!(m >= 0.0)) {
      throw Error(Errc::invalid_argument, "corner masses must be >= 0");
    }
  }
  if (!(total_mass() > 0.0)) {
    throw Error(Errc::zero_mass, "total mass must be positive");
  }
  for (double r : rest_radius_mm) {
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw Error(Errc::invalid_argument, "rest radii must be positive");
    }
  }
  for (std::size_t i = 0; i < ray_angle_rad.size(); ++i) {
    for (std::size_t j = i + 1; j < ray_angle_rad.size(); ++j) {
      const double gap =
          std::remainder(ray_angle_rad[i] - ray_angle_rad[j], kTwoPi);
      if (std::abs(gap) < 1e-12) {
        throw Error(Errc::invalid_argument, "ray angles must be distinct");
      }
    }
  }
}

double instantaneous_radius(const MassLayout& layout, int corner,
                            double contraction_mm) {
  if (corner < 1 || corner > 4) {
    throw Error(Errc::invalid_corner,
                fmt::format("corner index {} outside 1..4", corner));
  }
  const double rest = layout.rest_radius_mm[corner - 1];
  if (!std::isfinite(contraction_mm)) {
    throw Error(Errc::non_finite, "contraction is not finite");
  }
  if (contraction_mm < 0.0) {
    throw Error(Errc::negative_contraction,
                fmt::format("corner {} contraction {} mm is negative", corner,
                            contraction_mm));
  }
  if (contraction_mm >= rest) {
    throw Error(Errc::radius_inversion,
                fmt::format("corner {} contraction {} mm reaches rest radius {} "
                            "mm",
                            corner, contraction_mm, rest));
  }
  return rest - contraction_mm;
}

Quad radii(const MassLayout& layout, const BodyState& state) {
  Quad r{};
  for (int i = 0; i < 4; ++i) {
    r[i] = instantaneous_radius(layout, i + 1, state.contraction_mm[i]);
  }
  return r;
}

Vec2 body_center(double roll_angle, double support_radius) {
  return {support_radius * roll_angle, 0.0};
}

Mat2 rotation_matrix(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat2 rot;
  rot << c, -s, s, c;
  return rot;
}

Vec2 body_mass_offset(const MassLayout& layout, const Quad& radii) {
  const double total = layout.total_mass();
  if (!(total > 0.0)) throw Error(Errc::zero_mass, "total mass is zero");
  Vec2 acc = Vec2::Zero();
  for (int i = 0; i < 4; ++i) {
    const double a = layout.ray_angle_rad[i];
    acc += layout.corner_mass_kg[i] * radii[i] * Vec2(std::cos(a), std::sin(a));
  }
  return acc / total;
}

Vec2 canonical_mass_offset(const MassLayout& layout, const Quad& radii) {
  const double total = layout.total_mass();
  if (!(total > 0.0)) throw Error(Errc::zero_mass, "total mass is zero");
  const auto& m = layout.corner_mass_kg;
  return {(m[1] * radii[1] - m[3] * radii[3]) / total,
          (m[0] * radii[0] - m[2] * radii[2]) / total};
}

Vec2 world_com(const MassLayout& layout, const BodyState& state) {
  const Vec2 offset = body_mass_offset(layout, radii(layout, state));
  return body_center(state.roll_angle_rad, state.support_radius_mm) +
         rotation_matrix(state.roll_angle_rad) * offset;
}

Vec2 world_com_components(const MassLayout& layout, const BodyState& state) {
  const Vec2 d = body_mass_offset(layout, radii(layout, state));
  const double phi = state.roll_angle_rad;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  return {state.support_radius_mm * phi + c * d.x() - s * d.y(),
          s * d.x() + c * d.y()};
}

Vec2 world_com_velocity(const MassLayout& layout, const BodyState& state,
                        const StateRates& rates) {
  const double total = layout.total_mass();
  if (!(total > 0.0)) throw Error(Errc::zero_mass, "total mass is zero");
  const Quad r = radii(layout, state);
  Vec2 d = Vec2::Zero();
  Vec2 d_dot = Vec2::Zero();
  for (int i = 0; i < 4; ++i) {
    const double a = layout.ray_angle_rad[i];
    const Vec2 ray(std::cos(a), std::sin(a));
    d += layout.corner_mass_kg[i] * r[i] * ray / total;
    d_dot += layout.corner_mass_kg[i] * rates.radius_rate[i] * ray / total;
  }
  const double phi = state.roll_angle_rad;
  // dR(phi)/dt = phi_dot * R(phi + pi/2)
  const Mat2 rot = rotation_matrix(phi);
  const Mat2 rot_dot = rates.roll_rate * rotation_matrix(phi + kPi / 2.0);
  const Vec2 center_dot(rates.support_radius_rate * phi +
                            state.support_radius_mm * rates.roll_rate,
                        0.0);
  return center_dot + rot_dot * d + rot * d_dot;
}

Vec2 offset_point(const BodyState& state, const Quad& radii) {
  const double phi = state.roll_angle_rad;
  return {state.support_radius_mm * phi + (radii[1] - radii[3]) * std::cos(phi),
          -(radii[0] - radii[2]) * std::sin(phi)};
}

Vec2 offset_point_velocity(const BodyState& state, const Quad& radii,
                           const StateRates& rates) {
  const double phi = state.roll_angle_rad;
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double dx = radii[1] - radii[3];
  const double dy = radii[0] - radii[2];
  const double dx_dot = rates.radius_rate[1] - rates.radius_rate[3];
  const double dy_dot = rates.radius_rate[0] - rates.radius_rate[2];
  return {rates.support_radius_rate * phi +
              state.support_radius_mm * rates.roll_rate + dx_dot * c -
              rates.roll_rate * dx * s,
          -dy_dot * s - rates.roll_rate * dy * c};
}

}  // namespace geogami::body
