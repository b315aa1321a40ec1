#pragma once

#include <array>
#include <optional>

#include "geogami/units.hpp"

// Worm / sector-gear / spool kinematics and the quasi-static torque-force
// mapping of the cyclic cable-drive gearbox. Angles are radians, lengths mm,
// torques N*m and forces N.
namespace geogami::transmission {

inline constexpr int kCornerCount = 4;

struct GearboxConfig {
  int worm_teeth = 43;
  int driver_teeth = 5;
  int driven_teeth = 10;
  double spool_radius_mm = 8.0;
  // Toothed arc of the sector gear. Not given for the prototype; pi/2 lets
  // the four corners tile one driver revolution.
  double sector_arc_rad = kPi / 2.0;
  double efficiency_worm = 0.78;
  double efficiency_spur = 0.90;
  int corner_count = kCornerCount;

  /// Total efficiency eta = eta_w * eta_g.
  double efficiency() const { return efficiency_worm * efficiency_spur; }
  /// Duty factor D = alpha / 2pi.
  double duty_factor() const { return sector_arc_rad / kTwoPi; }
  /// Spool turns per driver turn, T_dr / T_dv.
  double spool_ratio() const {
    return static_cast<double>(driver_teeth) / driven_teeth;
  }

  /// Throws Error(invalid_argument) when an invariant is violated.
  void validate() const;

  bool operator==(const GearboxConfig&) const = default;
};

enum class EngagementMode { cyclic_sector, fixed_spindle };

/// Per-corner engagement indicator chi_i as a function of driver angle.
///
/// Cyclic mode: corners engage one at a time in ring order 1->2->3->4,
/// starting with `first_corner` at driver angle 0. Each window subtends
/// exactly alpha of driver angle; windows are spaced by the slot pitch
/// max(alpha, 2pi/N), so a sector with alpha <= 2pi/N serves all corners in
/// one driver revolution and a wider sector indexes one corner per alpha.
///
/// Fixed-spindle mode: every corner is always engaged, with a per-corner
/// take-up multiplier standing in for the spindle geometry.
class EngagementSchedule {
 public:
  static EngagementSchedule cyclic(const GearboxConfig& cfg,
                                   int first_corner = 1);
  static EngagementSchedule fixed_spindle(
      const std::array<double, kCornerCount>& take_up);

  EngagementMode mode() const { return mode_; }
  int first_corner() const { return first_corner_; }

  /// chi_i(driver_angle). Corner is 1-based.
  bool engaged(int corner, double driver_angle) const;
  /// The single engaged corner in cyclic mode, if any.
  std::optional<int> engaged_corner(double driver_angle) const;
  /// Take-up rate multiplier (1 in cyclic mode).
  double take_up(int corner) const;

  /// Signed measure of driver angle in [from, to] during which `corner` is
  /// engaged, i.e. the integral of chi_i.
  double engaged_measure(int corner, double from, double to) const;

  /// Smallest driver angle strictly greater than `driver_angle` at which any
  /// chi_i toggles. Empty in fixed-spindle mode.
  std::optional<double> next_toggle(double driver_angle) const;

  double slot_pitch() const { return pitch_; }
  double window() const { return window_; }

  bool operator==(const EngagementSchedule&) const = default;

 private:
  EngagementSchedule() = default;

  // Offset of the corner's window inside one ring cycle.
  double slot_offset(int corner) const;
  // Integral of chi_i over [0, x]; signed for x < 0.
  double cumulative(int corner, double x) const;

  EngagementMode mode_ = EngagementMode::cyclic_sector;
  int corners_ = kCornerCount;
  int first_corner_ = 1;
  double window_ = kPi / 2.0;
  double pitch_ = kPi / 2.0;
  std::array<double, kCornerCount> take_up_{1.0, 1.0, 1.0, 1.0};
};

/// Throws Error(invalid_corner) unless 1 <= corner <= kCornerCount.
void check_corner(int corner);

double driver_angle(double motor_angle, const GearboxConfig& cfg);

/// Accumulated spool rotation of `corner` after the motor has turned from 0 to
/// `motor_angle`, integrating chi_i * T_dr/T_dv over the driver trajectory.
double spool_angle(double motor_angle, int corner,
                   const EngagementSchedule& schedule,
                   const GearboxConfig& cfg);

/// L = r_s * theta_s (single-layer wrap).
double cable_retraction(double spool_angle, const GearboxConfig& cfg);

/// Motor rotation that retracts `retraction_mm` while the corner stays
/// engaged. Throws retraction_exceeds_engagement when one sector pass
/// (alpha * T_w of motor angle) cannot deliver it.
double motor_angle_for_retraction(double retraction_mm,
                                  const GearboxConfig& cfg);

/// omega_phase = D * motor_speed / T_w.
double phase_velocity(double motor_speed, const GearboxConfig& cfg);

/// tau_s = chi * eta * T_w * (T_dv/T_dr) * tau_m.
double spool_torque(double motor_torque, bool engaged,
                    const GearboxConfig& cfg);

/// F = tau_s / r_s.
double cable_force(double spool_torque, const GearboxConfig& cfg);

/// Inverse of the engaged torque chain: motor torque for a cable force.
double motor_torque_for_force(double force, const GearboxConfig& cfg);

/// Efficiency that makes `force` and `motor_torque` consistent with the
/// cable-force relation for this gearing.
double closing_efficiency(double force, double motor_torque,
                          const GearboxConfig& cfg);

}  // namespace geogami::transmission
