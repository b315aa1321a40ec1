#include "geogami/transmission.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "geogami/error.hpp"

namespace geogami::transmission {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::invalid_argument, what);
}

// Non-negative remainder of x / period.
double wrap(double x, double period) {
  double r = std::fmod(x, period);
  if (r < 0.0) r += period;
  return r;
}

}  // namespace

void GearboxConfig::validate() const {
  require(worm_teeth >= 1 && driver_teeth >= 1 && driven_teeth >= 1,
          "gearbox teeth counts must be >= 1");
  require(std::isfinite(spool_radius_mm) && spool_radius_mm > 0.0,
          "spool radius must be positive");
  require(sector_arc_rad > 0.0 && sector_arc_rad <= kTwoPi,
          "sector arc must lie in (0, 2pi]");
  require(efficiency_worm > 0.0 && efficiency_worm <= 1.0,
          "worm efficiency must lie in (0, 1]");
  require(efficiency_spur > 0.0 && efficiency_spur <= 1.0,
          "spur efficiency must lie in (0, 1]");
  require(corner_count == kCornerCount,
          fmt::format("corner count must be {}", kCornerCount));
}

void check_corner(int corner) {
  if (corner < 1 || corner > kCornerCount) {
    throw Error(Errc::invalid_corner,
                fmt::format("corner index {} outside 1..{}", corner,
                            kCornerCount));
  }
}

EngagementSchedule EngagementSchedule::cyclic(const GearboxConfig& cfg,
                                              int first_corner) {
  cfg.validate();
  check_corner(first_corner);
  EngagementSchedule s;
  s.mode_ = EngagementMode::cyclic_sector;
  s.corners_ = cfg.corner_count;
  s.first_corner_ = first_corner;
  s.window_ = cfg.sector_arc_rad;
  s.pitch_ = std::max(cfg.sector_arc_rad, kTwoPi / cfg.corner_count);
  return s;
}

EngagementSchedule EngagementSchedule::fixed_spindle(
    const std::array<double, kCornerCount>& take_up) {
  for (double m : take_up) {
    require(std::isfinite(m) && m >= 0.0,
            "spindle take-up multipliers must be finite and >= 0");
  }
  EngagementSchedule s;
  s.mode_ = EngagementMode::fixed_spindle;
  s.take_up_ = take_up;
  s.window_ = kTwoPi;
  s.pitch_ = kTwoPi;
  return s;
}

double EngagementSchedule::slot_offset(int corner) const {
  const int slot = ((corner - first_corner_) % corners_ + corners_) % corners_;
  return slot * pitch_;
}

bool EngagementSchedule::engaged(int corner, double driver_angle) const {
  check_corner(corner);
  if (mode_ == EngagementMode::fixed_spindle) return true;
  const double rem = wrap(driver_angle, corners_ * pitch_);
  const double off = slot_offset(corner);
  return rem >= off && rem < off + window_;
}

std::optional<int> EngagementSchedule::engaged_corner(
    double driver_angle) const {
  if (mode_ == EngagementMode::fixed_spindle) return std::nullopt;
  const double rem = wrap(driver_angle, corners_ * pitch_);
  const int slot = std::min(static_cast<int>(rem / pitch_), corners_ - 1);
  if (rem - slot * pitch_ >= window_) return std::nullopt;
  return (first_corner_ - 1 + slot) % corners_ + 1;
}

double EngagementSchedule::take_up(int corner) const {
  check_corner(corner);
  return mode_ == EngagementMode::fixed_spindle ? take_up_[corner - 1] : 1.0;
}

double EngagementSchedule::cumulative(int corner, double x) const {
  if (mode_ == EngagementMode::fixed_spindle) return x;
  const double cycle = corners_ * pitch_;
  const double n = std::floor(x / cycle);
  const double rem = x - n * cycle;
  return n * window_ + std::clamp(rem - slot_offset(corner), 0.0, window_);
}

double EngagementSchedule::engaged_measure(int corner, double from,
                                           double to) const {
  check_corner(corner);
  return cumulative(corner, to) - cumulative(corner, from);
}

std::optional<double> EngagementSchedule::next_toggle(
    double driver_angle) const {
  if (mode_ == EngagementMode::fixed_spindle) return std::nullopt;
  const double cycle = corners_ * pitch_;
  const double tol = 1e-12 * std::max(1.0, std::abs(driver_angle));
  const double base = std::floor(driver_angle / cycle) * cycle;
  std::optional<double> best;
  for (int rep = 0; rep < 2; ++rep) {
    for (int slot = 0; slot < corners_; ++slot) {
      for (double edge : {slot * pitch_, slot * pitch_ + window_}) {
        const double t = base + rep * cycle + edge;
        if (t > driver_angle + tol && (!best || t < *best)) best = t;
      }
    }
  }
  return best;
}

double driver_angle(double motor_angle, const GearboxConfig& cfg) {
  return motor_angle / cfg.worm_teeth;
}

double spool_angle(double motor_angle, int corner,
                   const EngagementSchedule& schedule,
                   const GearboxConfig& cfg) {
  check_corner(corner);
  const double engaged_driver =
      schedule.engaged_measure(corner, 0.0, driver_angle(motor_angle, cfg));
  return schedule.take_up(corner) * engaged_driver * cfg.spool_ratio();
}

double cable_retraction(double spool_angle, const GearboxConfig& cfg) {
  return cfg.spool_radius_mm * spool_angle;
}

double motor_angle_for_retraction(double retraction_mm,
                                  const GearboxConfig& cfg) {
  if (!std::isfinite(retraction_mm) || retraction_mm < 0.0) {
    throw Error(Errc::invalid_argument,
                fmt::format("retraction must be finite and >= 0 (got {})",
                            retraction_mm));
  }
  const double motor = retraction_mm * cfg.driven_teeth * cfg.worm_teeth /
                       (cfg.spool_radius_mm * cfg.driver_teeth);
  const double window = cfg.sector_arc_rad * cfg.worm_teeth;
  if (motor > window * (1.0 + 1e-12)) {
    throw Error(Errc::retraction_exceeds_engagement,
                fmt::format("retraction {} mm needs {} rad of motor travel but "
                            "one sector pass provides {} rad",
                            retraction_mm, motor, window));
  }
  return motor;
}

double phase_velocity(double motor_speed, const GearboxConfig& cfg) {
  return cfg.duty_factor() * motor_speed / cfg.worm_teeth;
}

double spool_torque(double motor_torque, bool engaged,
                    const GearboxConfig& cfg) {
  if (!engaged) return 0.0;
  return cfg.efficiency() * cfg.worm_teeth *
         (static_cast<double>(cfg.driven_teeth) / cfg.driver_teeth) *
         motor_torque;
}

double cable_force(double spool_torque, const GearboxConfig& cfg) {
  return spool_torque / (cfg.spool_radius_mm / kMmPerM);
}

double motor_torque_for_force(double force, const GearboxConfig& cfg) {
  return force * (cfg.spool_radius_mm / kMmPerM) * cfg.driver_teeth /
         (cfg.efficiency() * cfg.worm_teeth * cfg.driven_teeth);
}

double closing_efficiency(double force, double motor_torque,
                          const GearboxConfig& cfg) {
  return force * (cfg.spool_radius_mm / kMmPerM) * cfg.driver_teeth /
         (motor_torque * cfg.worm_teeth * cfg.driven_teeth);
}

}  // namespace geogami::transmission
