#include "geogami/locomotion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "geogami/error.hpp"

namespace geogami::locomotion {

namespace {

constexpr double kEventTolerance = 1e-9;   // s, bisection bracket width
constexpr double kSaturationSnap = 1e-9;   // mm
constexpr int kMaxChainedRolls = 8;

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view name,
                const std::array<std::pair<Enum, std::string_view>, N>& table,
                std::string_view what) {
  for (const auto& [value, text] : table) {
    if (text == name) return value;
  }
  throw Error(Errc::parse_error, fmt::format("unknown {} '{}'", what, name));
}

template <typename Enum, std::size_t N>
std::string_view enum_name(
    Enum value, const std::array<std::pair<Enum, std::string_view>, N>& table) {
  for (const auto& [v, text] : table) {
    if (v == value) return text;
  }
  return "?";
}

constexpr std::array<std::pair<ActuationMode, std::string_view>, 4> kModes{{
    {ActuationMode::cyclic, "cyclic"},
    {ActuationMode::pyramid, "pyramid"},
    {ActuationMode::spindle5, "spindle5"},
    {ActuationMode::spindle10, "spindle10"},
}};

constexpr std::array<std::pair<ReleaseModel, std::string_view>, 2> kReleases{{
    {ReleaseModel::instant_return, "instant_return"},
    {ReleaseModel::return_angle_limited, "return_angle_limited"},
}};

constexpr std::array<std::pair<EventKind, std::string_view>, 6> kEvents{{
    {EventKind::engagement_start, "engagement_start"},
    {EventKind::engagement_end, "engagement_end"},
    {EventKind::tip, "tip"},
    {EventKind::roll_complete, "roll_complete"},
    {EventKind::stall, "stall"},
    {EventKind::saturation, "saturation"},
}};

// Angle wrapped into (-pi, pi].
double wrap_pi(double a) {
  double r = std::remainder(a, kTwoPi);
  if (r <= -kPi) r += kTwoPi;
  return r;
}

double max_contraction(const RobotModel& model, const ActuationProgram& program,
                       int corner) {
  return program.max_retraction_mm / model.sides[corner - 1].routing_gain;
}

// Contraction rate of an engaged corner, mm/s.
double contraction_rate(const RobotModel& model,
                        const ActuationProgram& program, int corner) {
  const auto& gb = model.gearbox;
  const double spool_rate = program.schedule.take_up(corner) *
                            gb.spool_ratio() *
                            transmission::driver_angle(
                                program.motor_speed_rad_s, gb);
  return transmission::cable_retraction(spool_rate, gb) /
         model.sides[corner - 1].routing_gain;
}

bool at_limit(const RobotModel& model, const ActuationProgram& program,
              const SimState& state, int corner) {
  return state.body.contraction_mm[corner - 1] >=
         max_contraction(model, program, corner);
}

// Moves time, motor angle and engaged contractions forward by h.
SimState advance(const RobotModel& model, const ActuationProgram& program,
                 const SimState& state, double h) {
  SimState next = state;
  next.body.time_s += h;
  next.motor_angle_rad += program.motor_speed_rad_s * h;
  for (int c : engaged_corners(program, state)) {
    const double limit = max_contraction(model, program, c);
    double& u = next.body.contraction_mm[c - 1];
    if (u >= limit) continue;
    u = std::min(u + contraction_rate(model, program, c) * h, limit);
    if (limit - u < kSaturationSnap) u = limit;
  }
  return next;
}

TipCheck check_tip(const RobotModel& model, const SimState& state) {
  const Quad r = body::radii(model.layout, state.body);
  return tipping_check(state.body, model.layout, support_polygon(model, r));
}

SimEvent make_event(EventKind kind, const SimState& state, int corner = 0,
                    int direction = 0) {
  return {kind, state.body.time_s, state.motor_angle_rad, corner, direction,
          state.body};
}

// Rolls while the body keeps tipping; emits tip / roll_complete pairs.
void resolve_tipping(const RobotModel& model, const ActuationProgram& program,
                     SimState& state, std::vector<SimEvent>& events) {
  for (int n = 0; n < kMaxChainedRolls; ++n) {
    const TipCheck tip = check_tip(model, state);
    if (!tip.tipping) return;
    events.push_back(make_event(EventKind::tip, state, 0, tip.direction));
    state.body =
        execute_roll(state.body, tip.direction, program.roll_quantum_rad);
    state.rolls.push_back(
        {state.body.time_s, tip.direction * program.roll_quantum_rad});
    state.rolled_this_engagement = true;
    events.push_back(
        make_event(EventKind::roll_complete, state, 0, tip.direction));
  }
  throw Error(Errc::degenerate_polygon,
              fmt::format("body still tipping after {} chained rolls at t={} s",
                          kMaxChainedRolls, state.body.time_s));
}

void release_corner(const RobotModel& model, const ActuationProgram& program,
                    SimState& state, int corner) {
  double& u = state.body.contraction_mm[corner - 1];
  switch (program.release) {
    case ReleaseModel::instant_return:
      u = 0.0;
      break;
    case ReleaseModel::return_angle_limited: {
      const double bend = u / model.contraction_per_rad_mm;
      const double clamped = std::clamp(bend, model.return_model.theta_min,
                                        model.return_model.theta_max);
      if (clamped > 0.0) {
        const double recovered =
            compliance::return_angle(model.return_model, clamped);
        u *= 1.0 - recovered / clamped;
      }
      break;
    }
  }
}

void check_finite(const SimState& state) {
  bool ok = std::isfinite(state.body.time_s) &&
            std::isfinite(state.motor_angle_rad) &&
            std::isfinite(state.body.roll_angle_rad);
  for (double u : state.body.contraction_mm) ok = ok && std::isfinite(u);
  if (!ok) throw Error(Errc::non_finite, "simulation state is not finite");
}

}  // namespace

std::string_view to_string(ActuationMode mode) { return enum_name(mode, kModes); }
ActuationMode actuation_mode_from_string(std::string_view name) {
  return parse_enum(name, kModes, "actuation mode");
}
std::string_view to_string(ReleaseModel model) {
  return enum_name(model, kReleases);
}
ReleaseModel release_model_from_string(std::string_view name) {
  return parse_enum(name, kReleases, "release model");
}
std::string_view to_string(EventKind kind) { return enum_name(kind, kEvents); }

void ActuationProgram::validate() const {
  auto fail = [](const std::string& what) {
    throw Error(Errc::config_error, what);
  };
  if (!std::isfinite(motor_speed_rad_s) || motor_speed_rad_s < 0.0) {
    fail("motor speed must be finite and >= 0");
  }
  if (!std::isfinite(duration_s) || duration_s < 0.0) {
    fail("duration must be finite and >= 0");
  }
  if (!(time_step_s > 0.0)) fail("time step must be positive");
  if (!(max_retraction_mm > 0.0)) fail("max retraction must be positive");
  if (!(roll_quantum_rad > 0.0)) fail("roll quantum must be positive");
  for (const auto* d : {&with_origami, &without_origami}) {
    if (!(d->damping_ratio >= 0.0 && d->damping_ratio <= 1.0)) {
      fail("damping ratio must lie in [0, 1]");
    }
    if (!(d->natural_frequency_rad_s > 0.0)) {
      fail("natural frequency must be positive");
    }
  }
  if (!allow_damping_override &&
      with_origami.damping_ratio < without_origami.damping_ratio) {
    fail("with_origami damping ratio is below without_origami; set "
         "allow_damping_override to accept");
  }
}

void RobotModel::validate() const {
  gearbox.validate();
  layout.validate();
  for (const auto& side : sides) side.validate();
  if (!(contact_half_angle_rad >= 0.0 && contact_half_angle_rad < kPi / 4.0)) {
    throw Error(Errc::config_error, "contact half angle must lie in [0, pi/4)");
  }
  if (!(contraction_per_rad_mm > 0.0)) {
    throw Error(Errc::config_error, "contraction per radian must be positive");
  }
}

SupportPolygon support_polygon(const RobotModel& model, const Quad& radii) {
  struct Foot {
    double angle;
    Vec2 point;
  };
  std::vector<Foot> feet;
  const double half = model.contact_half_angle_rad;
  for (int i = 0; i < 4; ++i) {
    const double base = model.layout.ray_angle_rad[i];
    const auto add = [&](double a) {
      const double wrapped = std::fmod(std::fmod(a, kTwoPi) + kTwoPi, kTwoPi);
      feet.push_back({wrapped, radii[i] * Vec2(std::cos(a), std::sin(a))});
    };
    if (half > 0.0) {
      add(base - half);
      add(base + half);
    } else {
      add(base);
    }
  }
  std::sort(feet.begin(), feet.end(),
            [](const Foot& a, const Foot& b) { return a.angle < b.angle; });
  SupportPolygon polygon;
  polygon.vertices.reserve(feet.size());
  for (const auto& f : feet) polygon.vertices.push_back(f.point);
  return polygon;
}

ContactEdge contact_edge(const body::BodyState& state,
                         const SupportPolygon& polygon) {
  const auto n = static_cast<int>(polygon.vertices.size());
  if (n < 3) {
    throw Error(Errc::degenerate_polygon,
                fmt::format("support polygon has {} vertices", n));
  }
  const double phi = state.roll_angle_rad;
  const body::Mat2 rot = body::rotation_matrix(phi);
  const Vec2 center = body::body_center(phi, state.support_radius_mm);

  // Angle of each vertex measured counterclockwise from straight down.
  int left = -1, right = -1;
  double left_w = -std::numeric_limits<double>::infinity();
  double right_w = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const Vec2& v = polygon.vertices[j];
    const Vec2 world = rot * v;
    if (world.norm() == 0.0) continue;
    const double w = wrap_pi(std::atan2(world.y(), world.x()) + kPi / 2.0);
    if (w <= 0.0 && w > left_w) {
      left_w = w;
      left = j;
    }
    if (w > 0.0 && w < right_w) {
      right_w = w;
      right = j;
    }
  }
  if (left < 0 || right < 0) {
    throw Error(Errc::degenerate_polygon, "no ground-contact edge below body");
  }
  // A vertex exactly below the centre is a point contact.
  if (std::abs(left_w) < 1e-12) right = left;

  ContactEdge edge;
  edge.left = left;
  edge.right = right;
  edge.left_x = center.x() + (rot * polygon.vertices[left]).x();
  edge.right_x = center.x() + (rot * polygon.vertices[right]).x();
  return edge;
}

TipCheck tipping_check(const body::BodyState& state,
                       const body::MassLayout& layout,
                       const SupportPolygon& polygon) {
  const ContactEdge edge = contact_edge(state, polygon);
  TipCheck out;
  out.com_x = body::world_com(layout, state).x();
  if (out.com_x > edge.right_x) {
    out.tipping = true;
    out.direction = 1;
    out.pivot_x = edge.right_x;
  } else if (out.com_x < edge.left_x) {
    out.tipping = true;
    out.direction = -1;
    out.pivot_x = edge.left_x;
  } else {
    out.pivot_x = out.com_x >= 0.5 * (edge.left_x + edge.right_x)
                      ? edge.right_x
                      : edge.left_x;
  }
  return out;
}

body::BodyState execute_roll(const body::BodyState& state, int direction,
                             double quantum) {
  body::BodyState next = state;
  next.roll_angle_rad += (direction >= 0 ? 1.0 : -1.0) * quantum;
  return next;
}

SimState initial_state(const RobotModel& model, const ActuationProgram& program,
                       const body::BodyState& body) {
  SimState state;
  state.body = body;
  if (program.schedule.mode() == transmission::EngagementMode::cyclic_sector) {
    const double first = transmission::driver_angle(0.0, model.gearbox);
    const auto toggle = program.schedule.next_toggle(first);
    const double probe = toggle ? 0.5 * (first + *toggle) : first;
    state.engaged_corner = program.schedule.engaged_corner(probe);
  }
  return state;
}

std::vector<int> engaged_corners(const ActuationProgram& program,
                                 const SimState& state) {
  if (program.schedule.mode() == transmission::EngagementMode::fixed_spindle) {
    return {1, 2, 3, 4};
  }
  if (state.engaged_corner) return {*state.engaged_corner};
  return {};
}

std::optional<StallReport> detect_stall(const RobotModel& model,
                                        const ActuationProgram& program,
                                        const SimState& state) {
  const auto corners = engaged_corners(program, state);
  if (corners.empty()) return std::nullopt;
  for (int c : corners) {
    if (!at_limit(model, program, state, c)) return std::nullopt;
  }
  if (check_tip(model, state).tipping) return std::nullopt;
  return StallReport{state.body.time_s, state.motor_angle_rad,
                     state.body.contraction_mm};
}

StepResult step(const RobotModel& model, const ActuationProgram& program,
                const SimState& start, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw Error(Errc::invalid_argument, "step size must be positive");
  }
  StepResult out{start, {}};
  SimState& state = out.state;
  if (state.stalled) {
    state.body.time_s += dt;
    state.motor_angle_rad += program.motor_speed_rad_s * dt;
    return out;
  }

  const auto& gb = model.gearbox;
  const double speed = program.motor_speed_rad_s;
  double remaining = dt;
  resolve_tipping(model, program, state, out.events);

  while (remaining > 0.0 && !state.stalled) {
    // Candidate end of the current linear segment.
    double h = remaining;
    bool boundary = false;
    double boundary_motor = 0.0;
    if (speed > 0.0) {
      const auto toggle =
          program.schedule.next_toggle(transmission::driver_angle(
              state.motor_angle_rad, gb));
      if (toggle) {
        boundary_motor = *toggle * gb.worm_teeth;
        const double h_toggle = (boundary_motor - state.motor_angle_rad) / speed;
        if (h_toggle <= h) {
          h = std::max(h_toggle, 0.0);
          boundary = true;
        }
      }
      for (int c : engaged_corners(program, state)) {
        const double gap = max_contraction(model, program, c) -
                           state.body.contraction_mm[c - 1];
        const double rate = contraction_rate(model, program, c);
        if (gap > 0.0 && rate > 0.0 && gap / rate < h) {
          h = gap / rate;
          boundary = false;
        }
      }
    }

    SimState end = advance(model, program, state, h);
    if (check_tip(model, end).tipping) {
      // Bisect for the first instant the COM leaves the contact edge.
      double lo = 0.0, hi = h;
      while (hi - lo > kEventTolerance) {
        const double mid = 0.5 * (lo + hi);
        if (check_tip(model, advance(model, program, state, mid)).tipping) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      state = advance(model, program, state, hi);
      remaining -= hi;
      resolve_tipping(model, program, state, out.events);
      check_finite(state);
      continue;
    }

    state = std::move(end);
    remaining -= h;
    if (boundary) {
      state.motor_angle_rad = boundary_motor;
      const double at = transmission::driver_angle(boundary_motor, gb);
      if (const auto old = state.engaged_corner) {
        release_corner(model, program, state, *old);
        out.events.push_back(
            make_event(EventKind::engagement_end, state, *old));
      }
      const auto after = program.schedule.next_toggle(at);
      state.engaged_corner =
          program.schedule.engaged_corner(after ? 0.5 * (at + *after) : at);
      state.rolled_this_engagement = false;
      state.drive_saturated = false;
      if (state.engaged_corner) {
        out.events.push_back(make_event(EventKind::engagement_start, state,
                                        *state.engaged_corner));
      }
      // Released contraction can move the COM.
      resolve_tipping(model, program, state, out.events);
    }

    const auto corners = engaged_corners(program, state);
    const bool all_limited =
        !corners.empty() &&
        std::all_of(corners.begin(), corners.end(), [&](int c) {
          return at_limit(model, program, state, c);
        });
    if (all_limited && !state.drive_saturated) {
      state.drive_saturated = true;
      const bool spindle = program.schedule.mode() ==
                           transmission::EngagementMode::fixed_spindle;
      if (spindle || !state.rolled_this_engagement) {
        out.events.push_back(make_event(
            EventKind::saturation, state, corners.size() == 1 ? corners[0] : 0));
        resolve_tipping(model, program, state, out.events);
        if (detect_stall(model, program, state)) {
          state.stalled = true;
          out.events.push_back(make_event(EventKind::stall, state));
        }
      }
    }
    check_finite(state);
    if (h == 0.0 && !boundary) break;
  }
  if (state.stalled && remaining > 0.0) {
    state.body.time_s += remaining;
    state.motor_angle_rad += speed * remaining;
  }
  return out;
}

double oscillation_overlay(const DampingPreset& damping, double delta,
                           double tau) {
  if (tau < 0.0) return -delta;
  const double wn = damping.natural_frequency_rad_s;
  const double zeta = damping.damping_ratio;
  if (zeta >= 1.0) return -delta * std::exp(-wn * tau) * (1.0 + wn * tau);
  const double root = std::sqrt(1.0 - zeta * zeta);
  const double wd = wn * root;
  return -delta * std::exp(-zeta * wn * tau) *
         (std::cos(wd * tau) + zeta / root * std::sin(wd * tau));
}

double peak_overshoot(const DampingPreset& damping, double delta) {
  const double zeta = damping.damping_ratio;
  if (zeta >= 1.0) return 0.0;
  return std::abs(delta) * std::exp(-kPi * zeta / std::sqrt(1.0 - zeta * zeta));
}

double displayed_roll_angle(const SimState& state, const DampingPreset& damping,
                            double time_s) {
  double phi = state.body.roll_angle_rad;
  for (const auto& roll : state.rolls) {
    phi += oscillation_overlay(damping, roll.delta_rad, time_s - roll.time_s);
  }
  return phi;
}

namespace {

TraceRecord make_record(const RobotModel& model,
                        const ActuationProgram& program, const SimState& state,
                        std::optional<EventKind> event) {
  TraceRecord rec;
  rec.time_s = state.body.time_s;
  rec.motor_angle_rad = state.motor_angle_rad;
  rec.quantized_roll_rad = state.body.roll_angle_rad;
  rec.roll_angle_rad =
      displayed_roll_angle(state, program.active_damping(), state.body.time_s);
  rec.com_mm = body::world_com(model.layout, state.body);
  for (int i = 0; i < 4; ++i) {
    const auto& side = model.sides[i];
    const double u = state.body.contraction_mm[i];
    rec.retraction_mm[i] = side.routing_gain * u;
    rec.tension_n[i] =
        compliance::tension_from_contraction(side, model.law, u);
  }
  rec.event = event;
  return rec;
}

}  // namespace

SimTrace run_program(const RobotModel& model, const ActuationProgram& program,
                     const body::BodyState& initial) {
  model.validate();
  program.validate();
  SimTrace trace;
  SimState state = initial_state(model, program, initial);
  trace.records.push_back(make_record(model, program, state, std::nullopt));
  if (state.engaged_corner ||
      program.schedule.mode() == transmission::EngagementMode::fixed_spindle) {
    if (program.duration_s > 0.0) {
      trace.events.push_back(make_event(EventKind::engagement_start, state,
                                        state.engaged_corner.value_or(0)));
      trace.records.back().event = EventKind::engagement_start;
    }
  }

  const double end = initial.time_s + program.duration_s;
  const auto steps = static_cast<long long>(
      std::ceil(program.duration_s / program.time_step_s - 1e-9));
  for (long long k = 0; k < steps && !state.stalled; ++k) {
    const double target =
        std::min(initial.time_s + (k + 1) * program.time_step_s, end);
    const double dt = target - state.body.time_s;
    if (!(dt > 0.0)) continue;
    StepResult result = step(model, program, state, dt);
    for (const auto& ev : result.events) {
      SimState at = result.state;
      at.body = ev.snapshot;
      at.motor_angle_rad = ev.motor_angle_rad;
      // Oscillation history as of the event instant.
      std::erase_if(at.rolls, [&](const RollRecord& r) {
        return r.time_s > ev.time_s ||
               (r.time_s == ev.time_s && ev.kind == EventKind::tip);
      });
      trace.records.push_back(make_record(model, program, at, ev.kind));
      trace.events.push_back(ev);
    }
    state = std::move(result.state);
    if (!state.stalled) {
      trace.records.push_back(make_record(model, program, state, std::nullopt));
    }
  }
  trace.final_state = state;
  return trace;
}

RunSummary summarize(const SimTrace& trace) {
  RunSummary s;
  if (trace.records.empty()) return s;
  for (const auto& ev : trace.events) {
    if (ev.kind == EventKind::roll_complete) ++s.rolls;
    if (ev.kind == EventKind::stall) {
      s.stalled = true;
      s.stall_time_s = ev.time_s;
    }
  }
  const double phi0 = trace.records.front().quantized_roll_rad;
  s.travel_mm = trace.final_state.body.support_radius_mm *
                (trace.final_state.body.roll_angle_rad - phi0);

  double last_dir = 0.0;
  double last_quantized = phi0;
  for (const auto& rec : trace.records) {
    if (rec.quantized_roll_rad != last_quantized) {
      last_dir = rec.quantized_roll_rad > last_quantized ? 1.0 : -1.0;
      last_quantized = rec.quantized_roll_rad;
    }
    if (last_dir != 0.0) {
      s.max_overshoot_rad =
          std::max(s.max_overshoot_rad,
                   last_dir * (rec.roll_angle_rad - rec.quantized_roll_rad));
    }
    for (double t : rec.tension_n) s.max_tension_n = std::max(s.max_tension_n, t);
  }
  return s;
}

}  // namespace geogami::locomotion
