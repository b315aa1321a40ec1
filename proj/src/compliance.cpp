#include "geogami/compliance.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <type_traits>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "geogami/error.hpp"
#include "geogami/units.hpp"

namespace geogami::compliance {

namespace {

struct FamilyName {
  JointFamily family;
  std::string_view name;
};

constexpr FamilyName kFamilyNames[] = {
    {JointFamily::aligning, "aligning"},
    {JointFamily::opposing, "opposing"},
    {JointFamily::multi_directional, "multi_directional"},
    {JointFamily::folding_24mm, "folding_24mm"},
    {JointFamily::folding_30mm, "folding_30mm"},
    {JointFamily::custom, "custom"},
};

// Tolerance on the valid-range check, to absorb rounding at the endpoints.
constexpr double kRangeSlack = 1e-9;

void check_in_range(const JointModel& model, double theta) {
  if (!std::isfinite(theta) || theta < model.theta_min - kRangeSlack ||
      theta > model.theta_max + kRangeSlack) {
    throw Error(Errc::out_of_range,
                fmt::format("theta {} rad outside valid range [{}, {}]", theta,
                            model.theta_min, model.theta_max));
  }
}

// Least-squares fit returning coefficients and the RMS residual.
std::pair<Polynomial, double> least_squares(const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& y,
                                            int degree) {
  Eigen::MatrixXd vandermonde(x.size(), degree + 1);
  for (Eigen::Index r = 0; r < x.size(); ++r) {
    double p = 1.0;
    for (int c = 0; c <= degree; ++c) {
      vandermonde(r, c) = p;
      p *= x(r);
    }
  }
  const Eigen::VectorXd coeffs = vandermonde.colPivHouseholderQr().solve(y);
  const double rms =
      std::sqrt((vandermonde * coeffs - y).squaredNorm() / x.size());
  return {Polynomial(std::vector<double>(coeffs.data(),
                                         coeffs.data() + coeffs.size())),
          rms};
}

double inverse(double k, std::string_view what) {
  if (!(k > 0.0)) {
    throw Error(Errc::zero_stiffness,
                fmt::format("{} stiffness must be positive (got {})", what, k));
  }
  return 1.0 / k;
}

}  // namespace

std::string_view to_string(JointFamily family) {
  for (const auto& entry : kFamilyNames) {
    if (entry.family == family) return entry.name;
  }
  return "custom";
}

JointFamily joint_family_from_string(std::string_view name) {
  for (const auto& entry : kFamilyNames) {
    if (entry.name == name) return entry.family;
  }
  throw Error(Errc::parse_error, fmt::format("unknown joint family '{}'", name));
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (coeffs_.size() <= 1) return Polynomial({0.0});
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t i = 1; i < coeffs_.size(); ++i) {
    d[i - 1] = static_cast<double>(i) * coeffs_[i];
  }
  return Polynomial(std::move(d));
}

JointFit fit_joint_model(const JointMeasurementSet& data, int degree) {
  if (degree < 1) {
    throw Error(Errc::invalid_argument,
                fmt::format("fit degree must be >= 1 (got {})", degree));
  }
  const auto n = data.samples.size();
  if (n == 0) throw Error(Errc::underdetermined_fit, "no samples");

  std::set<double> distinct;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = data.samples[i];
    if (!std::isfinite(s.theta_rad) || !std::isfinite(s.force_n) ||
        !std::isfinite(s.return_rad)) {
      throw Error(Errc::non_finite,
                  fmt::format("sample {} has a non-finite value", i + 1));
    }
    if (s.theta_rad < 0.0 || s.theta_rad >= kPi) {
      throw Error(Errc::out_of_range,
                  fmt::format("sample {}: theta {} rad outside [0, pi)", i + 1,
                              s.theta_rad));
    }
    if (s.force_n < 0.0) {
      throw Error(Errc::invalid_argument,
                  fmt::format("sample {}: negative force {}", i + 1, s.force_n));
    }
    distinct.insert(s.theta_rad);
  }
  const std::size_t needed =
      std::max<std::size_t>(4, static_cast<std::size_t>(degree) + 1);
  if (distinct.size() < needed) {
    throw Error(Errc::underdetermined_fit,
                fmt::format("degree {} fit needs {} distinct angles, have {}",
                            degree, needed, distinct.size()));
  }

  Eigen::VectorXd theta(n), force(n), ret(n);
  for (std::size_t i = 0; i < n; ++i) {
    theta(i) = data.samples[i].theta_rad;
    force(i) = data.samples[i].force_n;
    ret(i) = data.samples[i].return_rad;
  }

  JointFit fit;
  auto [force_poly, force_rms] = least_squares(theta, force, degree);
  auto [return_poly, return_rms] = least_squares(theta, ret, degree);
  fit.model.family = data.family;
  fit.model.force = std::move(force_poly);
  fit.model.return_angle = std::move(return_poly);
  fit.model.theta_min = *distinct.begin();
  fit.model.theta_max = *distinct.rbegin();
  fit.model.mean_stiffness = mean_stiffness(
      fit.model.force, fit.model.theta_min, fit.model.theta_max);
  fit.model.metadata = data.metadata;
  fit.force_rms = force_rms;
  fit.return_rms = return_rms;
  return fit;
}

double mean_stiffness(const Polynomial& force, double theta_min,
                      double theta_max) {
  if (!(theta_max > theta_min)) {
    throw Error(Errc::invalid_argument, "empty stiffness averaging range");
  }
  return (force(theta_max) - force(theta_min)) / (theta_max - theta_min);
}

double bending_stiffness(const JointModel& model, double theta) {
  check_in_range(model, theta);
  return model.force.derivative()(theta);
}

double return_angle(const JointModel& model, double theta) {
  check_in_range(model, theta);
  const double bound = std::max(theta, 0.0);
  return std::clamp(model.return_angle(theta), 0.0, bound);
}

JointModel default_joint_model(JointFamily family) {
  JointModel m;
  m.family = family;
  m.theta_min = 0.0;
  switch (family) {
    // Folding polygon joints: near-constant slope over 0-1.75 rad with mean
    // 0.52 / 0.43 N/rad, F_b -> 0 at theta -> 0, and theta_r rising to
    // ~16-17 deg at full bend.
    case JointFamily::folding_24mm:
      m.force = Polynomial({0.0, 0.515625, 0.02, -0.01});
      m.return_angle = Polynomial({0.0, 0.05, 0.065});
      m.theta_max = 1.75;
      break;
    case JointFamily::folding_30mm:
      m.force = Polynomial({0.0, 0.42825, 0.015, -0.008});
      m.return_angle = Polynomial({0.0, 0.04, 0.075});
      m.theta_max = 1.75;
      break;
    // Skeleton joints, shaped after the qualitative trends only.
    case JointFamily::aligning:
      m.force = Polynomial({0.0, 1.1, 0.4});
      m.return_angle = Polynomial({0.0, 0.45, -0.2});
      m.theta_max = 1.5;
      break;
    case JointFamily::opposing:
      m.force = Polynomial({0.0, 0.8, -0.15});
      m.return_angle = Polynomial({0.0, 0.9, -0.75, 0.2});
      m.theta_max = 1.5;
      break;
    case JointFamily::multi_directional:
      m.force = Polynomial({0.0, 0.35, 0.0, 0.02});
      m.return_angle = Polynomial({0.0, 0.6, -0.08});
      m.theta_max = 2.6;
      break;
    case JointFamily::custom:
      throw Error(Errc::invalid_argument, "no default model for custom joints");
  }
  m.mean_stiffness = mean_stiffness(m.force, m.theta_min, m.theta_max);
  m.metadata = "shipped default";
  return m;
}

double series_stiffness(std::span<const double> elements) {
  if (elements.empty()) {
    throw Error(Errc::invalid_argument, "empty series chain");
  }
  double compliance = 0.0;
  for (double k : elements) compliance += inverse(k, "series element");
  return 1.0 / compliance;
}

double parallel_stiffness(std::span<const double> elements) {
  if (elements.empty()) {
    throw Error(Errc::invalid_argument, "empty parallel set");
  }
  double sum = 0.0;
  for (double k : elements) {
    if (!(k >= 0.0)) {
      throw Error(Errc::invalid_argument, "parallel stiffness must be >= 0");
    }
    sum += k;
  }
  return sum;
}

double chain_stiffness(std::span<const ChainLink> chain,
                       std::optional<double> theta) {
  if (chain.empty()) throw Error(Errc::invalid_argument, "empty series chain");
  double compliance = 0.0;
  for (const auto& link : chain) {
    if (link.count < 1) {
      throw Error(Errc::invalid_argument, "chain link count must be >= 1");
    }
    const double k = std::visit(
        [&](const auto& e) -> double {
          if constexpr (std::is_same_v<std::decay_t<decltype(e)>, double>) {
            return e;
          } else {
            return theta ? bending_stiffness(e, *theta) : e.mean_stiffness;
          }
        },
        link.element);
    compliance += link.count * inverse(k, "chain element");
  }
  return 1.0 / compliance;
}

void SideAssembly::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(skeleton_left) || !positive(skeleton_right)) {
    throw Error(Errc::zero_stiffness, "skeleton stiffness must be positive");
  }
  if (!(cable_stiffness > 0.0)) {
    throw Error(Errc::zero_stiffness, "cable stiffness must be positive");
  }
  if (!positive(routing_gain)) {
    throw Error(Errc::invalid_argument, "routing gain must be positive");
  }
  if (!positive(rest_radius_mm)) {
    throw Error(Errc::invalid_argument, "rest radius must be positive");
  }
  if (!positive(radial_factor)) {
    throw Error(Errc::invalid_argument, "radial factor must be positive");
  }
}

std::optional<double> origami_stiffness(const SideAssembly& side,
                                        std::optional<double> theta) {
  if (side.origami_chain.empty()) return std::nullopt;
  return side.radial_factor * chain_stiffness(side.origami_chain, theta);
}

double side_equivalent_stiffness(const SideAssembly& side, CompositionLaw law,
                                 std::optional<double> theta) {
  side.validate();
  const double left = side.radial_factor * side.skeleton_left;
  const double right = side.radial_factor * side.skeleton_right;
  double compliance = 0.0;
  if (const auto origami = origami_stiffness(side, theta)) {
    compliance += inverse(*origami, "origami chain");
  }
  switch (law) {
    case CompositionLaw::parallel_skeleton:
      compliance += 1.0 / (left + right);
      break;
    case CompositionLaw::all_series:
      compliance += 1.0 / left + 1.0 / right;
      break;
  }
  return 1.0 / compliance;
}

double cable_series_stiffness(const SideAssembly& side, CompositionLaw law,
                              std::optional<double> theta) {
  const double kappa = side_equivalent_stiffness(side, law, theta);
  if (std::isinf(side.cable_stiffness)) return kappa;
  return 1.0 / (1.0 / kappa + 1.0 / side.cable_stiffness);
}

double tension_from_contraction(const SideAssembly& side, CompositionLaw law,
                                double contraction_mm) {
  if (!(contraction_mm >= 0.0)) {
    throw Error(Errc::negative_contraction,
                fmt::format("contraction must be >= 0 (got {})",
                            contraction_mm));
  }
  return cable_series_stiffness(side, law) * contraction_mm;
}

double tension_from_retraction(const SideAssembly& side, CompositionLaw law,
                               double retraction_mm) {
  if (!(retraction_mm >= 0.0)) {
    throw Error(Errc::negative_contraction,
                fmt::format("retraction must be >= 0 (got {})", retraction_mm));
  }
  return cable_series_stiffness(side, law) / side.routing_gain * retraction_mm;
}

}  // namespace geogami::compliance
