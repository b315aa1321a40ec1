#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

// Joint bending models, their fitting from bench measurements, and the
// series/parallel algebra that lumps one side of the body into a single
// radial spring and a cable-side stiffness.
namespace geogami::compliance {

enum class JointFamily {
  aligning,
  opposing,
  multi_directional,
  folding_24mm,
  folding_30mm,
  custom,
};

std::string_view to_string(JointFamily family);
/// Throws Error(parse_error) for an unknown name.
JointFamily joint_family_from_string(std::string_view name);

/// Dense polynomial with ascending coefficients c0 + c1 x + c2 x^2 + ...
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

  double operator()(double x) const;
  Polynomial derivative() const;
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  bool operator==(const Polynomial&) const = default;

 private:
  std::vector<double> coeffs_;
};

struct MeasurementSample {
  double theta_rad = 0.0;
  double force_n = 0.0;
  double return_rad = 0.0;
};

struct JointMeasurementSet {
  JointFamily family = JointFamily::custom;
  std::vector<MeasurementSample> samples;
  std::string metadata;
};

struct JointModel {
  JointFamily family = JointFamily::custom;
  Polynomial force;         // theta [rad] -> F_b [N]
  Polynomial return_angle;  // theta [rad] -> theta_r [rad]
  double theta_min = 0.0;
  double theta_max = 0.0;
  double mean_stiffness = 0.0;  // N/rad, average of dF_b/dtheta over range
  std::string metadata;

  bool operator==(const JointModel&) const = default;
};

struct JointFit {
  JointModel model;
  double force_rms = 0.0;   // N
  double return_rms = 0.0;  // rad
};

/// Least-squares polynomial fits of F_b(theta) and theta_r(theta).
JointFit fit_joint_model(const JointMeasurementSet& data, int degree);

/// Average slope (F(b) - F(a)) / (b - a), i.e. the mean of k_b over [a, b].
double mean_stiffness(const Polynomial& force, double theta_min,
                      double theta_max);

/// k_b(theta) = dF_b/dtheta. Throws out_of_range outside the valid range.
double bending_stiffness(const JointModel& model, double theta);

/// Elastic return angle after unloading from `theta`, clamped to [0, theta].
double return_angle(const JointModel& model, double theta);

/// Shipped models synthesised from the published stiffness anchors.
/// Throws for JointFamily::custom.
JointModel default_joint_model(JointFamily family);

/// One entry of a series chain: a scalar stiffness or a joint model, repeated
/// `count` times.
struct ChainLink {
  std::variant<double, JointModel> element;
  int count = 1;

  bool operator==(const ChainLink&) const = default;
};

/// Series combination (sum k_j^-1)^-1. Joint models are evaluated at `theta`,
/// or at their mean stiffness when theta is empty.
double chain_stiffness(std::span<const ChainLink> chain,
                       std::optional<double> theta = std::nullopt);
double series_stiffness(std::span<const double> elements);
double parallel_stiffness(std::span<const double> elements);

/// How the origami chain and the two skeleton segments combine on a side.
enum class CompositionLaw {
  /// Skeleton pair in parallel, then in series with the chain.
  parallel_skeleton,
  /// Chain and both skeleton segments all in series (default).
  all_series,
};

inline constexpr double kRigidCable = std::numeric_limits<double>::infinity();

struct SideAssembly {
  std::vector<ChainLink> origami_chain;  // empty: no origami cap on this side
  double skeleton_left = 0.6;
  double skeleton_right = 0.6;
  double cable_stiffness = kRigidCable;
  double routing_gain = 1.0;
  double rest_radius_mm = 94.4;
  // Angular-to-radial conversion applied to every stiffness on the side.
  // 1 treats the N/rad values directly as N/mm over the operating range.
  double radial_factor = 1.0;

  void validate() const;
};

/// Linearised radial stiffness of the origami chain, or empty without a cap.
std::optional<double> origami_stiffness(const SideAssembly& side,
                                        std::optional<double> theta = {});

/// kappa_i for one side.
double side_equivalent_stiffness(const SideAssembly& side, CompositionLaw law,
                                 std::optional<double> theta = {});

/// K_i^-1 = kappa_i^-1 + k_c^-1.
double cable_series_stiffness(const SideAssembly& side, CompositionLaw law,
                              std::optional<double> theta = {});

/// T_i = K_i u_i.
double tension_from_contraction(const SideAssembly& side, CompositionLaw law,
                                double contraction_mm);
/// T_i = (K_i / g_i) delta_l_i.
double tension_from_retraction(const SideAssembly& side, CompositionLaw law,
                               double retraction_mm);

}  // namespace geogami::compliance
