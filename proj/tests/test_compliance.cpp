#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "geogami/compliance.hpp"
#include "geogami/error.hpp"
#include "geogami/units.hpp"

using namespace geogami;
using namespace geogami::compliance;

namespace {

SideAssembly table1_side() {
  SideAssembly side;
  side.origami_chain = {{0.096, 1}};
  return side;
}

JointMeasurementSet sample_polynomial(const std::vector<double>& force,
                                      const std::vector<double>& ret, int n,
                                      double theta_max) {
  JointMeasurementSet set;
  const Polynomial f(force), r(ret);
  for (int i = 0; i < n; ++i) {
    const double th = theta_max * i / (n - 1);
    set.samples.push_back({th, f(th), r(th)});
  }
  return set;
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::io_error;
}

}  // namespace

TEST(Polynomial, HornerAndDerivative) {
  const Polynomial p({1.0, -2.0, 0.5, 3.0});
  EXPECT_DOUBLE_EQ(p(0.0), 1.0);
  EXPECT_DOUBLE_EQ(p(2.0), 1.0 - 4.0 + 2.0 + 24.0);
  const auto d = p.derivative();
  EXPECT_EQ(d.coeffs(), (std::vector<double>{-2.0, 1.0, 9.0}));
  EXPECT_EQ(Polynomial({4.0}).derivative().coeffs(), std::vector<double>{0.0});
  EXPECT_DOUBLE_EQ(Polynomial()(3.0), 0.0);
}

TEST(Polynomial, DerivativeMatchesFiniteDifference) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> c(-2.0, 2.0), x(0.0, 2.0);
  for (int t = 0; t < 50; ++t) {
    const Polynomial p({c(rng), c(rng), c(rng), c(rng), c(rng)});
    const double at = x(rng), h = 1e-6;
    const double fd = (p(at + h) - p(at - h)) / (2 * h);
    EXPECT_NEAR(p.derivative()(at), fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(Fit, CubicSyntheticDataIsExact) {
  const std::vector<double> f{0.0, 0.5, 0.03, -0.012};
  const std::vector<double> r{0.0, 0.06, 0.07, 0.001};
  const auto fit = fit_joint_model(sample_polynomial(f, r, 12, 1.6), 3);
  EXPECT_LT(fit.force_rms, 1e-10);
  EXPECT_LT(fit.return_rms, 1e-10);
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_NEAR(fit.model.force.coeffs()[i], f[i], 1e-9);
    EXPECT_NEAR(fit.model.return_angle.coeffs()[i], r[i], 1e-9);
  }
  EXPECT_DOUBLE_EQ(fit.model.theta_min, 0.0);
  EXPECT_DOUBLE_EQ(fit.model.theta_max, 1.6);
}

TEST(Fit, RecoversDefaultFoldingStiffness) {
  const auto ref = default_joint_model(JointFamily::folding_24mm);
  auto data = sample_polynomial(ref.force.coeffs(), ref.return_angle.coeffs(),
                                21, ref.theta_max);
  data.family = JointFamily::folding_24mm;
  const auto fit = fit_joint_model(data, 3);
  EXPECT_NEAR(fit.model.mean_stiffness, 0.52, 1e-9);
  EXPECT_EQ(fit.model.family, JointFamily::folding_24mm);
}

TEST(Fit, DegreeIsAParameter) {
  const auto data = sample_polynomial({0.0, 1.0}, {0.0, 0.1}, 10, 1.0);
  const auto lin = fit_joint_model(data, 1);
  EXPECT_EQ(lin.model.force.degree(), 1);
  EXPECT_NEAR(lin.model.force.coeffs()[1], 1.0, 1e-12);
  EXPECT_EQ(fit_joint_model(data, 5).model.force.degree(), 5);
}

TEST(Fit, Errors) {
  EXPECT_EQ(code_of([] { fit_joint_model({}, 3); }), Errc::underdetermined_fit);

  auto three = sample_polynomial({0.0, 1.0}, {0.0}, 3, 1.0);
  EXPECT_EQ(code_of([&] { fit_joint_model(three, 3); }),
            Errc::underdetermined_fit);

  auto repeated = sample_polynomial({0.0, 1.0}, {0.0}, 3, 1.0);
  for (int i = 0; i < 5; ++i) repeated.samples.push_back(repeated.samples[1]);
  EXPECT_EQ(code_of([&] { fit_joint_model(repeated, 3); }),
            Errc::underdetermined_fit);

  auto nan = sample_polynomial({0.0, 1.0}, {0.0}, 6, 1.0);
  nan.samples[2].force_n = std::nan("");
  EXPECT_EQ(code_of([&] { fit_joint_model(nan, 3); }), Errc::non_finite);

  auto wide = sample_polynomial({0.0, 1.0}, {0.0}, 6, 1.0);
  wide.samples[5].theta_rad = kPi;
  EXPECT_EQ(code_of([&] { fit_joint_model(wide, 3); }), Errc::out_of_range);

  auto neg = sample_polynomial({0.0, 1.0}, {0.0}, 6, 1.0);
  neg.samples[3].force_n = -0.1;
  EXPECT_EQ(code_of([&] { fit_joint_model(neg, 3); }), Errc::invalid_argument);

  EXPECT_EQ(code_of([&] { fit_joint_model(neg, 0); }), Errc::invalid_argument);
}

TEST(JointModel, DefaultAnchors) {
  EXPECT_NEAR(default_joint_model(JointFamily::folding_24mm).mean_stiffness,
              0.52, 1e-12);
  EXPECT_NEAR(default_joint_model(JointFamily::folding_30mm).mean_stiffness,
              0.43, 1e-12);
  for (auto fam : {JointFamily::aligning, JointFamily::opposing,
                   JointFamily::multi_directional, JointFamily::folding_24mm,
                   JointFamily::folding_30mm}) {
    const auto m = default_joint_model(fam);
    EXPECT_NEAR(m.force(0.0), 0.0, 1e-15) << to_string(fam);
    for (double th = 0.0; th <= m.theta_max; th += 0.05) {
      EXPECT_GT(bending_stiffness(m, th), 0.0) << to_string(fam);
      const double r = return_angle(m, th);
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, th + 1e-15);
    }
  }
  EXPECT_THROW(default_joint_model(JointFamily::custom), Error);
}

TEST(JointModel, FamilyNamesRoundTrip) {
  for (auto fam : {JointFamily::aligning, JointFamily::opposing,
                   JointFamily::multi_directional, JointFamily::folding_24mm,
                   JointFamily::folding_30mm, JointFamily::custom}) {
    EXPECT_EQ(joint_family_from_string(to_string(fam)), fam);
  }
  EXPECT_EQ(code_of([] { joint_family_from_string("hinge"); }), Errc::parse_error);
}

TEST(JointModel, OutOfRangeQueries) {
  const auto m = default_joint_model(JointFamily::folding_24mm);
  EXPECT_EQ(code_of([&] { bending_stiffness(m, 2.0); }), Errc::out_of_range);
  EXPECT_EQ(code_of([&] { return_angle(m, -0.1); }), Errc::out_of_range);
  EXPECT_NO_THROW(bending_stiffness(m, 1.75));
}

TEST(JointModel, MeanStiffnessIsAverageSlope) {
  // Independent route: integrate k_b numerically over the range.
  const auto m = default_joint_model(JointFamily::aligning);
  const int n = 20000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += bending_stiffness(m, m.theta_max * (i + 0.5) / n);
  }
  EXPECT_NEAR(acc / n, m.mean_stiffness, 1e-8);
}

TEST(Network, SeriesAndParallel) {
  const std::vector<double> ks{2.0, 2.0};
  EXPECT_DOUBLE_EQ(series_stiffness(ks), 1.0);
  EXPECT_DOUBLE_EQ(parallel_stiffness(ks), 4.0);
  const std::vector<double> zero{1.0, 0.0};
  EXPECT_EQ(code_of([&] { series_stiffness(zero); }), Errc::zero_stiffness);
  EXPECT_EQ(code_of([] { series_stiffness({}); }), Errc::invalid_argument);
}

TEST(Network, SeriesBoundsProperty) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> k(1e-3, 1e3);
  std::uniform_int_distribution<int> n(1, 8);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> ks(static_cast<std::size_t>(n(rng)));
    for (auto& v : ks) v = k(rng);
    const double s = series_stiffness(ks);
    const double kmin = *std::min_element(ks.begin(), ks.end());
    EXPECT_LE(s, kmin * (1 + 1e-12));
    EXPECT_GE(s, kmin / ks.size() * (1 - 1e-12));
    EXPECT_GE(parallel_stiffness(ks), *std::max_element(ks.begin(), ks.end()));
  }
}

TEST(Network, ChainCountsAndModels) {
  const auto m = default_joint_model(JointFamily::folding_24mm);
  const std::vector<ChainLink> chain{{m, 2}, {1.0, 1}};
  EXPECT_NEAR(chain_stiffness(chain), 1.0 / (2.0 / 0.52 + 1.0), 1e-12);
  const double kb = bending_stiffness(m, 0.8);
  EXPECT_NEAR(chain_stiffness(chain, 0.8), 1.0 / (2.0 / kb + 1.0), 1e-12);
  const std::vector<ChainLink> bad{{1.0, 0}};
  EXPECT_THROW(chain_stiffness(bad), Error);
}

TEST(Side, Table1LawB) {
  EXPECT_NEAR(side_equivalent_stiffness(table1_side(), CompositionLaw::all_series),
              0.0727, 5e-4);
  // Hand evaluation of 1 / (1/0.096 + 1/0.6 + 1/0.6).
  EXPECT_NEAR(side_equivalent_stiffness(table1_side(), CompositionLaw::all_series),
              1.0 / (1.0 / 0.096 + 2.0 / 0.6), 1e-15);
}

TEST(Side, Table1LawA) {
  const double kappa =
      side_equivalent_stiffness(table1_side(), CompositionLaw::parallel_skeleton);
  EXPECT_NEAR(kappa, 1.0 / (1.0 / 0.096 + 1.0 / 1.2), 1e-15);
  EXPECT_NEAR(kappa, 0.0889, 1e-4);
}

TEST(Side, NoOrigamiCap) {
  const SideAssembly bare;
  EXPECT_FALSE(origami_stiffness(bare).has_value());
  EXPECT_NEAR(side_equivalent_stiffness(bare, CompositionLaw::all_series), 0.3,
              1e-15);
  EXPECT_NEAR(side_equivalent_stiffness(bare, CompositionLaw::parallel_skeleton),
              1.2, 1e-15);
}

TEST(Side, KappaBoundedByWeakestElement) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> k(0.01, 10.0);
  for (int t = 0; t < 300; ++t) {
    SideAssembly s;
    s.origami_chain = {{k(rng), 1}};
    s.skeleton_left = k(rng);
    s.skeleton_right = k(rng);
    const double kmin = std::min({std::get<double>(s.origami_chain[0].element),
                                  s.skeleton_left, s.skeleton_right});
    const double b = side_equivalent_stiffness(s, CompositionLaw::all_series);
    const double a = side_equivalent_stiffness(s, CompositionLaw::parallel_skeleton);
    EXPECT_LE(b, kmin * (1 + 1e-12));
    EXPECT_GE(a, b);
  }
}

TEST(Side, CableSeries) {
  auto side = table1_side();
  const double kappa = side_equivalent_stiffness(side, CompositionLaw::all_series);
  EXPECT_DOUBLE_EQ(cable_series_stiffness(side, CompositionLaw::all_series), kappa);
  side.cable_stiffness = kappa;
  EXPECT_NEAR(cable_series_stiffness(side, CompositionLaw::all_series), kappa / 2,
              1e-15);
  side.cable_stiffness = 0.0;
  EXPECT_EQ(code_of([&] { side_equivalent_stiffness(side, CompositionLaw::all_series); }),
            Errc::zero_stiffness);
}

TEST(Side, TensionTable1) {
  const auto side = table1_side();
  EXPECT_NEAR(tension_from_retraction(side, CompositionLaw::all_series, 25.1), 1.82,
              0.05);
  EXPECT_EQ(tension_from_contraction(side, CompositionLaw::all_series, 0.0), 0.0);
  EXPECT_EQ(code_of([&] {
              tension_from_contraction(side, CompositionLaw::all_series, -1.0);
            }),
            Errc::negative_contraction);
}

TEST(Side, RoutingGainScalesTension) {
  auto side = table1_side();
  const double t1 = tension_from_retraction(side, CompositionLaw::all_series, 10.0);
  side.routing_gain = 2.0;
  const double t2 = tension_from_retraction(side, CompositionLaw::all_series, 10.0);
  EXPECT_NEAR(t1 / t2, 2.0, 1e-12);
  // Same radial contraction gives the same tension regardless of gain.
  EXPECT_NEAR(tension_from_contraction(side, CompositionLaw::all_series, 5.0),
              t2, 1e-12);
}

TEST(Side, TensionMonotoneInContraction) {
  const auto side = table1_side();
  double prev = -1.0;
  for (double u = 0.0; u <= 30.0; u += 0.5) {
    const double t = tension_from_contraction(side, CompositionLaw::all_series, u);
    EXPECT_GT(t, prev);
    prev = t;
  }
}
