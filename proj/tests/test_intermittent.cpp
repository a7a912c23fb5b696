#include <gtest/gtest.h>

#include <cmath>

#include "hallci/intermittent.hpp"
#include "hallci/transform.hpp"

using namespace hallci;

namespace {

IntermittencyParams desk() {
  IntermittencyParams p;
  p.lambda = 24;
  p.lambda_sigma = 1;
  p.r = 2;
  p.mu = 53;
  return p;
}

double dot(const Vec3& a, const Wavevector& k) { return a[0] * k.x + a[1] * k.y + a[2] * k.z; }

}  // namespace

TEST(Intermittent, DirichletNormalization) {
  for (int r : {1, 2, 5}) {
    const SpectralField D = dirichlet_3d(Grid(16), r);
    EXPECT_EQ(D.modes(), std::size_t((2 * r + 1) * (2 * r + 1) * (2 * r + 1)));
    EXPECT_NEAR(l2_norm_sq(D), 8 * std::pow(kPi, 3), 1e-9);
    // Physical check: D_r at the origin equals (2r+1)^{3/2}.
    const auto s = from_spectral(D);
    EXPECT_NEAR(s[0][0], std::pow(2.0 * r + 1, 1.5), 1e-10);
  }
  EXPECT_THROW(dirichlet_3d(Grid(16), 8), BandOverflow);
}

TEST(Intermittent, EtaMeanSquareIsOne) {
  const auto ds = build_direction_sets(1)[0];
  const Grid g(64);
  const auto p = desk();
  for (std::size_t i = 0; i < ds.size(); i += 3) {
    const FieldJet eta = build_eta(g, ds.directions[i], p, 0.37);
    EXPECT_LT(conjugate_symmetry_defect(eta.value), 1e-15);
    EXPECT_NEAR(l2_norm_sq(eta.value) / kTorusVolume, 1.0, 1e-13);
    // eta^2 from the lattice formula against a dealiased product.
    const FieldJet e2 = build_eta_squared(g, ds.directions[i], p, 0.37);
    const SpectralField ref = dealiased_product(eta.value, eta.value, Product::Scalar);
    EXPECT_LT(max_abs_coeff(e2.value - ref), 1e-13);
    EXPECT_NEAR(e2.value.coeff({0, 0, 0}).real(), 1.0, 1e-14);
  }
}

TEST(Intermittent, EtaRateMatchesFiniteDifference) {
  const auto ds = build_direction_sets(1)[0];
  const Grid g(64);
  const auto p = desk();
  const double t = 0.2, h = 1e-6;
  const Direction& d = ds.directions[1];
  const FieldJet e = build_eta(g, d, p, t);
  const SpectralField fd = (1.0 / (2 * h)) * (build_eta(g, d, p, t + h).value - build_eta(g, d, p, t - h).value);
  EXPECT_LT(max_abs_coeff(fd - e.rate), 1e-6 * max_abs_coeff(e.rate));
}

TEST(Intermittent, TransportBothSigns) {
  const auto ds = build_direction_sets(1)[0];
  const Grid g(64);
  const auto p = desk();
  for (std::size_t i = 0; i < ds.size(); ++i) {
    EXPECT_LT(check_transport(g, ds.directions[i], p, 0.0), 1e-12);
    EXPECT_LT(check_transport(g, ds.directions[i], p, 0.71), 1e-12);
  }
  // eta_xi and eta_{-xi} coincide.
  const FieldJet a = build_eta(g, ds.directions[0], p, 0.4);
  const FieldJet b = build_eta(g, ds.directions[1], p, 0.4);
  EXPECT_EQ(max_abs_coeff(a.value - b.value), 0.0);
}

TEST(Intermittent, SupportBounds) {
  const auto ds = build_direction_sets(1)[0];
  const Grid g(128);
  const auto p = desk();
  for (const auto& d : ds.directions) {
    const FieldJet eta = build_eta(g, d, p, 0.0);
    EXPECT_LE(support_max_norm(eta.value), 2.0 * p.lambda_sigma * p.r * p.N0 + 1e-12);
    const FieldJet w = intermittent_wave(g, d, 1.0, p, 0.0);
    EXPECT_GE(support_min_norm(w.value), p.lambda / 2.0);
    EXPECT_LE(support_max_norm(w.value), 2.0 * p.lambda);
    // Every mode sits near lambda xi.
    for (std::size_t i = 0; i < w.value.modes(); ++i)
      EXPECT_GT(dot(d.xi, w.value.k(i)), p.lambda / 2.0);
  }
}

TEST(Intermittent, PairIsRealAndSolenoidal) {
  const auto ds = build_direction_sets(1)[0];
  const Grid g(128);
  const auto p = desk();
  for (std::size_t q = 0; q < ds.pairs(); ++q) {
    const FieldJet w = intermittent_pair(g, ds, q, cplx(0.3, -0.8), p, 0.15);
    EXPECT_LT(conjugate_symmetry_defect(w.value), 1e-15);
    EXPECT_LT(conjugate_symmetry_defect(w.rate), 1e-12);
  }
}

TEST(Intermittent, DecorrelatedMean) {
  // Mean of W_xi (x) W_{-xi} is B_xi (x) B_{-xi}.
  const auto ds = build_direction_sets(1)[0];
  const Grid g(128);
  const auto p = desk();
  for (std::size_t q = 0; q < ds.pairs(); ++q) {
    const Direction& d = ds.directions[2 * q];
    const Direction& o = ds.directions[2 * q + 1];
    const FieldJet wp = intermittent_wave(g, d, 1.0, p, 0.3);
    const FieldJet wm = intermittent_wave(g, o, 1.0, p, 0.3);
    const Eigen::Matrix3cd m = mean_outer(wp.value, wm.value);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_LT(std::abs(m(i, j) - d.B[i] * o.B[j]), 1e-13);
  }
}

TEST(Intermittent, ParameterValidation) {
  auto p = desk();
  p.lambda = 25;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = desk();
  p.mu = 10;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = desk();
  p.r = 24;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  // Overflow is reported, not silently truncated.
  const auto ds = build_direction_sets(1)[0];
  EXPECT_THROW(intermittent_wave(Grid(32), ds.directions[0], 1.0, desk(), 0.0), BandOverflow);
}

TEST(Intermittent, LogLogFit) {
  std::vector<double> x = {2, 4, 8, 16}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -0.75));
  const SlopeFit f = fit_loglog(x, y);
  EXPECT_NEAR(f.slope, -0.75, 1e-13);
  EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-12);
  EXPECT_THROW(fit_loglog({1, 2}, {1, 2}), std::invalid_argument);
}

TEST(Intermittent, KernelScalingAtLargeExponents) {
  // Quick sweep, kernel only: p = 2 is flat, the sup is (2r+1)^{3/2}.
  SweepSpec s;
  s.r_values = {2, 4, 8};
  s.include_wave = false;
  s.lambda_values = {24, 48, 96};
  const auto rows = lp_scaling_sweep(build_direction_sets(1)[0], s);
  for (const auto& row : rows) {
    if (row.family != "D_r") continue;
    if (row.p == 2.0) EXPECT_NEAR(row.slope, 0.0, 1e-10);
    if (std::isinf(row.p))
      for (std::size_t i = 0; i < row.x.size(); ++i)
        EXPECT_NEAR(row.norm[i], std::pow(2 * row.x[i] + 1, 1.5), 1e-9 * row.norm[i]);
    // Preasymptotic at r <= 8; the slope against 2r+1 is close to 3/4.
    if (row.p == 4.0) {
      std::vector<double> m;
      for (double r : row.x) m.push_back(2 * r + 1);
      EXPECT_NEAR(fit_loglog(m, row.norm).slope, 0.75, 0.05);
    }
  }
  for (const auto& row : rows) {
    if (row.variable == "lambda" || row.variable == "mu") EXPECT_NEAR(row.slope, 1.0, 0.02);
  }
}
