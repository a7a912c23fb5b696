#include <gtest/gtest.h>

#include <cmath>

#include "hallci/perturbation.hpp"
#include "hallci/transform.hpp"
#include "test_util.hpp"

using namespace hallci;

namespace {

const std::vector<DirectionSet>& families() {
  static const std::vector<DirectionSet> f = build_direction_sets(2);
  return f;
}

// Traceless symmetric stress s(x) diag(1, -1, 0) + small shear.
SpectralField shaped_stress(const SpectralField& s) {
  SpectralField R = SpectralField::zeros_like(s, 6);
  R = map_modes(s, 6, [](const Wavevector&, const cplx* v, cplx* o) {
    o[0] = v[0];
    o[1] = -v[0];
    o[3] = 0.3 * v[0];
  });
  return R;
}

}  // namespace

TEST(Cutoffs, PartitionOfUnity) {
  std::vector<double> z;
  for (int i = 0; i <= 2000; ++i) z.push_back(std::pow(10.0, -3.0 + 9.0 * i / 2000.0));
  EXPECT_LT(partition_residual(z), 1e-10);
  EXPECT_EQ(chi0_tilde(4.0), 0.0);
  EXPECT_EQ(chi0_tilde(2.0), 1.0);
  EXPECT_EQ(chi_tilde(0.5), 0.0);
  EXPECT_EQ(chi_tilde(4.0), 0.0);
  EXPECT_GT(chi_tilde(1.0), 0.0);
  EXPECT_EQ(smooth_step(2.0), 0.0);
  EXPECT_EQ(smooth_step(4.0), 1.0);
}

TEST(Cutoffs, ZeroStressKeepsOnlyChi0) {
  const CutoffPartition cp = build_cutoffs_zero(Grid(16), CutoffConfig{});
  EXPECT_TRUE(cp.uniform);
  EXPECT_EQ(cp.imax, 0);
  EXPECT_EQ(cp.chi[0][0], 1.0);
  EXPECT_EQ(cp.mean_chi_sq[0], 1.0);
}

TEST(Cutoffs, L1ChebyshevBound) {
  // chi_i != 0 forces |R| > (sqrt3/4) 4^i scale, so Chebyshev bounds |chi_i|_1.
  const Grid g(64);
  CutoffConfig cfg;
  cfg.ell = 1e-6;
  const SpectralField D = dirichlet_3d(g, 10);
  const SpectralField D2 = dealiased_product(D, D, Product::Scalar);
  const SpectralField R = shaped_stress((std::pow(4.0, 7) * cfg.scale() / std::pow(21.0, 3)) * D2);
  const CutoffPartition cp = build_cutoffs(R, cfg);
  ASSERT_GE(cp.imax, 5);
  const double rl1 = lp_norm(R, 1.0);
  for (int i = 1; i <= cp.imax; ++i)
    EXPECT_LE(cp.l1[i], rl1 / (std::sqrt(3.0) / 4.0 * std::pow(4.0, i) * cfg.scale())) << i;
  EXPECT_TRUE(cp.imax_within_bound);
}

TEST(Cutoffs, L1DecayAcrossIndices) {
  // |R| ~ |x|^-3 has level sets of measure ~ 1/s, the borderline L^1 profile.
  const int n = 128;
  const Grid g(n);
  CutoffConfig cfg;
  cfg.ell = 1e-8;
  std::vector<double> s(std::size_t(n) * n * n);
  const double h = 2 * kPi / n, eps = 2 * h;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z) {
        auto d = [&](int i) { return h * std::min(i, n - i); };
        const double r2 = d(x) * d(x) + d(y) * d(y) + d(z) * d(z);
        s[(std::size_t(x) * n + y) * n + z] = std::pow(eps * eps + r2, -1.5);
      }
  const SpectralField f = to_spectral(g, {s});
  const SpectralField R = shaped_stress((std::pow(4.0, 8) * cfg.scale() / std::pow(eps, -3.0)) * f);
  const CutoffPartition cp = build_cutoffs(R, cfg);
  ASSERT_GE(cp.imax, 6);
  std::vector<double> idx, l1;
  // Skip the top index, which only sees the smoothed core.
  for (int i = 1; i < cp.imax; ++i) {
    idx.push_back(std::exp(double(i)));
    l1.push_back(cp.l1[i]);
  }
  const SlopeFit fit = fit_loglog(idx, l1);
  EXPECT_LE(fit.slope, -std::log(4.0) + 0.3);
}

TEST(Rho0, ClosedFormWhenStressVanishes) {
  const CutoffPartition cp = build_cutoffs_zero(Grid(16), CutoffConfig{});
  const double delta = 0.8;
  const std::vector<double> t = {0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<double> E(5, 2.0), J2(5, 2.0 - delta);
  const std::vector<const CutoffPartition*> cps(5, &cp);
  const Rho0Result r = build_rho0(t, E, J2, cps, delta, 0.05);
  for (double v : r.rho0) EXPECT_NEAR(v, (delta / 2) / 3.0, 1e-13);
  EXPECT_TRUE(r.within_bound);
}

TEST(Rho0, MaxClampsAtZero) {
  const CutoffPartition cp = build_cutoffs_zero(Grid(16), CutoffConfig{});
  EXPECT_EQ(pumping_rho(1.0 + 0.25, 1.0, cp, 0.5), 0.0);
  EXPECT_EQ(pumping_rho(1.0, 1.0, cp, 0.5), 0.0);
  EXPECT_THROW(pumping_rho(-1.0, 0.0, cp, 0.5), std::invalid_argument);
  const std::vector<const CutoffPartition*> cps = {&cp};
  EXPECT_THROW(build_rho0({0.0}, {-0.1}, {0.0}, cps, 0.5, 0.1), std::invalid_argument);
}

TEST(Rho0, MollificationOfSmoothProfile) {
  const CutoffPartition cp = build_cutoffs_zero(Grid(16), CutoffConfig{});
  std::vector<double> t, E, J2;
  for (int k = 0; k <= 20; ++k) {
    t.push_back(0.05 * k);
    E.push_back(1.0 + 0.2 * std::sin(t.back()));
    J2.push_back(0.0);
  }
  const std::vector<const CutoffPartition*> cps(t.size(), &cp);
  const double delta = 1.5;
  const Rho0Result r = build_rho0(t, E, J2, cps, delta, 0.01);
  for (std::size_t k = 2; k + 2 < t.size(); ++k) EXPECT_NEAR(r.rho0[k], r.rho[k], 1e-5);
  EXPECT_TRUE(r.within_bound);
}

TEST(Increment, ZeroAmplitudeGivesZero) {
  const Grid g(64);
  const CutoffPartition cp = build_cutoffs_zero(g, CutoffConfig{});
  const AmplitudeSet amps = build_amplitudes(cp, 0.0, families(), AmplitudeConfig{});
  EXPECT_TRUE(amps.entries.empty());
  IntermittencyParams p{12, 1, 2, 40.0};
  const Increment inc = build_increment(g, amps, families(), p, 0.3);
  EXPECT_EQ(max_abs_coeff(inc.w().value), 0.0);
  EXPECT_EQ(max_abs_coeff(inc.v().value), 0.0);
}

TEST(Increment, StructureWithConstantAmplitudes) {
  const Grid g(64);
  const CutoffPartition cp = build_cutoffs_zero(g, CutoffConfig{});
  const AmplitudeSet amps = build_amplitudes(cp, 0.4, families(), AmplitudeConfig{});
  EXPECT_EQ(amps.entries.size(), 6u);
  EXPECT_EQ(amps.ball_violations, 0u);
  EXPECT_LT(amps.energy_identity_residual, 1e-12);
  IntermittencyParams p{12, 1, 2, 40.0};
  const Increment inc = build_increment(g, amps, families(), p, 0.3);
  const IncrementChecks c = check_increment(inc);
  EXPECT_LT(c.div_vpc, 1e-11);
  EXPECT_LT(c.div_v, 1e-10);
  EXPECT_LT(c.div_w, 1e-10);
  EXPECT_LT(c.curl_v_minus_w, 1e-10);
  EXPECT_LT(c.wt_curl, 1e-10);
  EXPECT_LT(c.lambda_vp, 1e-11);
  EXPECT_LT(c.curl_wp, 1e-11);
  EXPECT_LT(conjugate_symmetry_defect(inc.w().value), 1e-14);
  EXPECT_GT(l2_norm(inc.w_t.value), 0.0);
}

TEST(Increment, StructureWithVaryingStress) {
  const Grid g(64);
  CutoffConfig cfg;
  cfg.delta_next = 1.0;
  // Small stress: stays inside the gamma ball for rho0 = 1.
  const SpectralField s = hallci::testing::random_field(g, 1, 2, 7);
  const SpectralField R = shaped_stress((0.02 / lp_norm(s, kInf)) * s);
  const CutoffPartition cp = build_cutoffs(R, cfg);
  EXPECT_EQ(cp.imax, 0);
  const AmplitudeSet amps = build_amplitudes(cp, 1.0, families(), AmplitudeConfig{3.0});
  EXPECT_EQ(amps.ball_violations, 0u);
  EXPECT_LT(amps.energy_identity_residual, 1e-8);
  IntermittencyParams p{12, 1, 2, 40.0};
  const Increment inc = build_increment(g, amps, families(), p, 0.1);
  const IncrementChecks c = check_increment(inc);
  EXPECT_LT(c.div_vpc, 1e-11);
  EXPECT_LT(c.div_v, 1e-10);
  EXPECT_LT(c.div_w, 1e-10);
  EXPECT_LT(c.curl_v_minus_w, 1e-10);
  EXPECT_LT(c.lambda_vp, 1e-11);
  EXPECT_LT(c.curl_wp, 1e-11);
  EXPECT_LT(conjugate_symmetry_defect(inc.w().value), 1e-13);
}

TEST(Increment, BallViolationsAreCounted) {
  const Grid g(32);
  const SpectralField s = hallci::testing::random_field(g, 1, 2, 3);
  const SpectralField R = shaped_stress((5.0 / max_abs_coeff(s)) * s);
  const CutoffPartition cp = build_cutoffs(R, CutoffConfig{});
  const AmplitudeSet amps = build_amplitudes(cp, 0.5, families(), AmplitudeConfig{});
  EXPECT_GT(amps.ball_violations, 0u);
  EXPECT_GT(amps.worst_ball_ratio, 1.0);
}

TEST(Increment, RateMatchesFiniteDifference) {
  const Grid g(64);
  const SpectralField s = hallci::testing::random_field(g, 1, 2, 11);
  const SpectralField R = shaped_stress((0.02 / lp_norm(s, kInf)) * s);
  const CutoffPartition cp = build_cutoffs(R, CutoffConfig{});
  const AmplitudeSet amps = build_amplitudes(cp, 1.0, families(), AmplitudeConfig{});
  IntermittencyParams p{12, 1, 2, 40.0};
  const double t = 0.2, h = 1e-5;
  const Increment a = build_increment(g, amps, families(), p, t);
  const Increment ap = build_increment(g, amps, families(), p, t + h);
  const Increment am = build_increment(g, amps, families(), p, t - h);
  const FieldJet w = a.w();
  const SpectralField fd = (0.5 / h) * (ap.w().value - am.w().value);
  EXPECT_LT(max_abs_coeff(fd - w.rate) / max_abs_coeff(w.rate), 1e-6);
}

TEST(Increment, PumpedEnergyAndMeanStress) {
  // Decorrelation oracle: with constant amplitudes the mean of
  // lambda^2 v^p (x) v^p is rho Id up to cross-direction overlaps.
  const Grid g(256);
  const CutoffPartition cp = build_cutoffs_zero(g, CutoffConfig{});
  const double rho = 0.3;
  const AmplitudeSet amps = build_amplitudes(cp, rho, families(), AmplitudeConfig{});
  IntermittencyParams p{96, 1, 8, 1000.0};
  const Increment inc = build_increment(g, amps, families(), p, 0.0);
  const double wp2 = l2_norm_sq(inc.w_p.value);
  EXPECT_NEAR(wp2 / (3 * rho * kTorusVolume), 1.0, 0.2);
  const Eigen::Matrix3cd m = mean_outer(inc.v_p.value, inc.v_p.value) * double(p.lambda * p.lambda);
  EXPECT_LT((m.real() - rho * Mat3::Identity()).norm() / (rho * std::sqrt(3.0)), 0.1);
  const IncrementNorms n = increment_norm_suite(inc, 1.0);
  EXPECT_NEAR(n.lambda_vp_over_wp, 1.0, 0.1);
}
