#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "hallci/iteration.hpp"
#include "hallci/norms.hpp"
#include "hallci/transform.hpp"

using namespace hallci;

TEST(Schedule, ExactFormulas) {
  const LevelParameters p0 = schedule(2, 2, 0.01, 0);
  EXPECT_EQ(p0.lambda, 2.0);
  EXPECT_EQ(p0.lambda_next, 4.0);
  // delta_{q+1} / delta_q = lambda_q^{2 beta (1 - b)}
  for (int q = 0; q < 4; ++q) {
    const LevelParameters a = schedule(3, 1.5, 0.02, q), b = schedule(3, 1.5, 0.02, q + 1);
    EXPECT_NEAR(b.delta / a.delta, std::pow(a.lambda, 2 * 0.02 * (1 - 1.5)), 1e-13);
  }
  EXPECT_THROW(schedule(1, 2, 0.01, 0), std::invalid_argument);
}

TEST(Schedule, DeskPresetsSatisfyRelations) {
  for (const char* name : {"hall", "hall-small", "hmhd", "pump"}) {
    const DeskSchedule s = desk_preset(name);
    for (const IntermittencyParams& w : s.waves) {
      EXPECT_EQ(w.lambda_sigma, int(std::lround(w.sigma() * w.lambda)));
      EXPECT_LT(w.sigma() * w.r, 1.0);
      EXPECT_GT(w.mu, w.lambda);
      EXPECT_LT(w.mu, double(w.lambda) * w.lambda);
    }
    EXPECT_GT(s.delta(1), s.delta(2));
    EXPECT_NEAR(s.delta(1), std::pow(s.lambda(1), s.beta), 1e-14);
  }
  DeskSchedule bad = desk_preset("hall");
  bad.waves[0].r = 30;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_THROW(desk_preset("nope"), std::invalid_argument);
}

TEST(EnergyProfile, InterpolatesAndValidates) {
  const EnergyProfile c = EnergyProfile::constant(0.7, 1.0);
  EXPECT_DOUBLE_EQ(c(0.3), 0.7);
  EXPECT_DOUBLE_EQ(c(5.0), 0.7);
  std::vector<double> t, E;
  for (int k = 0; k <= 8; ++k) {
    t.push_back(0.125 * k);
    E.push_back(1 + 0.5 * t.back() * t.back());
  }
  const EnergyProfile p = EnergyProfile::from_samples(t, E);
  EXPECT_NEAR(p(0.3), 1 + 0.5 * 0.09, 1e-10);
  EXPECT_NEAR(p.max_second_difference(), 0.125 * 0.125, 1e-14);
  EXPECT_THROW(EnergyProfile::from_samples({0, 1}, {1, -1}), std::invalid_argument);
  EXPECT_THROW(EnergyProfile::load("/nonexistent/profile.txt"), std::runtime_error);
  const std::string path = ::testing::TempDir() + "profile.txt";
  {
    std::ofstream out(path);
    out << "# t E\n0 1.0\n0.5 1.5  # mid\n\n1 2.0\n";
  }
  const EnergyProfile f = EnergyProfile::load(path);
  EXPECT_EQ(f.times().size(), 3u);
  EXPECT_NEAR(f(1.0), 2.0, 1e-14);
  std::remove(path.c_str());
}

namespace {

HallConfig small_config() {
  HallConfig c;
  c.n = 64;
  c.schedule = desk_preset("hall-small");
  c.slices = {0.0, 0.02};
  return c;
}

}  // namespace

TEST(HallRun, ZeroEnergyKeepsEverythingZero) {
  const HallRun run = run_hall(EnergyProfile::constant(0.0, 1.0), 1, small_config());
  ASSERT_EQ(run.levels.size(), 1u);
  for (const SliceState& s : run.state) {
    EXPECT_EQ(l2_norm(s.B.value), 0.0);
    EXPECT_EQ(l2_norm(s.R), 0.0);
  }
  for (const SliceReport& s : run.levels[0].slices) EXPECT_EQ(s.branch, "rest");
  EXPECT_FALSE(run.failed);
  for (const EnergyRow& r : energy_report(run.levels, 0.25)) EXPECT_EQ(r.gap, 0.0);
}

TEST(HallRun, ZeroLevelsIsANoOp) {
  const HallRun run = run_hall(EnergyProfile::constant(1.0, 1.0), 0, small_config());
  EXPECT_TRUE(run.levels.empty());
  EXPECT_FALSE(run.failed);
}

TEST(HallRun, OneLevelPumpsAndReassembles) {
  const HallConfig cfg = small_config();
  const HallRun run = run_hall(EnergyProfile::constant(1.0, 1.0), 1, cfg);
  const LevelReport& lr = run.levels.at(0);
  EXPECT_TRUE(lr.failures.empty());
  for (const SliceReport& s : lr.slices) {
    EXPECT_EQ(s.branch, "pump");
    EXPECT_LT(s.reassembly, 1e-8);
    EXPECT_LT(s.curl_consistency, 1e-10);
    EXPECT_GT(s.mean_J_sq_after, 0.0);
    // Integral lands in [E - delta_2, E] up to the desk slack.
    EXPECT_GE(s.mean_J_sq_after, 1.0 - 1.25 * lr.delta_next);
    EXPECT_LE(s.mean_J_sq_after, 1.0 + 0.25 * lr.delta_next);
  }
  EXPECT_EQ(run.w_partial_sums.size(), 1u);
}

TEST(HallRun, PumpingOffBelowThreshold) {
  HallConfig cfg = small_config();
  cfg.slices = {0.0};
  HallRun run = run_hall(EnergyProfile::constant(1.0, 1.0), 1, cfg);
  const double mj = l2_norm_sq(run.state[0].J.value) / kTorusVolume;
  const double d2 = cfg.schedule.delta(2);
  // E = int |J_1|^2 + delta_2 / 200 leaves no room to pump at level 2.
  hall_step(run, EnergyProfile::constant(mj + d2 / 200, 1.0), cfg);
  const SliceReport& s = run.levels.at(1).slices.at(0);
  EXPECT_EQ(s.branch, "rest");
  EXPECT_EQ(s.rho0, 0.0);
}

TEST(Nse, ZeroDataStaysZero) {
  const Grid g(16);
  NseConfig c;
  c.dt = 0.01;
  c.T = 0.05;
  const NseResult r = nse_solve(g, nullptr, SpectralField(g, 3), c);
  EXPECT_EQ(l2_norm(r.u), 0.0);
  EXPECT_EQ(r.max_balance, 0.0);
}

TEST(Nse, SingleModeDecaysAtHeatRate) {
  // ABC flow at |k| = 1: curl u = u, so u x omega = 0.
  const Grid g(16);
  SpectralField u(g, 3);
  const cplx I(0, 1);
  const double A = 0.9, B = 0.6, C = 0.3;
  // (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x)
  u.push({0, 0, 1}, {A / (2.0 * I), A / 2.0, 0.0});
  u.push({0, 0, -1}, {-A / (2.0 * I), A / 2.0, 0.0});
  u.push({1, 0, 0}, {0.0, B / (2.0 * I), B / 2.0});
  u.push({-1, 0, 0}, {0.0, -B / (2.0 * I), B / 2.0});
  u.push({0, 1, 0}, {C / 2.0, 0.0, C / (2.0 * I)});
  u.push({0, -1, 0}, {C / 2.0, 0.0, -C / (2.0 * I)});
  u.finalize();
  ASSERT_LT(l2_norm(curl(u) - u), 1e-14);
  NseConfig c;
  c.dt = 0.01;
  c.T = 0.5;
  const NseResult r = nse_solve(g, nullptr, u, c);
  const double discrete = std::pow((1 - 0.5 * c.dt) / (1 + 0.5 * c.dt), 50);
  EXPECT_LT(l2_norm(r.u - discrete * u), 1e-12 * l2_norm(u));
  EXPECT_LT(l2_norm(r.u - std::exp(-c.T) * u), 1e-5 * l2_norm(u));
  EXPECT_LT(r.max_balance, 1e-6);
  EXPECT_LT(r.max_div, 1e-12);
}

TEST(Nse, ForcedByBeltramiIsBounded) {
  const Grid g(32);
  const DirectionSet& ds = direction_families()[0];
  std::vector<cplx> a(ds.size());
  for (std::size_t i = 0; i < ds.size(); i += 2) {
    a[i] = cplx(0.05, 0.02 * double(i));
    a[i + 1] = std::conj(a[i]);
  }
  // Mixed-direction Beltrami field, so (B . grad) B is not a pure gradient.
  const SpectralField Bf = beltrami_wave(g, ds, a, 6) + beltrami_wave(g, direction_families()[1], a, 3);
  NseConfig c;
  c.dt = 0.005;
  c.T = 0.2;
  SpectralField u0(g, 3);
  const NseResult r = nse_solve(g, [&](double) { return Bf; }, u0, c);
  EXPECT_GT(l2_norm(r.u), 0.0);
  EXPECT_LT(r.max_balance, 1e-6);
  EXPECT_LT(r.max_div, 1e-12);
  double umax = 0;
  for (double e : r.energy) umax = std::max(umax, std::sqrt(2 * e));
  // d/dt |u| <= |f| gives sup_t |u| <= int |f| dt.
  EXPECT_LE(umax, r.force_integral * (1 + 1e-12));
}

TEST(Nse, CflViolationIsReported) {
  const Grid g(16);
  SpectralField u(g, 3);
  u.push({0, 0, 3}, {50.0, 0.0, 0.0});
  u.push({0, 0, -3}, {50.0, 0.0, 0.0});
  u.finalize();
  NseConfig c;
  c.dt = 0.1;
  c.T = 0.2;
  EXPECT_THROW(nse_solve(g, nullptr, u, c), NseError);
}

TEST(HmhdRun, ZeroEnergyReducesToZero) {
  HmhdConfig cfg;
  cfg.hall = small_config();
  cfg.nse.T = 0.004;
  const HmhdRun run = run_hmhd(EnergyProfile::constant(0.0, 1.0), 1, cfg);
  EXPECT_EQ(l2_norm(run.u), 0.0);
  EXPECT_EQ(run.levels.at(0).M_l2, 0.0);
  EXPECT_FALSE(run.failed);
}

TEST(HmhdRun, OneLevelChecksPass) {
  HmhdConfig cfg;
  cfg.hall = small_config();
  cfg.nse.T = 0.01;
  const HmhdRun run = run_hmhd(EnergyProfile::constant(1.0, 1.0), 1, cfg);
  const HmhdLevelReport& r = run.levels.at(0);
  EXPECT_TRUE(r.hall.failures.empty());
  EXPECT_GT(r.u_l2, 0.0);
  EXPECT_LT(r.nse_balance, 1e-6);
  EXPECT_LT(r.reassembly_full, 1e-8);
  for (const SliceReport& s : r.hall.slices) EXPECT_LT(s.reassembly, 1e-8);
  // Hoelder with exact exponents: constant 1.
  EXPECT_GT(r.M_lp, 0.0);
  EXPECT_LE(r.M_lp, r.holder_bound * (1 + 1e-6));
}
