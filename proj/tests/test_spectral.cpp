#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>

#include "hallci/norms.hpp"
#include "hallci/snapshot.hpp"
#include "hallci/transform.hpp"
#include "test_util.hpp"

using namespace hallci;
using hallci::testing::random_field;
using hallci::testing::random_solenoidal;

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(Grid(8), std::invalid_argument);
  EXPECT_THROW(Grid(24), std::invalid_argument);
  EXPECT_EQ(Grid(32).kmax(), 15);
}

TEST(Transform, ConstantFieldHasOnlyMean) {
  Grid g(16);
  std::vector<double> s(16 * 16 * 16, 1.0);
  SpectralField f = to_spectral(g, {s});
  EXPECT_NEAR(f.coeff({0, 0, 0}).real(), 1.0, 1e-15);
  for (std::size_t i = 0; i < f.modes(); ++i)
    if (f.k(i).norm2() != 0) EXPECT_LT(std::abs(f.row(i)[0]), 1e-15);
}

TEST(Transform, PureModeLandsOnOneCoefficient) {
  // cos(x) = (e^{ix} + e^{-ix})/2 so the k=(1,0,0) coefficient is 1/2.
  const int n = 16;
  Grid g(n);
  std::vector<double> s(n * n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n * n; ++j) s[i * n * n + j] = std::cos(2 * kPi * i / n);
  SpectralField f = to_spectral(g, {s});
  EXPECT_NEAR(std::abs(f.coeff({1, 0, 0}) - 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(f.coeff({-1, 0, 0}) - 0.5), 0.0, 1e-15);
  f.prune(1e-14);
  EXPECT_EQ(f.modes(), 2u);
}

TEST(Transform, RoundTrip) {
  Grid g(32);
  SpectralField f = random_field(g, 3, g.kmax(), 7);
  auto s = from_spectral(f);
  SpectralField h = to_spectral(g, s);
  EXPECT_LT(max_abs_coeff(h - f), 1e-12);
  auto s2 = from_spectral(h);
  double err = 0;
  for (int c = 0; c < 3; ++c)
    for (std::size_t p = 0; p < s[c].size(); ++p) err = std::max(err, std::abs(s[c][p] - s2[c][p]));
  EXPECT_LT(err, 1e-12);
  EXPECT_THROW(to_spectral(g, {std::vector<double>(10)}), std::invalid_argument);
}

TEST(Operators, CurlGradDivCurlVanish) {
  Grid g(32);
  SpectralField phi = random_field(g, 1, 8, 1);
  SpectralField A = random_field(g, 3, 8, 2);
  EXPECT_LT(max_abs_coeff(curl(gradient(phi))), 1e-13);
  EXPECT_LT(max_abs_coeff(divergence(curl(A))), 1e-13);
  SpectralField r = curl(curl(A)) - gradient(divergence(A)) + laplacian(A);
  EXPECT_LT(max_abs_coeff(r), 1e-12);
  EXPECT_THROW(curl(phi), std::invalid_argument);
}

TEST(Operators, LerayProjection) {
  Grid g(32);
  SpectralField phi = freq_project(random_field(g, 1, 8, 3), FreqKind::NonZero);
  EXPECT_LT(max_abs_coeff(leray_project(gradient(phi))), 1e-13);
  SpectralField u = random_solenoidal(g, 8, 4);
  EXPECT_LT(max_abs_coeff(leray_project(u) - u), 1e-14);
  SpectralField f = random_field(g, 3, 10, 5);
  EXPECT_LT(max_abs_coeff(divergence(leray_project(f))), 1e-13);
}

TEST(Operators, FrequencyProjection) {
  Grid g(32);
  SpectralField f = random_field(g, 3, 8, 6);
  EXPECT_LT(max_abs_coeff(freq_project(random_field(g, 1, 0, 1), FreqKind::NonZero)), 1e-300);
  SpectralField s = freq_project(f, FreqKind::Geq, 5.0) + freq_project(f, FreqKind::Less, 5.0);
  EXPECT_EQ(max_abs_coeff(s - f), 0.0);
  EXPECT_LE(support_max_norm(freq_project(f, FreqKind::Leq, 4.5)), 4.5);
}

TEST(Operators, InverseCurl) {
  Grid g(32);
  SpectralField v = freq_project(random_solenoidal(g, 8, 8), FreqKind::NonZero);
  SpectralField f = curl(v);
  SpectralField h = inverse_curl(f);
  EXPECT_LT(max_abs_coeff(curl(h) - f), 1e-12);
  EXPECT_LT(max_abs_coeff(h - v), 1e-12);
  EXPECT_LT(max_abs_coeff(divergence(h)), 1e-13);
  EXPECT_EQ(max_abs_coeff(inverse_curl(SpectralField(g, 3))), 0.0);
  EXPECT_THROW(inverse_curl(random_field(g, 3, 4, 9)), std::invalid_argument);
}

TEST(Operators, AntiDivergenceProperty) {
  Grid g(32);
  SpectralField f = random_field(g, 3, 10, 10);
  SpectralField R = anti_divergence(f);
  ASSERT_EQ(R.components(), 6);
  SpectralField mf = f - freq_project(f, FreqKind::Leq, 0.5);
  EXPECT_LT(max_abs_coeff(divergence(R) - mf), 1e-12);
  EXPECT_LT(max_abs_coeff(trace(R)), 1e-14);
  std::vector<double> c = {1.0, -2.0, 0.5};
  EXPECT_EQ(max_abs_coeff(anti_divergence(SpectralField::constant(g, c))), 0.0);
}

TEST(Operators, AntiDivergenceSingleModeHandFormula) {
  // k = (1,0,0), v = (a, b, 0): u = -v, Pu = (0,-b,0), div u = -i a.
  // R_xx = 3/4 * 2 i (-a) + 1/2 i a = -i a
  // R_yy = R_zz = 1/2 i a
  // R_xy = 1/4 i (-b) + 3/4 i (-b) = -i b,   R_xz = R_yz = 0
  Grid g(16);
  const cplx a(0.3, -0.7), b(1.1, 0.2), I(0, 1);
  SpectralField f(g, 3);
  f.push({1, 0, 0}, {a, b, 0.0});
  f.push({-1, 0, 0}, {std::conj(a), std::conj(b), 0.0});
  f.finalize();
  SpectralField R = anti_divergence(f);
  const cplx* r = R.find({1, 0, 0});
  ASSERT_NE(r, nullptr);
  EXPECT_LT(std::abs(r[0] - (-I * a)), 1e-15);
  EXPECT_LT(std::abs(r[1] - (0.5 * I * a)), 1e-15);
  EXPECT_LT(std::abs(r[2] - (0.5 * I * a)), 1e-15);
  EXPECT_LT(std::abs(r[3] - (-I * b)), 1e-15);
  EXPECT_LT(std::abs(r[4]), 1e-15);
  EXPECT_LT(std::abs(r[5]), 1e-15);
}

TEST(Operators, ConjugateSymmetryPreserved) {
  Grid g(32);
  SpectralField f = random_field(g, 3, 8, 11);
  for (const SpectralField& h : {curl(f), leray_project(f), laplacian(f), anti_divergence(f),
                                 inverse_curl(freq_project(curl(f), FreqKind::NonZero))}) {
    EXPECT_LT(conjugate_symmetry_defect(h), 1e-14);
  }
}

TEST(Product, PureModes) {
  Grid g(16);
  SpectralField a(g, 1), b(g, 1);
  a.push({1, 0, 0}, {0.5});
  a.push({-1, 0, 0}, {0.5});
  a.finalize();
  b.push({2, 0, 0}, {0.5});
  b.push({-2, 0, 0}, {0.5});
  b.finalize();
  SpectralField p = dealiased_product(a, b, Product::Scalar);
  // cos x cos 2x = (cos 3x + cos x)/2
  EXPECT_NEAR(p.coeff({3, 0, 0}).real(), 0.25, 1e-15);
  EXPECT_NEAR(p.coeff({1, 0, 0}).real(), 0.25, 1e-15);
  p.prune(1e-14);
  EXPECT_EQ(p.modes(), 4u);
}

TEST(Product, IdentityElement) {
  Grid g(32);
  SpectralField f = random_field(g, 3, 9, 12);
  std::vector<double> one = {1.0};
  EXPECT_LT(max_abs_coeff(times(SpectralField::constant(g, one), f) - f), 1e-15);
}

TEST(Product, AliasFreeAgainstFinerGrid) {
  Grid g(32), fine(64);
  SpectralField f = random_field(g, 3, 7, 13), h = random_field(g, 3, 7, 14);
  SpectralField p = cross(f, h);
  // Same inputs on a grid with twice the band.
  SpectralField ff(fine, 3), hf(fine, 3);
  for (std::size_t i = 0; i < f.modes(); ++i) ff.push(f.k(i), f.row(i));
  for (std::size_t i = 0; i < h.modes(); ++i) hf.push(h.k(i), h.row(i));
  ff.finalize();
  hf.finalize();
  SpectralField pf = cross(ff, hf);
  double err = 0;
  for (std::size_t i = 0; i < pf.modes(); ++i)
    for (int c = 0; c < 3; ++c) err = std::max(err, std::abs(pf.row(i)[c] - p.coeff(pf.k(i), c)));
  EXPECT_LT(err, 1e-12);
}

TEST(Product, HolderTrendForSeparatedFrequencies) {
  // f low frequency, g at frequency k: |fg|_2 <= |f|_inf |g|_2 and, once
  // the scales separate, the ratio approaches |f|_2 / |T^3|^{1/2}.
  Grid g(64);
  SpectralField f = random_field(g, 1, 2, 15);
  std::vector<double> ratios;
  for (int k : {8, 16, 24}) {
    SpectralField h(g, 1);
    h.push({k, 0, 0}, {0.5});
    h.push({-k, 0, 0}, {0.5});
    h.finalize();
    SpectralField p = dealiased_product(f, h, Product::Scalar);
    const double r = l2_norm(p) / (lp_norm(f, kInf) * l2_norm(h));
    EXPECT_LE(r, 1.0 + 1e-12);
    EXPECT_GT(r, 0.1);
    ratios.push_back(r);
  }
  EXPECT_NEAR(ratios[1], ratios[2], 1e-12);
}

TEST(Norms, ConstantField) {
  Grid g(16);
  std::vector<double> one = {1.0};
  SpectralField f = SpectralField::constant(g, one);
  for (double p : report_exponents()) {
    const double expect = p == kInf ? 1.0 : std::pow(kTorusVolume, 1.0 / p);
    EXPECT_NEAR(lp_norm(f, p), expect, 1e-12 * expect);
  }
}

TEST(Norms, ParsevalMatchesQuadrature) {
  Grid g(32);
  SpectralField f = random_field(g, 3, 10, 16);
  EXPECT_NEAR(lp_norm(f, 2.0) / l2_norm(f), 1.0, 1e-10);
  SpectralField t = anti_divergence(f);
  EXPECT_NEAR(lp_norm(t, 2.0) / l2_norm(t), 1.0, 1e-10);
}

TEST(Norms, MonotoneOnNormalizedMeasure) {
  Grid g(32);
  SpectralField f = random_field(g, 3, 6, 17);
  NormReport r = norms(f);
  double prev = 0;
  for (auto [p, v] : r.lp) {
    const double normalized = p == kInf ? v : v / std::pow(kTorusVolume, 1.0 / p);
    EXPECT_GE(normalized, prev * (1 - 1e-12));
    prev = normalized;
  }
  EXPECT_GE(r.cn[1], r.cn[0]);
  EXPECT_GE(r.cn[2], r.cn[1]);
  EXPECT_NEAR(r.cn[0], r.lp[kInf], 1e-12);
}

TEST(Norms, CommutatorBoundedAcrossKappa) {
  Grid g(128);
  SpectralField a(g, 1);
  a.push({0, 0, 0}, {1.0});
  a.push({2, 0, 0}, {0.3});
  a.push({-2, 0, 0}, {0.3});
  a.finalize();
  std::vector<double> ratios;
  for (int kappa : {8, 16, 32}) {
    SpectralField f(g, 1);
    f.push({kappa, 1, 0}, {0.5});
    f.push({-kappa, -1, 0}, {0.5});
    f.finalize();
    ratios.push_back(commutator_check(a, f, kappa, 2.0, 2));
  }
  for (double r : ratios) EXPECT_LT(r, 2.0);
  EXPECT_THROW(commutator_check(a, a, 1.0, 2.0, 1), std::invalid_argument);
  // Constant amplitude: the multiplier bound gives a ratio <= 1.
  std::vector<double> one = {1.0};
  SpectralField f = random_field(g, 1, 12, 18);
  EXPECT_LE(commutator_check(SpectralField::constant(g, one), f, 4.0, 1.0, 1), 1.0 + 1e-12);
  EXPECT_EQ(commutator_check(a, SpectralField(g, 1), 8.0, 2.0, 1), 0.0);
}

TEST(Snapshot, RoundTripIsBitExact) {
  Grid g(16);
  SpectralField f = random_field(g, 3, 5, 19);
  const std::string path = ::testing::TempDir() + "snap.bin";
  write_snapshot(path, f);
  SpectralField h = read_snapshot(path);
  ASSERT_EQ(h.modes(), f.modes());
  EXPECT_EQ(h.keys(), f.keys());
  EXPECT_EQ(h.data(), f.data());
  std::remove(path.c_str());
}
