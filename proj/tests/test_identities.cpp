#include <gtest/gtest.h>

#include "hallci/identities.hpp"
#include "hallci/norms.hpp"
#include "hallci/transform.hpp"
#include "test_util.hpp"

using namespace hallci;
using hallci::testing::random_field;
using hallci::testing::random_solenoidal;

TEST(Identities, VectorSuiteRandom) {
  const Grid g(32);
  for (unsigned s = 0; s < 50; ++s) {
    const auto A = random_field(g, 3, 4, 100 + s);
    const auto B = random_field(g, 3, 4, 200 + s);
    const auto phi = random_field(g, 1, 4, 300 + s);
    for (const auto& r : vector_identity_suite(A, B, phi)) EXPECT_LT(r.residual, 1e-10) << r.name << " seed " << s;
  }
}

TEST(Identities, VectorSuiteTrivialCases) {
  const Grid g(16);
  const auto A = random_field(g, 3, 3, 1);
  EXPECT_EQ(max_abs_coeff(divergence(cross(A, A))), 0.0);
  const double one[1] = {1.0};
  const auto phi = SpectralField::constant(g, one);
  EXPECT_LT(max_abs_coeff(curl(times(phi, A)) - curl(A)), 1e-15);
}

TEST(Identities, HallFormsVanishOnConstant) {
  const Grid g(16);
  const double c[3] = {0.3, -1.0, 2.0};
  const auto B = SpectralField::constant(g, c);
  EXPECT_EQ(max_abs_coeff(hall_curl_form(B)), 0.0);
  EXPECT_EQ(max_abs_coeff(hall_div_form(B)), 0.0);
}

TEST(Identities, HallFormsRejectCompressible) {
  const Grid g(16);
  const auto B = random_field(g, 3, 3, 9);
  EXPECT_THROW(hall_curl_form(B), std::invalid_argument);
  EXPECT_THROW(hall_div_form(B), std::invalid_argument);
}

TEST(Identities, HallFormsOnBeltrami) {
  // Stationary Beltrami field: curl form vanishes, div form is a gradient.
  const Grid g(32);
  const auto ds = build_direction_sets(1)[0];
  GammaSolver gs(ds);
  const auto gamma = gs.gamma(Mat3::Identity());
  std::vector<cplx> a(gamma.begin(), gamma.end());
  const SpectralField W = beltrami_wave(g, ds, a, 3);
  const HallForms h = hall_forms(W);
  EXPECT_LT(l2_norm(leray_project(h.curl_form)), 1e-10);
  EXPECT_LT(l2_norm(leray_project(h.div_form)), 1e-10 * l2_norm(h.div_form));
  EXPECT_LT(h.gap_residual, 1e-12);
}

TEST(Identities, HallFormsSingleMode) {
  // One +/- mode pair: the forms agree modulo gradients, linear or elliptic
  // polarization.
  const Grid g(16);
  const cplx ph = std::polar(1.0, 0.7);
  SpectralField B(g, 3);
  B.push({1, 2, 0}, {0.4 * ph, -0.2 * ph, 0.7 * ph});
  B.push({-1, -2, 0}, {0.4 * std::conj(ph), -0.2 * std::conj(ph), 0.7 * std::conj(ph)});
  B.finalize();
  EXPECT_LT(hall_forms(B).projected_relative, 1e-10);
  SpectralField E(g, 3);
  E.push({1, 2, 0}, {cplx(0.4, 0.1), cplx(-0.2, -0.05), cplx(0.7, -0.3)});
  E.push({-1, -2, 0}, {cplx(0.4, -0.1), cplx(-0.2, 0.05), cplx(0.7, 0.3)});
  E.finalize();
  const HallForms h = hall_forms(E);
  EXPECT_LT(h.projected_relative, 1e-10);
  EXPECT_LT(h.gap_residual, 1e-13);
}

TEST(Identities, HallFormGapRandom) {
  // Generic solenoidal B: curl - div equals the closed-form gap.
  const Grid g(32);
  for (unsigned s = 0; s < 5; ++s) {
    const auto B = random_solenoidal(g, 4, 40 + s);
    const HallForms h = hall_forms(B);
    EXPECT_LT(h.gap_residual, 1e-12);
  }
}

TEST(Identities, NseClosenessPureBeltrami) {
  const auto ds = build_direction_sets(1)[0];
  IntermittencyParams p;
  p.lambda = 12;
  p.r = 0;
  EXPECT_LT(nse_closeness(Grid(64), ds, 0, p), 1e-10);
  p.r = 2;
  EXPECT_EQ(nse_closeness(Grid(128), ds, 0, p, 0.0), 0.0);
  EXPECT_THROW(nse_closeness(Grid(64), ds, 0, p), BandOverflow);
}

TEST(Identities, NseClosenessUnderSigmaRHalving) {
  // Halving sigma r moves the ratio by a factor in [1/4, 1].
  const auto ds = build_direction_sets(1)[0];
  IntermittencyParams p;
  p.lambda = 12;
  p.lambda_sigma = 1;
  p.r = 2;
  const double big = nse_closeness(Grid(128), ds, 0, p);
  p.r = 1;
  const double small = nse_closeness(Grid(128), ds, 0, p);
  EXPECT_GT(small / big, 0.25);
  EXPECT_LT(small / big, 1.0);
}
