#pragma once

#include <vector>

#include "hallci/beltrami.hpp"
#include "hallci/intermittent.hpp"
#include "hallci/spectral.hpp"

namespace hallci {

// Smooth monotone step: 0 for z <= 2, 1 for z >= 4 (exp(-1/x) blend).
double smooth_step(double z);
// chi0~ = sqrt(1 - s(z)), supported on [0, 4].
double chi0_tilde(double z);
// chi~(y) = s(4y) - s(y), supported on [1/2, 4].
double chi_tilde(double y);
// chi~_i(z) = chi~(4^-i z); i >= 1.
double chi_tilde_i(int i, double z);
// max |chi0~^2 + sum_i chi~_i - 1| over z.
double partition_residual(const std::vector<double>& z);

struct CutoffConfig {
  double delta_next = 1.0;  // delta_{q+1}
  double lambda_q = 12.0;   // enters through lambda_q^{-eps_R}
  double eps_R = 0.05;
  int c0 = 7;
  double ell = 0.05;
  int max_index = 40;
  double scale() const;     // 100 lambda_q^{-eps_R} delta_{q+1}
  double rho_i(int i) const;
};

// Sampled cutoffs chi_i(x) = chi~_i(<R/scale>) on the grid of R, with
// <A> = (1 + |A|_F^2)^{1/2}. A constant R keeps one sample per field.
struct CutoffPartition {
  Grid grid;
  CutoffConfig config;
  bool uniform = false;
  std::vector<std::vector<double>> R;     // 6 components, physical samples
  std::vector<std::vector<double>> chi;   // chi[i], i = 0..imax
  std::vector<double> rho;                // rho[i], rho[0] is set per time slice
  std::vector<double> mean_chi_sq;        // volume average of chi_i^2
  std::vector<double> l1;                 // |chi_i|_{L^1}
  int imax = 0;
  bool imax_within_bound = true;          // 4^imax <= 4 / ell

  std::size_t points() const { return uniform ? 1 : std::size_t(grid.n()) * grid.n() * grid.n(); }
};

CutoffPartition build_cutoffs(const SpectralField& R, const CutoffConfig& cfg);
CutoffPartition build_cutoffs_zero(const Grid& g, const CutoffConfig& cfg);

// rho = (1/3) (avg chi0^2)^-1 max(E - avg|J|^2 - 3 sum_i rho_i avg chi_i^2 - delta/2, 0)
double pumping_rho(double E, double mean_J_sq, const CutoffPartition& cp, double delta_next);

struct Rho0Result {
  std::vector<double> rho, rho0;
  double bound = 0;   // 2 delta_{q+1}
  bool within_bound = true;
};
// rho at each slice, then rho0 = ((rho^{1/2}) * phi_ell)^2 in time. The
// slice values are interpolated with a barycentric rational interpolant and
// extended by constants outside [t_0, t_K].
Rho0Result build_rho0(const std::vector<double>& times, const std::vector<double>& E,
                      const std::vector<double>& mean_J_sq, const std::vector<const CutoffPartition*>& cutoffs,
                      double delta_next, double ell);
double mollify_in_time(const std::vector<double>& times, const std::vector<double>& f, double t, double ell);

struct AmplitudeEntry {
  int i = 0;             // cutoff index
  int family = 0;
  std::size_t pair = 0;  // pair within the family
  SpectralField a;       // real scalar, band limited
};

struct AmplitudeSet {
  std::vector<AmplitudeEntry> entries;
  std::vector<double> rho;        // rho_0 (this slice), rho_1, ...
  std::size_t ball_violations = 0;  // points with chi_i > 1e-6 outside the eps_gamma ball
  std::size_t active_points = 0;
  double worst_ball_ratio = 0;    // max |R/rho_i|_F / eps_gamma on active points
  double energy_identity_residual = 0;  // on unclamped samples
};

struct AmplitudeConfig {
  double amp_band = 2.0;  // |k| cutoff of the sampled amplitudes
};

// a_{xi,i} = rho_i^{1/2} chi_i gamma_xi(Id - R/rho_i), family i % 2. Arguments
// outside the eps_gamma ball are pulled radially onto it and counted.
AmplitudeSet build_amplitudes(const CutoffPartition& cp, double rho0, const std::vector<DirectionSet>& families,
                              const AmplitudeConfig& cfg);

struct Increment {
  double lambda = 0, mu = 0;
  FieldJet U;  // sum a eta W, so v^p = U / lambda
  FieldJet v_p, v_c, v_t, w_p, w_c, w_t;
  SpectralField W_eps1;  // lambda v^c, built per mode from grad(a eta) x B

  FieldJet v() const;
  FieldJet w() const;
};

Increment build_increment(const Grid& g, const AmplitudeSet& amps, const std::vector<DirectionSet>& families,
                          const IntermittencyParams& p, double t);

struct IncrementChecks {
  double div_vpc = 0;       // max coeff |div(v^p + v^c)|
  double div_v = 0, div_w = 0;
  double curl_v_minus_w = 0;  // relative to max coeff of w
  double wp_curl = 0, wc_curl = 0, wt_curl = 0;
  double lambda_vp = 0;      // |lambda v^p - (w^p - W_eps1)|, all coefficient maxima
  double curl_wp = 0;        // |curl w^p - (lambda w^p + curl W_eps1)|
};
IncrementChecks check_increment(const Increment& inc);

struct IncrementNorms {
  double wp_l2 = 0, wc_l2 = 0, wt_l2 = 0, vp_l2 = 0, w_l2 = 0, v_l2 = 0;
  double wp_over_delta = 0;    // |w^p|_2 / delta^{1/2}
  double wc_over_wp = 0, wt_over_wp = 0;
  double lambda_vp_over_wp = 0;
  double weps_over_wp = 0;
};
IncrementNorms increment_norm_suite(const Increment& inc, double delta_next);

}  // namespace hallci
