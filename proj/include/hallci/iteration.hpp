#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hallci/intermittent.hpp"
#include "hallci/perturbation.hpp"
#include "hallci/spectral.hpp"
#include "hallci/stress.hpp"

namespace hallci {

// Exact schedule: lambda_q = a^(b^q), delta_q = lambda_1^{3 beta} lambda_q^{-2 beta},
// r = lambda_{q+1}^{3/4}, sigma = lambda_q^{-15/16}, mu = lambda_{q+1}^{5/4},
// ell = lambda_q^{-20}. Values overflow to inf for large a, b; the log10
// fields stay finite.
struct LevelParameters {
  int q = 0;
  double lambda = 0, lambda_next = 0, delta = 0;
  double r = 0, sigma = 0, mu = 0, ell = 0;
  double log10_lambda = 0, log10_delta = 0;
};
LevelParameters schedule(double a, double b, double beta, int q);

// Desk levels: level q+1 is built with waves[q]. delta_q comes from the exact
// formula with a = lambda0 and b = log lambda_1 / log lambda0.
struct DeskSchedule {
  double lambda0 = 12;
  double beta = 0.01;
  double eps_R = 0.05;
  int c0 = 7;
  double ell = 0.05;
  std::vector<IntermittencyParams> waves;
  std::vector<double> amp_band;  // per level, defaults to 2

  double a() const { return lambda0; }
  double b() const;
  double lambda(int q) const;  // desk value: lambda0, then waves[q-1].lambda
  double delta(int q) const;   // formula value, q >= 1
  double band(int q) const;    // amplitude band of level q+1
  void validate() const;       // throws std::invalid_argument
};

// Named presets "hall", "hall-small", "hmhd", "pump"; preset_grid gives the
// grid each one was sized for.
DeskSchedule desk_preset(const std::string& name);
int preset_grid(const std::string& name);

// Nonnegative energy profile from samples, interpolated with a barycentric
// rational interpolant and held constant outside the sample range.
class EnergyProfile {
 public:
  EnergyProfile() = default;
  static EnergyProfile constant(double E, double T);
  static EnergyProfile from_samples(std::vector<double> t, std::vector<double> E);
  // Plain text, one "t E" pair per line, '#' starts a comment. Throws
  // std::runtime_error when the file cannot be read or parsed.
  static EnergyProfile load(const std::string& path);

  double operator()(double t) const;
  double horizon() const { return times_.empty() ? 0.0 : times_.back(); }
  // max |E_{k+1} - 2 E_k + E_{k-1}| over the samples (smoothness proxy).
  double max_second_difference() const;
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> times_, values_;
  std::shared_ptr<const std::function<double(double)>> interp_;
};

struct Tolerances {
  double curl_consistency = 1e-10;  // |curl B - J| coefficient max, relative
  double divergence = 1e-10;        // div B, div u coefficient max
  double reassembly = 1e-8;
  double dual_route = 1e-10;
  double nse_balance = 1e-6;
  double gap_slack = 0.25;          // soft window slack
};

struct HallConfig {
  int n = 64;
  DeskSchedule schedule;
  std::vector<double> slices = {0.0, 0.02};
  double p_near_one = 1.05;
  double zeta = 1.0;  // only 1 is supported
  Tolerances tol;
};

struct SliceReport {
  double t = 0, E = 0;
  double mean_J_sq_before = 0, mean_J_sq_after = 0;
  double gap_before = 0, gap_after = 0;
  std::string branch;        // "pump" or "rest" (gap <= delta_{q+1} / 100)
  double window = 0;         // |gap_after - delta_{q+2}/2| / (delta_{q+2}/4)
  double rho = 0, rho0 = 0;
  int imax = 0;
  std::size_t ball_violations = 0, active_points = 0;
  double worst_ball_ratio = 0, energy_identity_residual = 0;
  IncrementNorms inc;
  double C_w = 0, C_v = 0;   // |w|_2, lambda |v|_2 over (|T^3| delta_{q+1})^{1/2}
  double stress_lp = 0, stress_l2 = 0;
  double reassembly = 0, dual_route = 0;
  double rcorr_literal = -1, rcorr_corrected = -1;
  double lambda_vp = 0, curl_wp = 0, mean_cancellation = -1;
  double curl_consistency = 0, div_B = 0;
  std::vector<PartNorm> parts;
};

struct LevelReport {
  int level = 0;  // q + 1
  int lambda = 0, lambda_sigma = 0, r = 0;
  double mu = 0, delta = 0, delta_next = 0;  // delta_{q+1}, delta_{q+2}
  bool rho0_within_bound = true;
  std::vector<SliceReport> slices;
  std::vector<std::string> failures, degraded;
  double seconds = 0;
};

struct SliceState {
  double t = 0;
  FieldJet B, J;
  SpectralField R;
};

struct HallRun {
  std::vector<LevelReport> levels;
  std::vector<SliceState> state;
  std::vector<double> w_partial_sums;      // sum over levels of max_t |w_{q+1}|_2
  std::vector<double> delta_partial_sums;  // sum of (|T^3| delta_{q+1})^{1/2}
  bool failed = false, degraded = false;
};

HallRun start_hall(const HallConfig& cfg);
// One level on every time slice. Errors carry the level in their message.
void hall_step(HallRun& run, const EnergyProfile& E, const HallConfig& cfg);
HallRun run_hall(const EnergyProfile& E, int Q, const HallConfig& cfg);

// Implicit-midpoint Galerkin solver in rotational form:
//   du/dt = P_H(u x omega) + Lap u + P_H div(B (x) B).
struct NseConfig {
  double dt = 0.002;
  double T = 0.04;
  double cfl = 0.5;        // dt sup|u| kmax must stay below this
  double blowup = 1e6;     // |u|_2 above this aborts
  double fp_tol = 1e-13;   // fixed-point relative tolerance
  int fp_max = 200;
};

class NseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NseResult {
  SpectralField u, p;  // at T
  std::vector<double> times, energy;  // energy = |u|_2^2 / 2
  double max_balance = 0;  // relative per-step energy-balance residual
  double max_div = 0;
  double max_cfl = 0;
  double force_integral = 0;  // int_0^T |P_H div(B (x) B)|_2 dt
  int steps = 0, max_iterations = 0;
};

using MagneticTrajectory = std::function<SpectralField(double)>;
NseResult nse_solve(const Grid& g, const MagneticTrajectory& B, const SpectralField& u0, const NseConfig& cfg);

struct HmhdConfig {
  HallConfig hall;
  NseConfig nse;
};

struct HmhdLevelReport {
  LevelReport hall;  // slices t = 0 and t = T
  double nse_balance = 0, nse_div = 0, nse_cfl = 0;
  int nse_steps = 0;
  double u_l2 = 0, z_l2 = 0;
  double M_lp = 0, M_l2 = 0;
  double holder_bound = 0;       // |v|_s |u_{q+1}|_2 + |B_q|_s |z|_2, 1/p = 1/s + 1/2
  double reassembly_full = 0;    // P_H div R^s vs residual + curl curl (B x u)
};

struct HmhdRun {
  std::vector<HmhdLevelReport> levels;
  // Amplitude frames and wave parameters of every level, so B_q(t) can be
  // evaluated at any t.
  std::vector<std::pair<AmplitudeSet, IntermittencyParams>> frames;
  SliceState at0, atT;  // R holds R^s
  SpectralField u;      // u_q(T)
  bool failed = false, degraded = false;
};

HmhdRun start_hmhd(const HmhdConfig& cfg);
void hmhd_step(HmhdRun& run, const EnergyProfile& E, const HmhdConfig& cfg);
HmhdRun run_hmhd(const EnergyProfile& E, int Q, const HmhdConfig& cfg);
SpectralField magnetic_field(const HmhdRun& run, const Grid& g, double t);

struct EnergyRow {
  int level = 0;
  double t = 0, E = 0, gap = 0, delta = 0, delta_next = 0, rho0 = 0;
  std::string branch;
  bool in_range = true;  // gap in [-slack delta_{q+1}, (1+slack) delta_{q+1}]
  bool window_ok = true;  // window <= 1 + slack
  bool nonnegative = true;
};
std::vector<EnergyRow> energy_report(const std::vector<LevelReport>& levels, double slack);

// The shared direction families (two disjoint 6-pair sets).
const std::vector<DirectionSet>& direction_families();

}  // namespace hallci
