#pragma once

#include <string>
#include <vector>

#include "hallci/beltrami.hpp"
#include "hallci/norms.hpp"
#include "hallci/spectral.hpp"

namespace hallci {

struct IntermittencyParams {
  int lambda = 24;        // wave frequency, multiple of the catalog denominator
  int lambda_sigma = 1;   // lambda * sigma, a positive integer
  int r = 2;              // Dirichlet kernel size
  double mu = 53.0;       // temporal frequency, lambda < mu < lambda^2
  int N0 = 3;

  double sigma() const { return double(lambda_sigma) / lambda; }
  // Temporal angular frequency of the j-th kernel mode is j * omega().
  double omega() const { return double(lambda_sigma) * N0 * mu; }
  // Throws std::invalid_argument naming the violated relation.
  void validate(bool require_mu_window = true) const;
};

// Value and exact time derivative at one instant.
struct FieldJet {
  SpectralField value, rate;
};

// D_r with coefficient (2r+1)^{-3/2} on the cube |k_i| <= r.
SpectralField dirichlet_3d(const Grid& g, int r);

// eta_xi(x, t): kernel mode (j,k,l) sits at lambda sigma N0 (j xi + k A + l xi x A)
// with phase e^{i j omega t}; for xi in Lambda^- the positive partner is used.
FieldJet build_eta(const Grid& g, const Direction& d, const IntermittencyParams& p, double t);
// eta^2 computed on the kernel's own lattice (exact, no padding of the full box).
FieldJet build_eta_squared(const Grid& g, const Direction& d, const IntermittencyParams& p, double t);

// Max coefficient residual of mu^-1 d_t eta -/+ (xi . grad) eta.
double check_transport(const Grid& g, const Direction& d, const IntermittencyParams& p, double t = 0.0);

// Complex single wave a eta_xi B_xi e^{i lambda xi.x} (not conjugate symmetric).
FieldJet intermittent_wave(const Grid& g, const Direction& d, cplx a, const IntermittencyParams& p, double t);
// Real pair a W_xi + conj(a) W_{-xi}.
FieldJet intermittent_pair(const Grid& g, const DirectionSet& ds, std::size_t pair, cplx a,
                           const IntermittencyParams& p, double t);

// Multiply a field by B e^{i lambda xi.x}: per-mode shift, modes leaving the
// band are dropped (the caller decides whether that is an error).
SpectralField shift_times_vector(const SpectralField& scalar, const Direction& d, int lambda,
                                 const std::array<cplx, 3>& vec, bool throw_on_overflow);

// Log-log regression y ~ x^slope.
struct SlopeFit {
  double slope = 0, intercept = 0;
};
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct SweepRow {
  std::string family;     // "D_r" or "W_xi"
  std::string variable;   // "r", "lambda", "mu"
  double p = 2.0;         // exponent of the norm
  std::vector<double> x, norm;
  double slope = 0, predicted = 0;
};

struct SweepSpec {
  std::vector<int> r_values = {2, 4, 8, 16};
  std::vector<double> p_values = {4.0 / 3.0, 2.0, 4.0, kInf};
  int wave_lambda = 18;           // smallest catalog multiple with sigma r < 1 at r = 16
  std::vector<int> lambda_values = {24, 48, 96};
  double lambda_sigma_over_lambda = 1.0 / 24.0;
  int fixed_r = 2;
  double fixed_mu = 100.0;
  std::vector<double> mu_values = {100.0, 200.0, 400.0};
  bool include_wave = true;
};

// Scaling-law sweeps: r-exponents of |D_r|_p and |W_xi|_p (3/2 - 3/p), one
// spatial derivative in lambda (1), one time derivative in mu (1).
std::vector<SweepRow> lp_scaling_sweep(const DirectionSet& ds, const SweepSpec& spec);

}  // namespace hallci
