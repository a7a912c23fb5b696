#pragma once

#include <string>
#include <vector>

#include "hallci/intermittent.hpp"
#include "hallci/perturbation.hpp"
#include "hallci/spectral.hpp"

namespace hallci {

enum class HallForm { Curl, Div };

// d_t J + N(B, J) - Lap J with N = curl curl (J x B) (or the divergence
// form). Throws std::invalid_argument when J != curl B.
SpectralField residual_of_level(const FieldJet& B, const FieldJet& J, HallForm form = HallForm::Curl);

// Symmetric traceless part of a 6-layout tensor.
SpectralField traceless(const SpectralField& T);
// R(P_H f): anti-divergence after dropping the gradient part.
SpectralField solenoidal_anti_divergence(const SpectralField& f);

struct PartNorm {
  std::string name;
  double lp = 0, l2 = 0;
};

struct LinearPart {
  SpectralField vec;     // d_t(w^p + w^c) - Lap w + curl curl (J_q x v + w x B_q)
  SpectralField tensor;  // R(P_H vec)
  double dual_route = 0;  // |d_t(w^p + w^c) - lambda^-1 curl d_t w^p| / |d_t w^p|
};
LinearPart linear_part(const Increment& inc, const SpectralField& B_q, const SpectralField& J_q);

struct CorrectorPart {
  SpectralField M1, M2, p_tilde;  // w x v^t, w x v^c + (w^c + w^t) x v^p, w . w^t
  SpectralField vec;              // curl curl (M1 + M2)
  SpectralField tensor;
  // Regrouped tensors from the corrector display, kept for their norms.
  SpectralField R_cor1, R_cor2, R_cor3;
  double rcorr_literal = -1;    // relative residual of the regrouping identity as displayed
  double rcorr_corrected = -1;  // same with -(K x w^t + v^t x curl K), K = curl w
};
CorrectorPart corrector_part(const Increment& inc, bool regrouped_parts = true);

struct OscillationPart {
  SpectralField vpvp;     // lambda^2 v^p (x) v^p, 6-layout
  SpectralField R_bv;     // vpvp + R_q + R d_t w^t
  SpectralField D;        // R P_H (curl curl (w^p x v^p) - div vpvp)
  SpectralField vec;      // curl curl (w^p x v^p) + d_t w^t
  double mean_cancellation = -1;  // |mean vpvp - sum a^2 (Id - xi xi)| / |target|
  double lambda_vp = 0, curl_wp = 0;  // W_eps1 bookkeeping residuals
};
OscillationPart oscillation_part(const Increment& inc, const SpectralField& R_q, const AmplitudeSet* amps = nullptr,
                                 const std::vector<DirectionSet>* families = nullptr);

struct StressDecomposition {
  LinearPart linear;
  CorrectorPart corrector;
  OscillationPart oscillation;
  SpectralField total;  // traceless R_{q+1}
  std::vector<PartNorm> norms;
  double reassembly = 0;  // |P_H div R - P_H (residual + extra)| / |P_H (residual + extra)|
};

struct AssembleOptions {
  double p_near_one = 1.05;
  bool norms = true;
  double tolerance = 1e-8;  // reassembly above this throws
  bool throw_on_mismatch = true;
};

// Sums the parts, removes the trace and checks the master identity against
// residual_of_level(B_{q+1}, J_{q+1}) + extra. `extra` may be empty.
StressDecomposition assemble(const FieldJet& B_next, const FieldJet& J_next, LinearPart lin, CorrectorPart cor,
                             OscillationPart osc, const SpectralField& extra, const AssembleOptions& opt);

}  // namespace hallci
