#pragma once

#include <string>
#include <vector>

#include "hallci/beltrami.hpp"
#include "hallci/intermittent.hpp"
#include "hallci/spectral.hpp"

namespace hallci {

// curl curl (J x B), J = curl B. Throws std::invalid_argument when div B is
// not zero to 1e-10 (relative to |k| |B|).
SpectralField hall_curl_form(const SpectralField& B);

// div(K (x) B + B (x) K) - Laplacian(J x B) - grad |J|^2/2, K = curl J,
// with div T_i = d_j T_ij and div grad = Laplacian.
SpectralField hall_div_form(const SpectralField& B);

// curl_form - div_form in closed form: K x J + B x curl K - grad |J|^2/2.
SpectralField hall_form_gap(const SpectralField& B);

struct HallForms {
  SpectralField curl_form, div_form;
  double residual = 0;            // |curl_form - div_form|_2
  // Relative to scale = max(|curl_form|_2, |div_form|_2); 0 when both vanish.
  double projected_relative = 0;  // |P_H(curl_form - div_form)|_2
  double gap_residual = 0;        // |curl_form - div_form - hall_form_gap|_2
};
HallForms hall_forms(const SpectralField& B);

struct IdentityResidual {
  std::string name;
  double residual = 0;  // sup over the torus of lhs - rhs
};

// The vector-calculus identities behind the two forms of the nonlinearity.
// A, B vector fields, phi scalar, all real and band-limited.
std::vector<IdentityResidual> vector_identity_suite(const SpectralField& A, const SpectralField& B,
                                                      const SpectralField& phi);

// |div_form(B) - div(J (x) J)|_2 / |div(J (x) J)|_2 for B = lambda^-1 times the
// real wave pair `pair` of ds (unit amplitude), J = curl B. Returns 0 when the
// denominator is below 1e-10 of the natural scale lambda |J|_2^2 / |T^3|^{1/2}
// and the numerator is too; r = 0 gives the pure Beltrami pair. Throws
// BandOverflow unless g holds twice the wave support.
double nse_closeness(const Grid& g, const DirectionSet& ds, std::size_t pair, const IntermittencyParams& p,
                     double amplitude = 1.0);

}  // namespace hallci
