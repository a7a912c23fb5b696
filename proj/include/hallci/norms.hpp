#pragma once

#include <limits>
#include <map>
#include <vector>

#include "hallci/spectral.hpp"

namespace hallci {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Supported Lebesgue exponents (kInf for the sup norm). Other p in (1, inf)
// are accepted by lp_norm but not listed in reports.
inline const std::vector<double>& report_exponents() {
  static const std::vector<double> ps = {1.0, 4.0 / 3.0, 1.5, 2.0, 3.0, 4.0, kInf};
  return ps;
}

struct NormReport {
  std::map<double, double> lp;   // p -> |f|_{L^p}
  std::map<double, double> w1p;  // p -> |f|_{L^p} + |grad f|_{L^p}
  std::map<int, double> cn;      // N -> max over |alpha| <= N of sup |d^alpha f|
};

// L^p on the 2pi torus (unnormalized measure), pointwise magnitude is the
// Euclidean / Frobenius norm across components. Quadrature: trapezoid rule
// on the padded grid N = good_fft_size(max(3K+1, min_points)), K the support
// radius; exact for p = 2 and spectrally accurate for smooth |f|^p.
double lp_norm(const SpectralField& f, double p, int min_points = 0);
// Several exponents from a single set of samples.
std::map<double, double> lp_norms(const SpectralField& f, const std::vector<double>& ps, int min_points = 0);

double w1p_norm(const SpectralField& f, double p);
double cn_norm(const SpectralField& f, int N);

NormReport norms(const SpectralField& f);
// Time slices: each entry is the sup over slices.
NormReport norms(const std::vector<SpectralField>& slices);

// Lemma-style commutator ratio |(|grad|^-1 (a P_{>=kappa} f))|_p kappa / (C_a |f|_p)
// with C_a = max_j sup|D^j a| / lambda^j for j = 0..L. kappa < lambda rejected.
double commutator_check(const SpectralField& a, const SpectralField& f, double kappa, double lambda, int L,
                        double p = 2.0);

}  // namespace hallci
