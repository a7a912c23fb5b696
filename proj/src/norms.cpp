#include "hallci/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hallci/transform.hpp"

namespace hallci {

namespace {

int key_linf(const SpectralField& f) {
  int m = 0;
  for (std::size_t i = 0; i < f.modes(); ++i) m = std::max(m, f.k(i).linf());
  return m;
}

int quadrature_points(const SpectralField& f, int min_points) {
  return good_fft_size(std::max({3 * key_linf(f) + 1, min_points, 4}));
}

// Pointwise magnitude squared; symmetric off-diagonals count twice.
std::vector<double> magnitude_sq(const SpectralField& f, int N) {
  const std::size_t n3 = std::size_t(N) * N * N;
  std::vector<double> m(n3, 0.0);
  for (int c = 0; c < f.components(); ++c) {
    const RealArray a = to_physical_component(f, c, N);
    const double w = (f.components() == 6 && c >= 3) ? 2.0 : 1.0;
    for (std::size_t p = 0; p < n3; ++p) m[p] += w * a[p] * a[p];
  }
  return m;
}

double lp_from_sq(const std::vector<double>& m2, int N, double p) {
  if (p == kInf) {
    double mx = 0;
    for (double v : m2) mx = std::max(mx, v);
    return std::sqrt(mx);
  }
  if (!(p >= 1.0)) throw std::invalid_argument("unsupported L^p exponent");
  // Kahan-free pairwise-ish accumulation is fine at these sizes.
  long double s = 0;
  const double h = p / 2.0;
  for (double v : m2) s += std::pow(v, h);
  const double cell = kTorusVolume / (double(N) * N * N);
  return std::pow(double(s) * cell, 1.0 / p);
}

}  // namespace

std::map<double, double> lp_norms(const SpectralField& f, const std::vector<double>& ps, int min_points) {
  std::map<double, double> out;
  if (f.empty()) {
    for (double p : ps) out[p] = 0.0;
    return out;
  }
  const int N = quadrature_points(f, min_points);
  const auto m2 = magnitude_sq(f, N);
  for (double p : ps) out[p] = lp_from_sq(m2, N, p);
  return out;
}

double lp_norm(const SpectralField& f, double p, int min_points) { return lp_norms(f, {p}, min_points)[p]; }

double w1p_norm(const SpectralField& f, double p) {
  if (f.components() != 1 && f.components() != 3) throw std::invalid_argument("w1p_norm: scalar or vector only");
  return lp_norm(f, p) + lp_norm(gradient(f), p);
}

namespace {
// All partial derivatives of order exactly `order` of component c.
void derivative_sup(const SpectralField& f, int order, int N, double& sup) {
  if (order == 0) {
    const auto m2 = magnitude_sq(f, N);
    sup = std::max(sup, std::sqrt(*std::max_element(m2.begin(), m2.end())));
    return;
  }
  // Multi-indices with sum == order.
  for (int a = 0; a <= order; ++a)
    for (int b = 0; a + b <= order; ++b) {
      const int c3 = order - a - b;
      const int C = f.components();
      SpectralField d = map_modes(f, C, [=](const Wavevector& k, const cplx* v, cplx* o) {
        const cplx I{0, 1};
        cplx m = std::pow(I * double(k.x), a) * std::pow(I * double(k.y), b) * std::pow(I * double(k.z), c3);
        for (int c = 0; c < C; ++c) o[c] = m * v[c];
      });
      const auto m2 = magnitude_sq(d, N);
      sup = std::max(sup, std::sqrt(*std::max_element(m2.begin(), m2.end())));
    }
}
}  // namespace

double cn_norm(const SpectralField& f, int N) {
  if (f.empty()) return 0.0;
  const int pts = quadrature_points(f, 0);
  double sup = 0;
  for (int order = 0; order <= N; ++order) derivative_sup(f, order, pts, sup);
  return sup;
}

NormReport norms(const SpectralField& f) {
  NormReport r;
  r.lp = lp_norms(f, report_exponents());
  if (f.components() == 1 || f.components() == 3) {
    auto g = lp_norms(gradient(f), report_exponents());
    for (double p : report_exponents()) r.w1p[p] = r.lp[p] + g[p];
  }
  for (int n = 0; n <= 2; ++n) r.cn[n] = cn_norm(f, n);
  return r;
}

NormReport norms(const std::vector<SpectralField>& slices) {
  NormReport out;
  for (const auto& s : slices) {
    NormReport r = norms(s);
    for (auto& [p, v] : r.lp) out.lp[p] = std::max(out.lp[p], v);
    for (auto& [p, v] : r.w1p) out.w1p[p] = std::max(out.w1p[p], v);
    for (auto& [n, v] : r.cn) out.cn[n] = std::max(out.cn[n], v);
  }
  return out;
}

double commutator_check(const SpectralField& a, const SpectralField& f, double kappa, double lambda, int L,
                        double p) {
  if (kappa < lambda) throw std::invalid_argument("commutator_check: kappa < lambda");
  if (a.components() != 1) throw std::invalid_argument("commutator_check: scalar a");
  if (max_abs_coeff(f) == 0) return 0.0;
  double Ca = 0;
  for (int j = 0; j <= L; ++j) {
    double s = 0;
    derivative_sup(a, j, good_fft_size(3 * support_linf(a) + 4), s);
    Ca = std::max(Ca, s / std::pow(lambda, j));
  }
  SpectralField prod = dealiased_product(a, freq_project(f, FreqKind::Geq, kappa),
                                         f.components() == 1 ? Product::Scalar : Product::Scale);
  prod = freq_project(prod, FreqKind::NonZero);
  const double num = lp_norm(abs_grad_inverse(prod), p) * kappa;
  return num / (Ca * lp_norm(f, p));
}

}  // namespace hallci
