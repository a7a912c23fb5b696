#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "hallci/spectral.hpp"

namespace hallci {

// Normalization: forward transforms divide by N^3, so c(0) is the mean and
// f(x_j) = sum_k c(k) exp(i k.x_j) with x_j = 2 pi j / N.

// Real N^3 array in row-major (x, y, z) order, SIMD aligned for FFTW.
class RealArray {
 public:
  RealArray() = default;
  explicit RealArray(int N);
  int N() const { return N_; }
  std::size_t size() const { return std::size_t(N_) * N_ * N_; }
  double* data() { return ptr_.get(); }
  const double* data() const { return ptr_.get(); }
  double& operator[](std::size_t i) { return ptr_[i]; }
  double operator[](std::size_t i) const { return ptr_[i]; }

 private:
  struct Free {
    void operator()(double* p) const;
  };
  int N_ = 0;
  std::unique_ptr<double[], Free> ptr_;
};

// Smallest even 2^a 3^b 5^c >= n.
int good_fft_size(int n);

// Per-component physical samples of f on an N^3 grid. N must exceed twice
// the support radius of f.
std::vector<RealArray> to_physical(const SpectralField& f, int N);
RealArray to_physical_component(const SpectralField& f, int c, int N);

// Forward transform of per-component samples; keeps modes with |k_i| <= kout
// (all of them, dense in the band).
SpectralField from_physical(const std::vector<RealArray>& samples, const Grid& g, int kout);

// Samples on the field's own grid (n points per axis) and back. The Nyquist
// planes are dropped by to_spectral, matching kmax = n/2 - 1.
std::vector<std::vector<double>> from_spectral(const SpectralField& f);
SpectralField to_spectral(const Grid& g, const std::vector<std::vector<double>>& samples);

enum class Product {
  Scalar,    // scalar * scalar
  Scale,     // scalar * any
  Dot,       // vector . vector
  Cross,     // vector x vector
  Outer,     // vector (x) vector, 9-layout f_i g_j
  SymOuter,  // f (x) g + g (x) f, 6-layout
};

// Pointwise product on a zero-padded grid N > Kf + Kg + Kout, truncated to
// the grid band. Alias-free whenever the inputs are band-limited.
SpectralField dealiased_product(const SpectralField& f, const SpectralField& g, Product kind);
SpectralField cross(const SpectralField& f, const SpectralField& g);
SpectralField dot(const SpectralField& f, const SpectralField& g);
SpectralField times(const SpectralField& s, const SpectralField& g);

// Pointwise map of a scalar field on its own grid, then back to spectral.
template <class Fn>
SpectralField pointwise(const SpectralField& f, Fn&& fn) {
  auto s = from_spectral(f);
  for (auto& v : s[0]) v = fn(v);
  return to_spectral(f.grid(), {s[0]});
}

// Thread cap for parallel sections (sweeps, slices). 0 means hardware.
void set_thread_cap(int threads);
int thread_cap();

}  // namespace hallci
