#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hallci {

using cplx = std::complex<double>;
using Key = std::int64_t;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTorusVolume = 8.0 * kPi * kPi * kPi;

class BandOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Wavevector {
  int x = 0, y = 0, z = 0;
  double norm2() const { return double(x) * x + double(y) * y + double(z) * z; }
  int linf() const;
  Wavevector operator-() const { return {-x, -y, -z}; }
  Wavevector operator+(const Wavevector& o) const { return {x + o.x, y + o.y, z + o.z}; }
  bool operator==(const Wavevector&) const = default;
};

// 21 bits per axis, so key order is lexicographic (kx, ky, kz).
inline constexpr int kKeyOffset = 1 << 20;
inline Key pack(const Wavevector& k) {
  return (Key(k.x + kKeyOffset) << 42) | (Key(k.y + kKeyOffset) << 21) | Key(k.z + kKeyOffset);
}
inline Wavevector unpack(Key key) {
  constexpr Key mask = (Key(1) << 21) - 1;
  return {int((key >> 42) & mask) - kKeyOffset, int((key >> 21) & mask) - kKeyOffset,
          int(key & mask) - kKeyOffset};
}

// Periodic box [0, 2pi)^3 sampled with n points per axis.
class Grid {
 public:
  Grid() = default;
  explicit Grid(int n);
  int n() const { return n_; }
  int kmax() const { return n_ / 2 - 1; }
  bool contains(const Wavevector& k) const { return k.linf() <= kmax(); }
  bool operator==(const Grid&) const = default;

 private:
  int n_ = 16;
};

// Real field stored as a sparse list of Fourier coefficients. Both k and -k
// are kept. Keys are sorted; each key owns `components` consecutive values.
// Component layouts: 1 scalar, 3 vector, 6 symmetric tensor
// (xx, yy, zz, xy, xz, yz), 9 general tensor (row-major).
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(const Grid& g, int components);

  static SpectralField constant(const Grid& g, std::span<const double> value);
  static SpectralField zeros_like(const SpectralField& f, int components = 0);

  const Grid& grid() const { return grid_; }
  int components() const { return comps_; }
  std::size_t modes() const { return keys_.size(); }
  bool empty() const { return keys_.empty(); }

  const std::vector<Key>& keys() const { return keys_; }
  Wavevector k(std::size_t i) const { return unpack(keys_[i]); }
  cplx* row(std::size_t i) { return data_.data() + i * comps_; }
  const cplx* row(std::size_t i) const { return data_.data() + i * comps_; }
  std::vector<cplx>& data() { return data_; }
  const std::vector<cplx>& data() const { return data_; }

  // nullptr when k is not stored.
  const cplx* find(const Wavevector& k) const;
  cplx coeff(const Wavevector& k, int c = 0) const;

  // Unsorted append; finalize() sorts and sums duplicates. Throws
  // BandOverflow when k lies outside the grid band.
  void push(const Wavevector& k, const cplx* v);
  void push(const Wavevector& k, std::initializer_list<cplx> v);
  void finalize();
  void reserve(std::size_t modes);
  // Direct append in increasing key order (no checks beyond ordering).
  void append_sorted(Key key, const cplx* v);

  // Drops modes whose coefficients are all exactly zero.
  void prune(double tol = 0.0);

 private:
  Grid grid_;
  int comps_ = 1;
  std::vector<Key> keys_;
  std::vector<cplx> data_;
  bool sorted_ = true;
};

// Elementwise algebra. Fields must share grid and component count.
SpectralField operator+(const SpectralField& a, const SpectralField& b);
SpectralField operator-(const SpectralField& a, const SpectralField& b);
SpectralField operator*(double s, const SpectralField& a);
SpectralField operator*(cplx s, const SpectralField& a);
SpectralField operator-(const SpectralField& a);
SpectralField& operator+=(SpectralField& a, const SpectralField& b);
SpectralField& operator-=(SpectralField& a, const SpectralField& b);
SpectralField axpy(const SpectralField& y, double a, const SpectralField& x);

SpectralField component(const SpectralField& f, int c);
SpectralField stack(std::span<const SpectralField> parts);
SpectralField stack3(const SpectralField& a, const SpectralField& b, const SpectralField& c);

// Generic per-mode map: out row from (k, in row). Output keeps f's keys.
template <class Fn>
SpectralField map_modes(const SpectralField& f, int out_comps, Fn&& fn) {
  SpectralField out = SpectralField::zeros_like(f, out_comps);
  out.reserve(f.modes());
  std::vector<cplx> buf(out_comps);
  for (std::size_t i = 0; i < f.modes(); ++i) {
    std::fill(buf.begin(), buf.end(), cplx{});
    fn(f.k(i), f.row(i), buf.data());
    out.append_sorted(f.keys()[i], buf.data());
  }
  return out;
}

// Fourier multipliers.
SpectralField curl(const SpectralField& f);
SpectralField divergence(const SpectralField& f);  // vector -> scalar, tensor -> vector
SpectralField gradient(const SpectralField& f);    // scalar -> vector, vector -> 9-tensor
SpectralField laplacian(const SpectralField& f);
SpectralField leray_project(const SpectralField& f);
SpectralField inverse_laplacian(const SpectralField& f);  // mean dropped
SpectralField abs_grad_inverse(const SpectralField& f);   // |grad|^-1, mean dropped

enum class FreqKind { Leq, Less, Geq, NonZero };
SpectralField freq_project(const SpectralField& f, FreqKind kind, double kappa = 0.0);

// g = curl((-Lap)^-1 f). Requires f divergence-free and mean-free to `tol`
// relative to its largest coefficient.
SpectralField inverse_curl(const SpectralField& f, double tol = 1e-10);

// Symmetric traceless R with div R = f - mean f:
//   R_ij = 1/4 (d_i Pu_j + d_j Pu_i) + 3/4 (d_i u_j + d_j u_i) - 1/2 (div u) delta_ij,
// u = Lap^-1 f, P the Leray projector. Output in 6-component layout.
SpectralField anti_divergence(const SpectralField& f);

// Tensor helpers.
SpectralField sym_to_full(const SpectralField& t);
SpectralField full_to_sym(const SpectralField& t);  // symmetric part
SpectralField trace(const SpectralField& t);
SpectralField identity_times(const SpectralField& s);  // s Id in 6-layout
inline int sym_index(int i, int j) {
  static constexpr int idx[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
  return idx[i][j];
}

// Coefficient-space measurements.
double l2_norm(const SpectralField& f);  // Parseval on the 2pi torus
double l2_norm_sq(const SpectralField& f);
double inner(const SpectralField& a, const SpectralField& b);
std::vector<double> mean(const SpectralField& f);
double max_abs_coeff(const SpectralField& f);
int support_linf(const SpectralField& f);  // max |k_i| over nonzero modes
double support_max_norm(const SpectralField& f);
double support_min_norm(const SpectralField& f);
bool is_constant(const SpectralField& f);
double conjugate_symmetry_defect(const SpectralField& f);

}  // namespace hallci
