#include "hallci/transform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cstring>
#include <map>
#include <mutex>
#include <thread>

namespace hallci {

void RealArray::Free::operator()(double* p) const { fftw_free(p); }

RealArray::RealArray(int N) : N_(N), ptr_(fftw_alloc_real(std::size_t(N) * N * N)) {
  if (!ptr_) throw std::bad_alloc();
}

int good_fft_size(int n) {
  for (int m = std::max(n, 2);; ++m) {
    if (m % 2) continue;
    int r = m;
    for (int p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

namespace {

struct ComplexBuf {
  explicit ComplexBuf(std::size_t n) : p(fftw_alloc_complex(n)), n(n) {
    if (!p) throw std::bad_alloc();
  }
  ~ComplexBuf() { fftw_free(p); }
  ComplexBuf(const ComplexBuf&) = delete;
  ComplexBuf& operator=(const ComplexBuf&) = delete;
  void zero() { std::memset(static_cast<void*>(p), 0, n * sizeof(fftw_complex)); }
  fftw_complex* p;
  std::size_t n;
};

struct Plans {
  fftw_plan c2r = nullptr;
  fftw_plan r2c = nullptr;
};

// Plans are created once per size under a lock; execution through the
// new-array interface is thread safe.
const Plans& plans_for(int N) {
  static std::mutex mu;
  static std::map<int, Plans> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(N);
  if (it != cache.end()) return it->second;
  const std::size_t nc = std::size_t(N) * N * (N / 2 + 1);
  ComplexBuf cb(nc);
  RealArray rb(N);
  Plans p;
  p.c2r = fftw_plan_dft_c2r_3d(N, N, N, cb.p, rb.data(), FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  p.r2c = fftw_plan_dft_r2c_3d(N, N, N, rb.data(), cb.p, FFTW_ESTIMATE);
  if (!p.c2r || !p.r2c) throw std::runtime_error("FFTW planning failed for N=" + std::to_string(N));
  return cache.emplace(N, p).first->second;
}

inline int wrap(int k, int N) { return k < 0 ? k + N : k; }

int key_linf(const SpectralField& f) {
  int m = 0;
  for (std::size_t i = 0; i < f.modes(); ++i) m = std::max(m, f.k(i).linf());
  return m;
}

// Fills the half-spectrum buffer for component c and runs the inverse FFT.
void inverse_component(const SpectralField& f, int c, int N, ComplexBuf& buf, RealArray& out) {
  const int Nh = N / 2 + 1;
  buf.zero();
  const int C = f.components();
  const cplx* d = f.data().data();
  for (std::size_t i = 0; i < f.modes(); ++i) {
    const Wavevector k = f.k(i);
    if (k.z < 0) continue;
    const std::size_t idx = (std::size_t(wrap(k.x, N)) * N + wrap(k.y, N)) * Nh + k.z;
    buf.p[idx][0] = d[i * C + c].real();
    buf.p[idx][1] = d[i * C + c].imag();
  }
  fftw_execute_dft_c2r(plans_for(N).c2r, buf.p, out.data());
}

// Dense-in-band forward transform of a set of component arrays produced on
// demand by `fill`, one at a time.
template <class Fill>
SpectralField forward_components(const Grid& g, int C, int N, int kout, Fill&& fill) {
  if (2 * kout + 1 > N) throw std::invalid_argument("forward transform: band exceeds padded grid");
  const int Nh = N / 2 + 1;
  const int side = 2 * kout + 1;
  const std::size_t nband = std::size_t(side) * side * side;
  std::vector<cplx> dense(nband * C);
  ComplexBuf buf(std::size_t(N) * N * Nh);
  RealArray tmp(N);
  const double norm = 1.0 / (double(N) * N * N);
  for (int c = 0; c < C; ++c) {
    fill(c, tmp);
    fftw_execute_dft_r2c(plans_for(N).r2c, tmp.data(), buf.p);
    std::size_t m = 0;
    for (int kx = -kout; kx <= kout; ++kx)
      for (int ky = -kout; ky <= kout; ++ky)
        for (int kz = -kout; kz <= kout; ++kz, ++m) {
          cplx v;
          if (kz >= 0) {
            const std::size_t idx = (std::size_t(wrap(kx, N)) * N + wrap(ky, N)) * Nh + kz;
            v = cplx(buf.p[idx][0], buf.p[idx][1]);
          } else {
            const std::size_t idx = (std::size_t(wrap(-kx, N)) * N + wrap(-ky, N)) * Nh + (-kz);
            v = cplx(buf.p[idx][0], -buf.p[idx][1]);
          }
          dense[m * C + c] = v * norm;
        }
  }
  SpectralField out(g, C);
  out.reserve(nband);
  std::size_t m = 0;
  for (int kx = -kout; kx <= kout; ++kx)
    for (int ky = -kout; ky <= kout; ++ky)
      for (int kz = -kout; kz <= kout; ++kz, ++m) out.append_sorted(pack({kx, ky, kz}), dense.data() + m * C);
  return out;
}

}  // namespace

RealArray to_physical_component(const SpectralField& f, int c, int N) {
  if (2 * key_linf(f) >= N) throw std::invalid_argument("to_physical: grid too small for field support");
  ComplexBuf buf(std::size_t(N) * N * (N / 2 + 1));
  RealArray out(N);
  inverse_component(f, c, N, buf, out);
  return out;
}

std::vector<RealArray> to_physical(const SpectralField& f, int N) {
  if (2 * key_linf(f) >= N) throw std::invalid_argument("to_physical: grid too small for field support");
  ComplexBuf buf(std::size_t(N) * N * (N / 2 + 1));
  std::vector<RealArray> out;
  for (int c = 0; c < f.components(); ++c) {
    out.emplace_back(N);
    inverse_component(f, c, N, buf, out.back());
  }
  return out;
}

SpectralField from_physical(const std::vector<RealArray>& samples, const Grid& g, int kout) {
  if (samples.empty()) throw std::invalid_argument("from_physical: no components");
  const int N = samples[0].N();
  return forward_components(g, int(samples.size()), N, kout, [&](int c, RealArray& tmp) {
    if (samples[c].N() != N) throw std::invalid_argument("from_physical: size mismatch");
    std::copy_n(samples[c].data(), samples[c].size(), tmp.data());
  });
}

std::vector<std::vector<double>> from_spectral(const SpectralField& f) {
  const int n = f.grid().n();
  auto arrs = to_physical(f, n);
  std::vector<std::vector<double>> out;
  for (auto& a : arrs) out.emplace_back(a.data(), a.data() + a.size());
  return out;
}

SpectralField to_spectral(const Grid& g, const std::vector<std::vector<double>>& samples) {
  const int n = g.n();
  const std::size_t n3 = std::size_t(n) * n * n;
  for (const auto& s : samples)
    if (s.size() != n3)
      throw std::invalid_argument("to_spectral: expected " + std::to_string(n3) + " samples, got " +
                                  std::to_string(s.size()));
  return forward_components(g, int(samples.size()), n, g.kmax(), [&](int c, RealArray& tmp) {
    std::copy(samples[c].begin(), samples[c].end(), tmp.data());
  });
}

namespace {

int out_components(Product kind, int cf, int cg) {
  switch (kind) {
    case Product::Scalar:
      if (cf != 1 || cg != 1) throw std::invalid_argument("scalar product needs scalars");
      return 1;
    case Product::Scale:
      if (cf != 1) throw std::invalid_argument("scale product needs a scalar first factor");
      return cg;
    case Product::Dot:
      if (cf != 3 || cg != 3) throw std::invalid_argument("dot product needs vectors");
      return 1;
    case Product::Cross:
      if (cf != 3 || cg != 3) throw std::invalid_argument("cross product needs vectors");
      return 3;
    case Product::Outer:
      if (cf != 3 || cg != 3) throw std::invalid_argument("outer product needs vectors");
      return 9;
    case Product::SymOuter:
      if (cf != 3 || cg != 3) throw std::invalid_argument("outer product needs vectors");
      return 6;
  }
  return 0;
}

// Output component c of the bilinear pointwise product.
template <class A, class B>
auto apply(Product kind, int c, const A* a, const B* b) -> decltype(a[0] * b[0]) {
  switch (kind) {
    case Product::Scalar: return a[0] * b[0];
    case Product::Scale: return a[0] * b[c];
    case Product::Dot: return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    case Product::Cross: {
      const int i = (c + 1) % 3, j = (c + 2) % 3;
      return a[i] * b[j] - a[j] * b[i];
    }
    case Product::Outer: return a[c / 3] * b[c % 3];
    case Product::SymOuter: {
      static constexpr int ii[6] = {0, 1, 2, 0, 0, 1};
      static constexpr int jj[6] = {0, 1, 2, 1, 2, 2};
      return a[ii[c]] * b[jj[c]] + a[jj[c]] * b[ii[c]];
    }
  }
  return a[0] * b[0];
}

}  // namespace

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g, Product kind) {
  if (!(f.grid() == g.grid())) throw std::invalid_argument("product: grid mismatch");
  const int C = out_components(kind, f.components(), g.components());
  const Grid& grid = f.grid();
  if (f.empty() || g.empty()) return SpectralField(grid, C);

  // A constant factor reduces the product to a per-mode map.
  if (is_constant(f) || is_constant(g)) {
    const bool fconst = is_constant(f);
    const SpectralField& c0 = fconst ? f : g;
    const SpectralField& other = fconst ? g : f;
    std::vector<double> m = mean(c0);
    SpectralField out(grid, C);
    out.reserve(other.modes());
    std::vector<cplx> buf(C);
    std::vector<cplx> mc(m.begin(), m.end());
    for (std::size_t i = 0; i < other.modes(); ++i) {
      for (int c = 0; c < C; ++c)
        buf[c] = fconst ? apply(kind, c, mc.data(), other.row(i)) : apply(kind, c, other.row(i), mc.data());
      out.append_sorted(other.keys()[i], buf.data());
    }
    return out;
  }

  const int Kf = key_linf(f), Kg = key_linf(g);
  const int Kout = std::min(grid.kmax(), Kf + Kg);
  const int N = good_fft_size(std::max(Kf + Kg + Kout + 1, 2 * std::max(Kf, Kg) + 1));
  const auto F = to_physical(f, N);
  const auto G = to_physical(g, N);
  const std::size_t n3 = std::size_t(N) * N * N;
  const int cf = f.components(), cg = g.components();
  return forward_components(grid, C, N, Kout, [&](int c, RealArray& tmp) {
    double a[3], b[9];
    for (std::size_t p = 0; p < n3; ++p) {
      for (int i = 0; i < cf; ++i) a[i] = F[i][p];
      for (int i = 0; i < cg; ++i) b[i] = G[i][p];
      tmp[p] = apply(kind, c, a, b);
    }
  });
}

SpectralField cross(const SpectralField& f, const SpectralField& g) { return dealiased_product(f, g, Product::Cross); }
SpectralField dot(const SpectralField& f, const SpectralField& g) { return dealiased_product(f, g, Product::Dot); }
SpectralField times(const SpectralField& s, const SpectralField& g) { return dealiased_product(s, g, Product::Scale); }

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_cap(int threads) {
  g_threads = threads > 0 ? threads : int(std::max(1u, std::thread::hardware_concurrency()));
}
int thread_cap() { return g_threads; }

}  // namespace hallci
