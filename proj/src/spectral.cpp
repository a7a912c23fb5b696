#include "hallci/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hallci {

int Wavevector::linf() const { return std::max({std::abs(x), std::abs(y), std::abs(z)}); }

Grid::Grid(int n) : n_(n) {
  if (n < 16 || (n & (n - 1)) != 0)
    throw std::invalid_argument("grid size must be a power of two >= 16, got " + std::to_string(n));
}

SpectralField::SpectralField(const Grid& g, int components) : grid_(g), comps_(components) {
  if (components != 1 && components != 3 && components != 6 && components != 9)
    throw std::invalid_argument("unsupported component count " + std::to_string(components));
}

SpectralField SpectralField::constant(const Grid& g, std::span<const double> value) {
  SpectralField f(g, int(value.size()));
  std::vector<cplx> v(value.begin(), value.end());
  f.append_sorted(pack({0, 0, 0}), v.data());
  return f;
}

SpectralField SpectralField::zeros_like(const SpectralField& f, int components) {
  return SpectralField(f.grid_, components > 0 ? components : f.comps_);
}

const cplx* SpectralField::find(const Wavevector& k) const {
  const Key key = pack(k);
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return nullptr;
  return row(std::size_t(it - keys_.begin()));
}

cplx SpectralField::coeff(const Wavevector& k, int c) const {
  const cplx* r = find(k);
  return r ? r[c] : cplx{};
}

void SpectralField::push(const Wavevector& k, const cplx* v) {
  if (!grid_.contains(k))
    throw BandOverflow("wavevector (" + std::to_string(k.x) + "," + std::to_string(k.y) + "," +
                       std::to_string(k.z) + ") exceeds grid band kmax=" +
                       std::to_string(grid_.kmax()));
  const Key key = pack(k);
  if (!keys_.empty() && key <= keys_.back()) sorted_ = false;
  keys_.push_back(key);
  data_.insert(data_.end(), v, v + comps_);
}

void SpectralField::push(const Wavevector& k, std::initializer_list<cplx> v) {
  if (int(v.size()) != comps_) throw std::invalid_argument("component count mismatch in push");
  push(k, v.begin());
}

void SpectralField::append_sorted(Key key, const cplx* v) {
  keys_.push_back(key);
  data_.insert(data_.end(), v, v + comps_);
}

void SpectralField::reserve(std::size_t modes) {
  keys_.reserve(modes);
  data_.reserve(modes * comps_);
}

void SpectralField::finalize() {
  if (sorted_) return;
  std::vector<std::size_t> order(keys_.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys_[a] < keys_[b]; });
  std::vector<Key> keys;
  std::vector<cplx> data;
  keys.reserve(keys_.size());
  data.reserve(data_.size());
  for (std::size_t idx : order) {
    const cplx* src = data_.data() + idx * comps_;
    if (!keys.empty() && keys.back() == keys_[idx]) {
      cplx* dst = data.data() + (keys.size() - 1) * comps_;
      for (int c = 0; c < comps_; ++c) dst[c] += src[c];
    } else {
      keys.push_back(keys_[idx]);
      data.insert(data.end(), src, src + comps_);
    }
  }
  keys_ = std::move(keys);
  data_ = std::move(data);
  sorted_ = true;
}

void SpectralField::prune(double tol) {
  std::size_t w = 0;
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    bool keep = false;
    for (int c = 0; c < comps_; ++c)
      if (std::abs(data_[i * comps_ + c]) > tol) keep = true;
    if (!keep) continue;
    if (w != i) {
      keys_[w] = keys_[i];
      std::copy_n(data_.begin() + i * comps_, comps_, data_.begin() + w * comps_);
    }
    ++w;
  }
  keys_.resize(w);
  data_.resize(w * comps_);
}

namespace {

void require_compatible(const SpectralField& a, const SpectralField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("grid mismatch");
  if (a.components() != b.components())
    throw std::invalid_argument("component count mismatch: " + std::to_string(a.components()) +
                                " vs " + std::to_string(b.components()));
}

// out = sa*a + sb*b over the union of keys.
SpectralField combine(const SpectralField& a, double sa, const SpectralField& b, double sb) {
  require_compatible(a, b);
  const int C = a.components();
  SpectralField out = SpectralField::zeros_like(a);
  out.reserve(std::max(a.modes(), b.modes()));
  std::vector<cplx> buf(C);
  std::size_t i = 0, j = 0;
  const auto& ka = a.keys();
  const auto& kb = b.keys();
  while (i < ka.size() || j < kb.size()) {
    Key key;
    if (j >= kb.size() || (i < ka.size() && ka[i] < kb[j])) {
      key = ka[i];
      for (int c = 0; c < C; ++c) buf[c] = sa * a.row(i)[c];
      ++i;
    } else if (i >= ka.size() || kb[j] < ka[i]) {
      key = kb[j];
      for (int c = 0; c < C; ++c) buf[c] = sb * b.row(j)[c];
      ++j;
    } else {
      key = ka[i];
      for (int c = 0; c < C; ++c) buf[c] = sa * a.row(i)[c] + sb * b.row(j)[c];
      ++i;
      ++j;
    }
    out.append_sorted(key, buf.data());
  }
  return out;
}

}  // namespace

SpectralField operator+(const SpectralField& a, const SpectralField& b) { return combine(a, 1.0, b, 1.0); }
SpectralField operator-(const SpectralField& a, const SpectralField& b) { return combine(a, 1.0, b, -1.0); }
SpectralField axpy(const SpectralField& y, double a, const SpectralField& x) { return combine(y, 1.0, x, a); }
SpectralField& operator+=(SpectralField& a, const SpectralField& b) { return a = a + b; }
SpectralField& operator-=(SpectralField& a, const SpectralField& b) { return a = a - b; }

SpectralField operator*(cplx s, const SpectralField& a) {
  SpectralField out = a;
  for (auto& v : out.data()) v *= s;
  return out;
}
SpectralField operator*(double s, const SpectralField& a) {
  SpectralField out = a;
  for (auto& v : out.data()) v *= s;
  return out;
}
SpectralField operator-(const SpectralField& a) { return -1.0 * a; }

SpectralField component(const SpectralField& f, int c) {
  if (c < 0 || c >= f.components()) throw std::out_of_range("component index");
  return map_modes(f, 1, [c](const Wavevector&, const cplx* in, cplx* out) { out[0] = in[c]; });
}

SpectralField stack(std::span<const SpectralField> parts) {
  if (parts.empty()) throw std::invalid_argument("stack of nothing");
  int C = 0;
  for (const auto& p : parts) {
    if (!(p.grid() == parts[0].grid())) throw std::invalid_argument("grid mismatch");
    C += p.components();
  }
  // Merge all key sets.
  std::vector<Key> keys;
  for (const auto& p : parts) keys.insert(keys.end(), p.keys().begin(), p.keys().end());
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  SpectralField out(parts[0].grid(), C);
  out.reserve(keys.size());
  std::vector<std::size_t> pos(parts.size(), 0);
  std::vector<cplx> buf(C);
  for (Key key : keys) {
    int off = 0;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      const auto& f = parts[p];
      const int pc = f.components();
      if (pos[p] < f.modes() && f.keys()[pos[p]] == key) {
        std::copy_n(f.row(pos[p]), pc, buf.begin() + off);
        ++pos[p];
      } else {
        std::fill_n(buf.begin() + off, pc, cplx{});
      }
      off += pc;
    }
    out.append_sorted(key, buf.data());
  }
  return out;
}

SpectralField stack3(const SpectralField& a, const SpectralField& b, const SpectralField& c) {
  const SpectralField parts[3] = {a, b, c};
  return stack(parts);
}

namespace {
constexpr cplx I{0.0, 1.0};

void require_comps(const SpectralField& f, int c, const char* op) {
  if (f.components() != c)
    throw std::invalid_argument(std::string(op) + ": expected " + std::to_string(c) +
                                " components, got " + std::to_string(f.components()));
}
}  // namespace

SpectralField curl(const SpectralField& f) {
  require_comps(f, 3, "curl");
  return map_modes(f, 3, [](const Wavevector& k, const cplx* v, cplx* o) {
    o[0] = I * (double(k.y) * v[2] - double(k.z) * v[1]);
    o[1] = I * (double(k.z) * v[0] - double(k.x) * v[2]);
    o[2] = I * (double(k.x) * v[1] - double(k.y) * v[0]);
  });
}

SpectralField divergence(const SpectralField& f) {
  switch (f.components()) {
    case 3:
      return map_modes(f, 1, [](const Wavevector& k, const cplx* v, cplx* o) {
        o[0] = I * (double(k.x) * v[0] + double(k.y) * v[1] + double(k.z) * v[2]);
      });
    case 6:
      return map_modes(f, 3, [](const Wavevector& k, const cplx* t, cplx* o) {
        const double kk[3] = {double(k.x), double(k.y), double(k.z)};
        for (int i = 0; i < 3; ++i) {
          cplx s{};
          for (int j = 0; j < 3; ++j) s += kk[j] * t[sym_index(i, j)];
          o[i] = I * s;
        }
      });
    case 9:
      return map_modes(f, 3, [](const Wavevector& k, const cplx* t, cplx* o) {
        const double kk[3] = {double(k.x), double(k.y), double(k.z)};
        for (int i = 0; i < 3; ++i) {
          cplx s{};
          for (int j = 0; j < 3; ++j) s += kk[j] * t[3 * i + j];
          o[i] = I * s;
        }
      });
    default:
      throw std::invalid_argument("divergence: needs a vector or tensor field");
  }
}

SpectralField gradient(const SpectralField& f) {
  if (f.components() == 1)
    return map_modes(f, 3, [](const Wavevector& k, const cplx* v, cplx* o) {
      o[0] = I * double(k.x) * v[0];
      o[1] = I * double(k.y) * v[0];
      o[2] = I * double(k.z) * v[0];
    });
  require_comps(f, 3, "gradient");
  // Jacobian layout G_ij = d_j f_i, so that div(grad f) = Lap f.
  return map_modes(f, 9, [](const Wavevector& k, const cplx* v, cplx* o) {
    const double kk[3] = {double(k.x), double(k.y), double(k.z)};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) o[3 * i + j] = I * kk[j] * v[i];
  });
}

SpectralField laplacian(const SpectralField& f) {
  const int C = f.components();
  return map_modes(f, C, [C](const Wavevector& k, const cplx* v, cplx* o) {
    const double s = -k.norm2();
    for (int c = 0; c < C; ++c) o[c] = s * v[c];
  });
}

SpectralField inverse_laplacian(const SpectralField& f) {
  const int C = f.components();
  return map_modes(f, C, [C](const Wavevector& k, const cplx* v, cplx* o) {
    const double k2 = k.norm2();
    if (k2 == 0) return;
    for (int c = 0; c < C; ++c) o[c] = -v[c] / k2;
  });
}

SpectralField abs_grad_inverse(const SpectralField& f) {
  const int C = f.components();
  return map_modes(f, C, [C](const Wavevector& k, const cplx* v, cplx* o) {
    const double k2 = k.norm2();
    if (k2 == 0) return;
    const double s = 1.0 / std::sqrt(k2);
    for (int c = 0; c < C; ++c) o[c] = s * v[c];
  });
}

SpectralField leray_project(const SpectralField& f) {
  require_comps(f, 3, "leray_project");
  return map_modes(f, 3, [](const Wavevector& k, const cplx* v, cplx* o) {
    const double k2 = k.norm2();
    if (k2 == 0) {
      std::copy_n(v, 3, o);
      return;
    }
    const cplx kv = double(k.x) * v[0] + double(k.y) * v[1] + double(k.z) * v[2];
    o[0] = v[0] - double(k.x) * kv / k2;
    o[1] = v[1] - double(k.y) * kv / k2;
    o[2] = v[2] - double(k.z) * kv / k2;
  });
}

SpectralField freq_project(const SpectralField& f, FreqKind kind, double kappa) {
  if (kind != FreqKind::NonZero && !(kappa > 0)) throw std::invalid_argument("freq_project: kappa must be > 0");
  const int C = f.components();
  const double kap2 = kappa * kappa;
  return map_modes(f, C, [=](const Wavevector& k, const cplx* v, cplx* o) {
    const double k2 = k.norm2();
    bool keep = true;
    switch (kind) {
      case FreqKind::Leq: keep = k2 <= kap2; break;
      case FreqKind::Less: keep = k2 < kap2; break;
      case FreqKind::Geq: keep = k2 >= kap2; break;
      case FreqKind::NonZero: keep = k2 != 0; break;
    }
    if (keep) std::copy_n(v, C, o);
  });
}

SpectralField inverse_curl(const SpectralField& f, double tol) {
  require_comps(f, 3, "inverse_curl");
  const double scale = std::max(max_abs_coeff(f), 1e-300);
  const double div_defect = max_abs_coeff(divergence(f));
  const double mean_defect = std::abs(f.coeff({0, 0, 0}, 0)) + std::abs(f.coeff({0, 0, 0}, 1)) +
                             std::abs(f.coeff({0, 0, 0}, 2));
  // Divergence is measured against |k||c| so the check is scale free.
  const double div_scale = scale * std::max(1.0, double(support_linf(f)) * std::sqrt(3.0));
  if (div_defect > tol * div_scale || mean_defect > tol * scale)
    throw std::invalid_argument("inverse_curl: input not divergence-free and mean-free (div " +
                                std::to_string(div_defect / div_scale) + ", mean " +
                                std::to_string(mean_defect / scale) + ")");
  return map_modes(f, 3, [](const Wavevector& k, const cplx* v, cplx* o) {
    const double k2 = k.norm2();
    if (k2 == 0) return;
    o[0] = I * (double(k.y) * v[2] - double(k.z) * v[1]) / k2;
    o[1] = I * (double(k.z) * v[0] - double(k.x) * v[2]) / k2;
    o[2] = I * (double(k.x) * v[1] - double(k.y) * v[0]) / k2;
  });
}

SpectralField anti_divergence(const SpectralField& f) {
  require_comps(f, 3, "anti_divergence");
  return map_modes(f, 6, [](const Wavevector& k, const cplx* v, cplx* o) {
    const double k2 = k.norm2();
    if (k2 == 0) return;
    const double kk[3] = {double(k.x), double(k.y), double(k.z)};
    cplx u[3], pu[3];
    for (int i = 0; i < 3; ++i) u[i] = -v[i] / k2;
    const cplx ku = kk[0] * u[0] + kk[1] * u[1] + kk[2] * u[2];
    for (int i = 0; i < 3; ++i) pu[i] = u[i] - kk[i] * ku / k2;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        cplx r = 0.25 * I * (kk[i] * pu[j] + kk[j] * pu[i]) + 0.75 * I * (kk[i] * u[j] + kk[j] * u[i]);
        if (i == j) r -= 0.5 * I * ku;
        o[sym_index(i, j)] = r;
      }
  });
}

SpectralField sym_to_full(const SpectralField& t) {
  require_comps(t, 6, "sym_to_full");
  return map_modes(t, 9, [](const Wavevector&, const cplx* s, cplx* o) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) o[3 * i + j] = s[sym_index(i, j)];
  });
}

SpectralField full_to_sym(const SpectralField& t) {
  require_comps(t, 9, "full_to_sym");
  return map_modes(t, 6, [](const Wavevector&, const cplx* s, cplx* o) {
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) o[sym_index(i, j)] = 0.5 * (s[3 * i + j] + s[3 * j + i]);
  });
}

SpectralField trace(const SpectralField& t) {
  if (t.components() == 6)
    return map_modes(t, 1, [](const Wavevector&, const cplx* s, cplx* o) { o[0] = s[0] + s[1] + s[2]; });
  require_comps(t, 9, "trace");
  return map_modes(t, 1, [](const Wavevector&, const cplx* s, cplx* o) { o[0] = s[0] + s[4] + s[8]; });
}

SpectralField identity_times(const SpectralField& s) {
  require_comps(s, 1, "identity_times");
  return map_modes(s, 6, [](const Wavevector&, const cplx* v, cplx* o) {
    o[0] = o[1] = o[2] = v[0];
  });
}

double l2_norm_sq(const SpectralField& f) {
  // Off-diagonal entries of a symmetric 6-layout tensor count twice.
  const int C = f.components();
  double s = 0;
  for (std::size_t i = 0; i < f.modes(); ++i)
    for (int c = 0; c < C; ++c) s += std::norm(f.row(i)[c]) * ((C == 6 && c >= 3) ? 2.0 : 1.0);
  return kTorusVolume * s;
}

double l2_norm(const SpectralField& f) { return std::sqrt(l2_norm_sq(f)); }

double inner(const SpectralField& a, const SpectralField& b) {
  require_compatible(a, b);
  const int C = a.components();
  double s = 0;
  std::size_t i = 0, j = 0;
  while (i < a.modes() && j < b.modes()) {
    if (a.keys()[i] < b.keys()[j]) {
      ++i;
    } else if (b.keys()[j] < a.keys()[i]) {
      ++j;
    } else {
      for (int c = 0; c < C; ++c)
        s += (a.row(i)[c] * std::conj(b.row(j)[c])).real() * ((C == 6 && c >= 3) ? 2.0 : 1.0);
      ++i;
      ++j;
    }
  }
  return kTorusVolume * s;
}

std::vector<double> mean(const SpectralField& f) {
  std::vector<double> m(f.components(), 0.0);
  if (const cplx* r = f.find({0, 0, 0}))
    for (int c = 0; c < f.components(); ++c) m[c] = r[c].real();
  return m;
}

double max_abs_coeff(const SpectralField& f) {
  double m = 0;
  for (const auto& v : f.data()) m = std::max(m, std::abs(v));
  return m;
}

namespace {
template <class Fn>
void for_nonzero(const SpectralField& f, Fn&& fn) {
  for (std::size_t i = 0; i < f.modes(); ++i) {
    bool nz = false;
    for (int c = 0; c < f.components(); ++c)
      if (f.row(i)[c] != cplx{}) nz = true;
    if (nz) fn(f.k(i));
  }
}
}  // namespace

int support_linf(const SpectralField& f) {
  int m = 0;
  for_nonzero(f, [&](const Wavevector& k) { m = std::max(m, k.linf()); });
  return m;
}

double support_max_norm(const SpectralField& f) {
  double m = 0;
  for_nonzero(f, [&](const Wavevector& k) { m = std::max(m, k.norm2()); });
  return std::sqrt(m);
}

double support_min_norm(const SpectralField& f) {
  double m = std::numeric_limits<double>::infinity();
  for_nonzero(f, [&](const Wavevector& k) { m = std::min(m, k.norm2()); });
  return std::sqrt(m);
}

bool is_constant(const SpectralField& f) {
  bool c = true;
  for_nonzero(f, [&](const Wavevector& k) {
    if (k.norm2() != 0) c = false;
  });
  return c;
}

double conjugate_symmetry_defect(const SpectralField& f) {
  double m = 0;
  for (std::size_t i = 0; i < f.modes(); ++i) {
    const cplx* other = f.find(-f.k(i));
    for (int c = 0; c < f.components(); ++c) {
      const cplx o = other ? other[c] : cplx{};
      m = std::max(m, std::abs(f.row(i)[c] - std::conj(o)));
    }
  }
  return m;
}

}  // namespace hallci
