#include "hallci/perturbation.hpp"

#include <algorithm>
#include <boost/math/interpolators/barycentric_rational.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <stdexcept>

#include "hallci/transform.hpp"

namespace hallci {

double smooth_step(double z) {
  const double x = 0.5 * (z - 2.0);
  if (x <= 0) return 0.0;
  if (x >= 1) return 1.0;
  const double a = std::exp(-1.0 / x), b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double chi0_tilde(double z) { return std::sqrt(std::max(0.0, 1.0 - smooth_step(z))); }

double chi_tilde(double y) { return smooth_step(4.0 * y) - smooth_step(y); }

double chi_tilde_i(int i, double z) { return chi_tilde(std::ldexp(z, -2 * i)); }

double partition_residual(const std::vector<double>& zs) {
  double res = 0;
  for (double z : zs) {
    double s = chi0_tilde(z) * chi0_tilde(z);
    // chi~_i vanishes once 4^{1-i} z <= 2.
    for (int i = 1; std::ldexp(z, 2 - 2 * i) > 2.0; ++i) s += chi_tilde_i(i, z);
    res = std::max(res, std::abs(s - 1.0));
  }
  return res;
}

double CutoffConfig::scale() const { return 100.0 * std::pow(lambda_q, -eps_R) * delta_next; }

double CutoffConfig::rho_i(int i) const {
  return std::pow(lambda_q, -eps_R) * delta_next * std::pow(4.0, double(i + c0));
}

namespace {

double frob_sq6(const double* r) {
  return r[0] * r[0] + r[1] * r[1] + r[2] * r[2] + 2.0 * (r[3] * r[3] + r[4] * r[4] + r[5] * r[5]);
}

void fill_cutoffs(CutoffPartition& cp) {
  const std::size_t P = cp.points();
  const double sc = cp.config.scale();
  std::vector<double> z(P);
  double zmax = 1.0;
  for (std::size_t x = 0; x < P; ++x) {
    const double r[6] = {cp.R[0][x], cp.R[1][x], cp.R[2][x], cp.R[3][x], cp.R[4][x], cp.R[5][x]};
    z[x] = std::sqrt(1.0 + frob_sq6(r) / (sc * sc));
    zmax = std::max(zmax, z[x]);
  }
  // Largest i with chi~_i(zmax) possibly nonzero: 4^{1-i} zmax > 2.
  int imax = 0;
  while (std::ldexp(zmax, -2 * imax) > 2.0) ++imax;
  if (imax > cp.config.max_index)
    throw std::runtime_error("build_cutoffs: stress needs " + std::to_string(imax) + " cutoffs (cap " +
                             std::to_string(cp.config.max_index) + ")");
  cp.chi.assign(imax + 1, std::vector<double>(P, 0.0));
  for (std::size_t x = 0; x < P; ++x) {
    cp.chi[0][x] = chi0_tilde(z[x]);
    for (int i = 1; i <= imax; ++i) cp.chi[i][x] = chi_tilde_i(i, z[x]);
  }
  // Trim trailing cutoffs that vanish everywhere.
  while (imax > 0 && *std::max_element(cp.chi[imax].begin(), cp.chi[imax].end()) <= 0.0) {
    cp.chi.pop_back();
    --imax;
  }
  cp.imax = imax;
  cp.rho.assign(imax + 1, 0.0);
  cp.mean_chi_sq.assign(imax + 1, 0.0);
  cp.l1.assign(imax + 1, 0.0);
  for (int i = 0; i <= imax; ++i) {
    if (i > 0) cp.rho[i] = cp.config.rho_i(i);
    double s2 = 0, s1 = 0;
    for (double c : cp.chi[i]) {
      s2 += c * c;
      s1 += std::abs(c);
    }
    cp.mean_chi_sq[i] = s2 / double(P);
    cp.l1[i] = kTorusVolume * s1 / double(P);
  }
  cp.imax_within_bound = std::ldexp(1.0, 2 * imax) <= 4.0 / cp.config.ell;
}

}  // namespace

CutoffPartition build_cutoffs(const SpectralField& R, const CutoffConfig& cfg) {
  if (R.components() != 6) throw std::invalid_argument("build_cutoffs: R must be a symmetric tensor");
  if (!(cfg.delta_next > 0) || !(cfg.lambda_q > 1) || !(cfg.ell > 0))
    throw std::invalid_argument("build_cutoffs: delta, lambda_q, ell must be positive");
  CutoffPartition cp;
  cp.grid = R.grid();
  cp.config = cfg;
  if (is_constant(R)) {
    cp.uniform = true;
    const std::vector<double> m = mean(R);
    cp.R.assign(6, std::vector<double>(1));
    for (int c = 0; c < 6; ++c) cp.R[c][0] = m[c];
  } else {
    cp.R = from_spectral(R);
  }
  fill_cutoffs(cp);
  return cp;
}

CutoffPartition build_cutoffs_zero(const Grid& g, const CutoffConfig& cfg) {
  return build_cutoffs(SpectralField(g, 6), cfg);
}

double pumping_rho(double E, double mean_J_sq, const CutoffPartition& cp, double delta_next) {
  if (E < 0) throw std::invalid_argument("pumping_rho: negative energy profile");
  double gap = E - mean_J_sq - 0.5 * delta_next;
  for (int i = 1; i <= cp.imax; ++i) gap -= 3.0 * cp.config.rho_i(i) * cp.mean_chi_sq[i];
  if (gap <= 0) return 0.0;
  return gap / (3.0 * cp.mean_chi_sq[0]);
}

namespace {

double bump(double s) { return std::abs(s) < 1.0 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

}  // namespace

double mollify_in_time(const std::vector<double>& times, const std::vector<double>& f, double t, double ell) {
  if (times.size() != f.size() || times.empty()) throw std::invalid_argument("mollify_in_time: bad samples");
  if (times.size() == 1) return f[0];
  for (std::size_t k = 1; k < times.size(); ++k)
    if (!(times[k] > times[k - 1])) throw std::invalid_argument("mollify_in_time: times must increase");
  const std::size_t order = std::min<std::size_t>(3, times.size() - 1);
  boost::math::barycentric_rational<double> interp(times.begin(), times.end(), f.begin(), order);
  const double t0 = times.front(), t1 = times.back();
  auto g = [&](double s) { return interp(std::clamp(s, t0, t1)); };
  using Gauss = boost::math::quadrature::gauss<double, 30>;
  const double norm = Gauss::integrate(bump, -1.0, 1.0);
  const double val = Gauss::integrate([&](double s) { return bump(s) * g(t - ell * s); }, -1.0, 1.0);
  return val / norm;
}

Rho0Result build_rho0(const std::vector<double>& times, const std::vector<double>& E,
                      const std::vector<double>& mean_J_sq, const std::vector<const CutoffPartition*>& cutoffs,
                      double delta_next, double ell) {
  const std::size_t K = times.size();
  if (E.size() != K || mean_J_sq.size() != K || cutoffs.size() != K || K == 0)
    throw std::invalid_argument("build_rho0: one E, J and cutoff set per time slice");
  for (double e : E)
    if (e < 0) throw std::invalid_argument("build_rho0: negative energy profile");
  Rho0Result out;
  out.rho.resize(K);
  std::vector<double> root(K);
  for (std::size_t k = 0; k < K; ++k) {
    out.rho[k] = pumping_rho(E[k], mean_J_sq[k], *cutoffs[k], delta_next);
    root[k] = std::sqrt(out.rho[k]);
  }
  out.rho0.resize(K);
  out.bound = 2.0 * delta_next;
  for (std::size_t k = 0; k < K; ++k) {
    const double m = mollify_in_time(times, root, times[k], ell);
    out.rho0[k] = m * m;
    if (out.rho0[k] > out.bound) out.within_bound = false;
  }
  return out;
}

namespace {

// Linear map M -> gamma^2 per pair, as plain arrays: c(M) = sum_ab M_ab L[ab].
struct GammaMap {
  std::size_t P = 0;
  std::vector<double> c_id;             // c(Id)
  std::vector<std::array<double, 6>> L;  // per pair, on (xx, yy, zz, xy, xz, yz) with symmetric units
  std::vector<Mat3> proj;               // Id - xi xi per pair
};

GammaMap gamma_map(const DirectionSet& ds) {
  GammaSolver gs(ds);
  GammaMap m;
  m.P = ds.pairs();
  m.L.resize(m.P);
  const Eigen::VectorXd cid = gs.gamma_sq_pairs(Mat3::Identity());
  m.c_id.assign(cid.data(), cid.data() + cid.size());
  const int ij[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
  for (int s = 0; s < 6; ++s) {
    Mat3 E = Mat3::Zero();
    E(ij[s][0], ij[s][1]) = E(ij[s][1], ij[s][0]) = 1.0;
    const Eigen::VectorXd c = gs.gamma_sq_pairs(E);
    for (std::size_t p = 0; p < m.P; ++p) m.L[p][s] = c[Eigen::Index(p)];
  }
  for (std::size_t p = 0; p < m.P; ++p) {
    const Direction& d = ds.directions[2 * p];
    Mat3 M = Mat3::Identity();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) M(a, b) -= d.xi[a] * d.xi[b];
    m.proj.push_back(M);
  }
  return m;
}

}  // namespace

AmplitudeSet build_amplitudes(const CutoffPartition& cp, double rho0, const std::vector<DirectionSet>& families,
                              const AmplitudeConfig& cfg) {
  if (families.empty()) throw std::invalid_argument("build_amplitudes: no direction families");
  if (rho0 < 0) throw std::invalid_argument("build_amplitudes: rho0 < 0");
  AmplitudeSet out;
  out.rho = cp.rho;
  out.rho[0] = rho0;
  const std::size_t Npts = cp.points();
  const std::size_t stride = cp.uniform ? 1 : 17;
  for (int i = 0; i <= cp.imax; ++i) {
    const double rho = out.rho[i];
    if (!(rho > 0)) continue;
    const int fam = i % int(families.size());
    const DirectionSet& ds = families[fam];
    const GammaMap gm = gamma_map(ds);
    const double eps = ds.eps_gamma;
    const double sr = std::sqrt(rho);
    std::vector<std::vector<double>> a(gm.P, std::vector<double>(Npts, 0.0));
    bool any = false;
    for (std::size_t x = 0; x < Npts; ++x) {
      const double chi = cp.chi[i][x];
      if (chi <= 0) continue;
      any = true;
      double D[6];
      for (int c = 0; c < 6; ++c) D[c] = -cp.R[c][x] / rho;
      const double dist = std::sqrt(frob_sq6(D));
      const bool active = chi > 1e-6;
      if (active) {
        ++out.active_points;
        out.worst_ball_ratio = std::max(out.worst_ball_ratio, dist / eps);
      }
      bool clamped = false;
      if (dist > eps) {
        if (active) ++out.ball_violations;
        const double s = eps * (1.0 - 1e-12) / dist;
        for (double& v : D) v *= s;
        clamped = true;
      }
      Mat3 lhs = Mat3::Zero();
      for (std::size_t p = 0; p < gm.P; ++p) {
        double c = gm.c_id[p];
        for (int s = 0; s < 6; ++s) c += D[s] * gm.L[p][s];
        a[p][x] = sr * chi * std::sqrt(std::max(c, 0.0));
        if (!clamped && x % stride == 0) lhs += a[p][x] * a[p][x] * gm.proj[p];
      }
      if (!clamped && x % stride == 0) {
        // Both members of a pair carry 1/2 gamma^2 (Id - xi xi).
        Mat3 rhs = chi * chi * rho * Mat3::Identity();
        const int ij[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
        for (int s = 0; s < 6; ++s) {
          rhs(ij[s][0], ij[s][1]) -= chi * chi * cp.R[s][x];
          if (s >= 3) rhs(ij[s][1], ij[s][0]) -= chi * chi * cp.R[s][x];
        }
        out.energy_identity_residual = std::max(out.energy_identity_residual, (lhs - rhs).norm() / rho);
      }
    }
    if (!any) continue;
    for (std::size_t p = 0; p < gm.P; ++p) {
      AmplitudeEntry e;
      e.i = i;
      e.family = fam;
      e.pair = p;
      if (cp.uniform) {
        const double v = a[p][0];
        e.a = SpectralField::constant(cp.grid, std::span<const double>(&v, 1));
      } else {
        e.a = freq_project(to_spectral(cp.grid, {a[p]}), FreqKind::Leq, cfg.amp_band);
        e.a.prune();
      }
      out.entries.push_back(std::move(e));
    }
  }
  return out;
}

FieldJet Increment::v() const { return {v_p.value + v_c.value + v_t.value, v_p.rate + v_c.rate + v_t.rate}; }
FieldJet Increment::w() const { return {w_p.value + w_c.value + w_t.value, w_p.rate + w_c.rate + w_t.rate}; }

namespace {

Wavevector frequency(const Direction& d, int lambda) {
  IVec3 s;
  for (int c = 0; c < 3; ++c) {
    if ((lambda * d.xi_num[c]) % d.den != 0) throw std::invalid_argument("build_increment: lambda*xi not integer");
    s[c] = lambda * d.xi_num[c] / d.den;
  }
  return {s[0], s[1], s[2]};
}

// acc += g(x) B e^{i lambda xi.x}, or with grad_cross, (grad g) x B e^{i lambda xi.x}.
void push_shifted(SpectralField& acc, const SpectralField& g, const Direction& d, int lambda, double scale,
                  bool grad_cross) {
  const Wavevector s = frequency(d, lambda);
  const Grid& grid = acc.grid();
  const cplx I(0, 1);
  cplx buf[3];
  for (std::size_t m = 0; m < g.modes(); ++m) {
    const cplx v = g.row(m)[0];
    if (v == cplx{}) continue;
    const Wavevector k0 = g.k(m);
    const Wavevector k = k0 + s;
    if (!grid.contains(k)) throw BandOverflow("build_increment: wave support exceeds grid band");
    if (grad_cross) {
      const cplx gk[3] = {I * double(k0.x) * v, I * double(k0.y) * v, I * double(k0.z) * v};
      buf[0] = scale * (gk[1] * d.B[2] - gk[2] * d.B[1]);
      buf[1] = scale * (gk[2] * d.B[0] - gk[0] * d.B[2]);
      buf[2] = scale * (gk[0] * d.B[1] - gk[1] * d.B[0]);
    } else {
      for (int c = 0; c < 3; ++c) buf[c] = scale * v * d.B[c];
    }
    acc.push(k, buf);
  }
}

SpectralField scalar_product(const SpectralField& a, const SpectralField& f) {
  if (is_constant(a)) return a.coeff({0, 0, 0}).real() * f;
  return dealiased_product(a, f, Product::Scalar);
}

}  // namespace

Increment build_increment(const Grid& g, const AmplitudeSet& amps, const std::vector<DirectionSet>& families,
                          const IntermittencyParams& p, double t) {
  p.validate(false);
  Increment inc;
  inc.lambda = p.lambda;
  inc.mu = p.mu;
  const double lam = p.lambda;
  SpectralField U(g, 3), Ur(g, 3), We(g, 3), Wer(g, 3), S(g, 3), Sr(g, 3);
  for (const AmplitudeEntry& e : amps.entries) {
    const DirectionSet& ds = families.at(std::size_t(e.family));
    const Direction& dp = ds.directions[2 * e.pair];
    const Direction& dm = ds.directions[2 * e.pair + 1];
    const FieldJet eta = build_eta(g, dp, p, t);
    const SpectralField gv = scalar_product(e.a, eta.value);
    const SpectralField gr = scalar_product(e.a, eta.rate);
    for (const Direction* d : {&dp, &dm}) {
      push_shifted(U, gv, *d, p.lambda, 1.0, false);
      push_shifted(Ur, gr, *d, p.lambda, 1.0, false);
      push_shifted(We, gv, *d, p.lambda, 1.0 / lam, true);
      push_shifted(Wer, gr, *d, p.lambda, 1.0 / lam, true);
    }
    // Temporal corrector source a^2 eta^2 xi over the + representative.
    const FieldJet eta2 = build_eta_squared(g, dp, p, t);
    const SpectralField a2 = is_constant(e.a) ? e.a.coeff({0, 0, 0}).real() * e.a : dealiased_product(e.a, e.a, Product::Scalar);
    const SpectralField hv = scalar_product(a2, eta2.value);
    const SpectralField hr = scalar_product(a2, eta2.rate);
    for (auto [src, acc] : {std::pair{&hv, &S}, std::pair{&hr, &Sr}}) {
      for (std::size_t m = 0; m < src->modes(); ++m) {
        const cplx v = src->row(m)[0];
        acc->push(src->k(m), {v * dp.xi[0], v * dp.xi[1], v * dp.xi[2]});
      }
    }
  }
  for (SpectralField* f : {&U, &Ur, &We, &Wer, &S, &Sr}) f->finalize();
  inc.U = {U, Ur};
  inc.W_eps1 = We;
  inc.v_p = {(1.0 / lam) * U, (1.0 / lam) * Ur};
  inc.v_c = {(1.0 / lam) * We, (1.0 / lam) * Wer};
  inc.w_p = {curl(inc.v_p.value), curl(inc.v_p.rate)};
  inc.w_c = {curl(inc.v_c.value), curl(inc.v_c.rate)};
  inc.w_t = {(1.0 / p.mu) * leray_project(freq_project(S, FreqKind::NonZero)),
             (1.0 / p.mu) * leray_project(freq_project(Sr, FreqKind::NonZero))};
  inc.v_t = {inverse_curl(inc.w_t.value), inverse_curl(inc.w_t.rate)};
  return inc;
}

namespace {

double rel(double num, double scale) { return scale > 0 ? num / scale : num; }

double div_scale(const SpectralField& f) { return max_abs_coeff(f) * std::max(1, support_linf(f)); }

}  // namespace

IncrementChecks check_increment(const Increment& inc) {
  IncrementChecks c;
  const SpectralField vpc = inc.v_p.value + inc.v_c.value;
  c.div_vpc = rel(max_abs_coeff(divergence(vpc)), div_scale(vpc));
  const FieldJet v = inc.v(), w = inc.w();
  c.div_v = rel(max_abs_coeff(divergence(v.value)), div_scale(v.value));
  c.div_w = rel(max_abs_coeff(divergence(w.value)), div_scale(w.value));
  const double ws = max_abs_coeff(w.value);
  c.curl_v_minus_w = rel(max_abs_coeff(curl(v.value) - w.value), ws);
  c.wp_curl = rel(max_abs_coeff(curl(inc.v_p.value) - inc.w_p.value), ws);
  c.wc_curl = rel(max_abs_coeff(curl(inc.v_c.value) - inc.w_c.value), ws);
  c.wt_curl = rel(max_abs_coeff(curl(inc.v_t.value) - inc.w_t.value), ws);
  const double wps = max_abs_coeff(inc.w_p.value);
  c.lambda_vp = rel(max_abs_coeff(inc.lambda * inc.v_p.value - (inc.w_p.value - inc.W_eps1)), wps);
  c.curl_wp = rel(max_abs_coeff(curl(inc.w_p.value) - inc.lambda * inc.w_p.value - curl(inc.W_eps1)),
                  inc.lambda * wps);
  return c;
}

IncrementNorms increment_norm_suite(const Increment& inc, double delta_next) {
  IncrementNorms n;
  n.wp_l2 = l2_norm(inc.w_p.value);
  n.wc_l2 = l2_norm(inc.w_c.value);
  n.wt_l2 = l2_norm(inc.w_t.value);
  n.vp_l2 = l2_norm(inc.v_p.value);
  n.w_l2 = l2_norm(inc.w().value);
  n.v_l2 = l2_norm(inc.v().value);
  n.wp_over_delta = n.wp_l2 / std::sqrt(delta_next);
  if (n.wp_l2 > 0) {
    n.wc_over_wp = n.wc_l2 / n.wp_l2;
    n.wt_over_wp = n.wt_l2 / n.wp_l2;
    n.lambda_vp_over_wp = inc.lambda * n.vp_l2 / n.wp_l2;
    n.weps_over_wp = l2_norm(inc.W_eps1) / n.wp_l2;
  }
  return n;
}

}  // namespace hallci
