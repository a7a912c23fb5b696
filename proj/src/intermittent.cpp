#include "hallci/intermittent.hpp"

#include <cmath>
#include <stdexcept>

#include "hallci/norms.hpp"

namespace hallci {

void IntermittencyParams::validate(bool require_mu_window) const {
  if (lambda <= 0 || lambda % N0 != 0)
    throw std::invalid_argument("lambda = " + std::to_string(lambda) + " must be a positive multiple of N0 = " +
                                std::to_string(N0));
  if (lambda_sigma < 1) throw std::invalid_argument("lambda*sigma must be a positive integer");
  if (r < 0) throw std::invalid_argument("r must be >= 0");
  if (!(sigma() * r < 1.0))
    throw std::invalid_argument("sigma*r = " + std::to_string(sigma() * r) + " must be < 1");
  if (require_mu_window && !(mu > lambda && mu < double(lambda) * lambda))
    throw std::invalid_argument("mu = " + std::to_string(mu) + " must lie in (lambda, lambda^2)");
}

SpectralField dirichlet_3d(const Grid& g, int r) {
  if (r < 0) throw std::invalid_argument("dirichlet_3d: r < 0");
  if (r > g.kmax()) throw BandOverflow("dirichlet_3d: r exceeds grid band");
  const double c = std::pow(2.0 * r + 1.0, -1.5);
  SpectralField D(g, 1);
  D.reserve(std::size_t(2 * r + 1) * (2 * r + 1) * (2 * r + 1));
  const cplx v = c;
  for (int x = -r; x <= r; ++x)
    for (int y = -r; y <= r; ++y)
      for (int z = -r; z <= r; ++z) D.append_sorted(pack({x, y, z}), &v);
  return D;
}

namespace {

struct Frame {
  IVec3 e1, e2, e3;  // integer lattice generators N0*(xi, A, xi x A) of the + partner
};

Frame positive_frame(const Direction& d) {
  const int s = d.positive ? 1 : -1;
  Frame f;
  for (int i = 0; i < 3; ++i) {
    f.e1[i] = s * d.xi_num[i];
    f.e2[i] = d.A_num[i];
    f.e3[i] = s * d.xiA_num[i];
  }
  return f;
}

// Kernel lattice coefficients c(j,k,l) placed at ls*(j e1 + k e2 + l e3) with
// phase e^{i j omega t}; `radius` bounds |j|,|k|,|l|.
template <class Coef>
FieldJet lattice_field(const Grid& g, const Direction& d, const IntermittencyParams& p, double t, int radius,
                       Coef&& coef) {
  const Frame fr = positive_frame(d);
  const int ls = p.lambda_sigma;
  FieldJet out{SpectralField(g, 1), SpectralField(g, 1)};
  const std::size_t n = std::size_t(2 * radius + 1) * (2 * radius + 1) * (2 * radius + 1);
  out.value.reserve(n);
  out.rate.reserve(n);
  for (int j = -radius; j <= radius; ++j) {
    const double w = j * p.omega();
    const cplx phase = std::polar(1.0, w * t);
    for (int k = -radius; k <= radius; ++k)
      for (int l = -radius; l <= radius; ++l) {
        const double c = coef(j, k, l);
        if (c == 0) continue;
        const Wavevector kv{ls * (j * fr.e1[0] + k * fr.e2[0] + l * fr.e3[0]),
                            ls * (j * fr.e1[1] + k * fr.e2[1] + l * fr.e3[1]),
                            ls * (j * fr.e1[2] + k * fr.e2[2] + l * fr.e3[2])};
        const cplx v = c * phase;
        const cplx dv = cplx(0, w) * v;
        out.value.push(kv, &v);
        out.rate.push(kv, &dv);
      }
  }
  out.value.finalize();
  out.rate.finalize();
  return out;
}

}  // namespace

FieldJet build_eta(const Grid& g, const Direction& d, const IntermittencyParams& p, double t) {
  p.validate(false);
  const double c = std::pow(2.0 * p.r + 1.0, -1.5);
  return lattice_field(g, d, p, t, p.r, [c](int, int, int) { return c; });
}

FieldJet build_eta_squared(const Grid& g, const Direction& d, const IntermittencyParams& p, double t) {
  p.validate(false);
  // D_r^2 coefficient at m: (2r+1)^{-3} prod_i (2r+1-|m_i|).
  const int r = p.r;
  const double c = std::pow(2.0 * r + 1.0, -3.0);
  return lattice_field(g, d, p, t, 2 * r, [=](int j, int k, int l) {
    return c * (2 * r + 1 - std::abs(j)) * (2 * r + 1 - std::abs(k)) * (2 * r + 1 - std::abs(l));
  });
}

double check_transport(const Grid& g, const Direction& d, const IntermittencyParams& p, double t) {
  const FieldJet eta = build_eta(g, d, p, t);
  const double sign = d.positive ? 1.0 : -1.0;
  double res = 0;
  for (std::size_t i = 0; i < eta.value.modes(); ++i) {
    const Wavevector k = eta.value.k(i);
    const double xk = d.xi[0] * k.x + d.xi[1] * k.y + d.xi[2] * k.z;
    const cplx lhs = eta.rate.row(i)[0] / p.mu;
    const cplx rhs = sign * cplx(0, xk) * eta.value.row(i)[0];
    res = std::max(res, std::abs(lhs - rhs));
  }
  return res;
}

SpectralField shift_times_vector(const SpectralField& scalar, const Direction& d, int lambda,
                                 const std::array<cplx, 3>& vec, bool throw_on_overflow) {
  if (scalar.components() != 1) throw std::invalid_argument("shift_times_vector: scalar input");
  Wavevector s;
  int* ss[3] = {&s.x, &s.y, &s.z};
  for (int c = 0; c < 3; ++c) {
    if ((lambda * d.xi_num[c]) % d.den != 0) throw std::invalid_argument("lambda*xi not integer");
    *ss[c] = lambda * d.xi_num[c] / d.den;
  }
  const Grid& g = scalar.grid();
  SpectralField out(g, 3);
  out.reserve(scalar.modes());
  cplx buf[3];
  for (std::size_t i = 0; i < scalar.modes(); ++i) {
    const Wavevector k = scalar.k(i) + s;
    if (!g.contains(k)) {
      if (throw_on_overflow) throw BandOverflow("wave support exceeds grid band; use a smaller lambda or larger n");
      continue;
    }
    const cplx v = scalar.row(i)[0];
    for (int c = 0; c < 3; ++c) buf[c] = v * vec[c];
    out.append_sorted(pack(k), buf);
  }
  return out;
}

FieldJet intermittent_wave(const Grid& g, const Direction& d, cplx a, const IntermittencyParams& p, double t) {
  const FieldJet eta = build_eta(g, d, p, t);
  const std::array<cplx, 3> v = {a * d.B[0], a * d.B[1], a * d.B[2]};
  return {shift_times_vector(eta.value, d, p.lambda, v, true), shift_times_vector(eta.rate, d, p.lambda, v, true)};
}

FieldJet intermittent_pair(const Grid& g, const DirectionSet& ds, std::size_t pair, cplx a,
                           const IntermittencyParams& p, double t) {
  const FieldJet plus = intermittent_wave(g, ds.directions[2 * pair], a, p, t);
  const FieldJet minus = intermittent_wave(g, ds.directions[2 * pair + 1], std::conj(a), p, t);
  return {plus.value + minus.value, plus.rate + minus.rate};
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw std::invalid_argument("fit_loglog: need >= 3 sweep points");
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  SlopeFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  return f;
}

namespace {

Grid grid_for(int support) {
  int n = 16;
  while (n / 2 - 1 < support) n *= 2;
  return Grid(n);
}

int wave_support(const Direction& d, const IntermittencyParams& p) {
  int m = 0;
  const Frame fr = positive_frame(d);
  for (int c = 0; c < 3; ++c) {
    const int base = std::abs(p.lambda * d.xi_num[c] / d.den);
    const int spread = p.lambda_sigma * p.r * (std::abs(fr.e1[c]) + std::abs(fr.e2[c]) + std::abs(fr.e3[c]));
    m = std::max(m, base + spread);
  }
  return m;
}

double predicted_r_exponent(double p) { return std::isinf(p) ? 1.5 : 1.5 - 3.0 / p; }

}  // namespace

std::vector<SweepRow> lp_scaling_sweep(const DirectionSet& ds, const SweepSpec& spec) {
  if (spec.r_values.size() < 3 || spec.lambda_values.size() < 3 || spec.mu_values.size() < 3)
    throw std::invalid_argument("lp_scaling_sweep: insufficient sweep points");
  std::vector<SweepRow> rows;
  const Direction& d = ds.directions[0];

  // r-exponents of the kernel and of the real wave pair.
  std::vector<std::vector<double>> dn(spec.p_values.size()), wn(spec.p_values.size());
  std::vector<double> rs;
  for (int r : spec.r_values) {
    rs.push_back(r);
    const Grid g = grid_for(r);
    auto nd = lp_norms(dirichlet_3d(g, r), spec.p_values);
    for (std::size_t i = 0; i < spec.p_values.size(); ++i) dn[i].push_back(nd[spec.p_values[i]]);
    if (spec.include_wave) {
      IntermittencyParams p;
      p.lambda = spec.wave_lambda;
      p.lambda_sigma = 1;
      p.r = r;
      p.mu = std::pow(double(p.lambda), 1.25);
      p.N0 = ds.N0;
      p.validate();
      const Grid gw = grid_for(wave_support(d, p));
      const FieldJet w = intermittent_pair(gw, ds, 0, 1.0, p, 0.0);
      auto nw = lp_norms(w.value, spec.p_values);
      for (std::size_t i = 0; i < spec.p_values.size(); ++i) wn[i].push_back(nw[spec.p_values[i]]);
    }
  }
  for (std::size_t i = 0; i < spec.p_values.size(); ++i) {
    const double p = spec.p_values[i];
    SweepRow row{"D_r", "r", p, rs, dn[i], fit_loglog(rs, dn[i]).slope, predicted_r_exponent(p)};
    rows.push_back(row);
    if (spec.include_wave) {
      SweepRow wr{"W_xi", "r", p, rs, wn[i], fit_loglog(rs, wn[i]).slope, predicted_r_exponent(p)};
      rows.push_back(wr);
    }
  }

  // One spatial derivative against lambda, sigma fixed.
  {
    SweepRow row{"W_xi", "lambda", 2.0, {}, {}, 0, 1.0};
    for (int lam : spec.lambda_values) {
      IntermittencyParams p;
      p.lambda = lam;
      const double ls = lam * spec.lambda_sigma_over_lambda;
      p.lambda_sigma = int(std::lround(ls));
      if (std::abs(ls - p.lambda_sigma) > 1e-12) throw std::invalid_argument("lambda sweep: lambda*sigma not integer");
      p.r = spec.fixed_r;
      p.mu = spec.fixed_mu;
      p.N0 = ds.N0;
      p.validate();
      const Grid g = grid_for(wave_support(d, p));
      const FieldJet w = intermittent_pair(g, ds, 0, 1.0, p, 0.0);
      row.x.push_back(lam);
      row.norm.push_back(l2_norm(gradient(w.value)));
    }
    row.slope = fit_loglog(row.x, row.norm).slope;
    rows.push_back(row);
  }
  // One time derivative against mu.
  {
    SweepRow row{"W_xi", "mu", 2.0, {}, {}, 0, 1.0};
    for (double mu : spec.mu_values) {
      IntermittencyParams p;
      p.lambda = spec.lambda_values[0];
      p.lambda_sigma = int(std::lround(p.lambda * spec.lambda_sigma_over_lambda));
      p.r = spec.fixed_r;
      p.mu = mu;
      p.N0 = ds.N0;
      p.validate();
      const Grid g = grid_for(wave_support(d, p));
      const FieldJet w = intermittent_pair(g, ds, 0, 1.0, p, 0.3);
      row.x.push_back(mu);
      row.norm.push_back(l2_norm(w.rate));
    }
    row.slope = fit_loglog(row.x, row.norm).slope;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hallci
