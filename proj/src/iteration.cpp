#include "hallci/iteration.hpp"

#include <algorithm>
#include <boost/math/interpolators/barycentric_rational.hpp>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hallci/norms.hpp"
#include "hallci/transform.hpp"

namespace hallci {

namespace {

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SpectralField curlcurl(const SpectralField& f) { return curl(curl(f)); }

double curl_residual(const FieldJet& B, const FieldJet& J) {
  const double s = std::max(1.0, max_abs_coeff(J.value));
  return max_abs_coeff(curl(B.value) - J.value) / s;
}

std::string level_tag(int level) { return "level " + std::to_string(level) + ": "; }

FieldJet zero_jet(const Grid& g) { return {SpectralField(g, 3), SpectralField(g, 3)}; }

FieldJet add(const FieldJet& a, const FieldJet& b) { return {a.value + b.value, a.rate + b.rate}; }

struct LevelBuild {
  Increment inc;
  FieldJet B, J;
  StressDecomposition S;
};

LevelBuild build_level(const Grid& g, const AmplitudeSet& amps, const IntermittencyParams& wave, double t,
                       const SliceState& prev, const SpectralField& extra, const HallConfig& cfg) {
  LevelBuild L;
  L.inc = build_increment(g, amps, direction_families(), wave, t);
  L.B = add(prev.B, L.inc.v());
  L.J = add(prev.J, L.inc.w());
  LinearPart lin = linear_part(L.inc, prev.B.value, prev.J.value);
  CorrectorPart cor = corrector_part(L.inc);
  OscillationPart osc = oscillation_part(L.inc, prev.R, &amps, &direction_families());
  AssembleOptions opt;
  opt.p_near_one = cfg.p_near_one;
  opt.throw_on_mismatch = false;
  opt.tolerance = cfg.tol.reassembly;
  L.S = assemble(L.B, L.J, std::move(lin), std::move(cor), std::move(osc), extra, opt);
  return L;
}

// Fills the slice columns shared by the Hall and Hall-MHD drivers.
void fill_slice(SliceReport& s, const LevelBuild& L, const AmplitudeSet& amps, const CutoffPartition& cp,
                double delta, double delta_next, double E) {
  s.E = E;
  s.mean_J_sq_after = l2_norm_sq(L.J.value) / kTorusVolume;
  s.gap_after = E - s.mean_J_sq_after;
  s.window = std::abs(s.gap_after - 0.5 * delta_next) / (0.25 * delta_next);
  s.imax = cp.imax;
  s.ball_violations = amps.ball_violations;
  s.active_points = amps.active_points;
  s.worst_ball_ratio = amps.worst_ball_ratio;
  s.energy_identity_residual = amps.energy_identity_residual;
  s.inc = increment_norm_suite(L.inc, delta);
  const double scale = std::sqrt(kTorusVolume * delta);
  s.C_w = s.inc.w_l2 / scale;
  s.C_v = L.inc.lambda * s.inc.v_l2 / scale;
  for (const PartNorm& p : L.S.norms)
    if (p.name == "total") {
      s.stress_lp = p.lp;
      s.stress_l2 = p.l2;
    }
  s.parts = L.S.norms;
  s.reassembly = L.S.reassembly;
  s.dual_route = L.S.linear.dual_route;
  s.rcorr_literal = L.S.corrector.rcorr_literal;
  s.rcorr_corrected = L.S.corrector.rcorr_corrected;
  s.lambda_vp = L.S.oscillation.lambda_vp;
  s.curl_wp = L.S.oscillation.curl_wp;
  s.mean_cancellation = L.S.oscillation.mean_cancellation;
  s.curl_consistency = curl_residual(L.B, L.J);
  s.div_B = max_abs_coeff(divergence(L.B.value));
}

void judge_slice(LevelReport& lr, const SliceReport& s, const Tolerances& tol) {
  const std::string at = " at t=" + std::to_string(s.t);
  if (!(s.reassembly <= tol.reassembly)) lr.failures.push_back("reassembly" + at);
  if (!(s.curl_consistency <= tol.curl_consistency)) lr.failures.push_back("J != curl B" + at);
  if (!(s.div_B <= tol.divergence)) lr.failures.push_back("div B" + at);
  if (!(s.dual_route <= tol.dual_route)) lr.failures.push_back("dual route" + at);
  const double d = lr.delta_next, k = tol.gap_slack;
  if (s.gap_after < -k * d || s.gap_after > (1 + k) * d) lr.degraded.push_back("energy gap range" + at);
  if (s.branch == "pump" && s.window > 1 + k) lr.degraded.push_back("energy window" + at);
  if (s.ball_violations > 0) lr.degraded.push_back("gamma ball clamped" + at);
}

void check_config(const HallConfig& cfg) {
  if (cfg.zeta != 1.0) throw std::invalid_argument("zeta must be 1 (the stress construction assumes it)");
  if (cfg.slices.empty()) throw std::invalid_argument("at least one time slice is required");
  for (std::size_t k = 1; k < cfg.slices.size(); ++k)
    if (!(cfg.slices[k] > cfg.slices[k - 1])) throw std::invalid_argument("time slices must increase");
  cfg.schedule.validate();
}

CutoffConfig cutoff_config(const DeskSchedule& s, int q) {
  CutoffConfig c;
  c.delta_next = s.delta(q + 1);
  c.lambda_q = s.lambda(q);
  c.eps_R = s.eps_R;
  c.c0 = s.c0;
  c.ell = s.ell;
  return c;
}

CutoffPartition cutoffs_of(const Grid& g, const SpectralField& R, const CutoffConfig& c) {
  return R.empty() ? build_cutoffs_zero(g, c) : build_cutoffs(R, c);
}

template <class Fn>
void with_level_context(int level, Fn&& fn) {
  try {
    fn();
  } catch (const BandOverflow& e) {
    throw BandOverflow(level_tag(level) + e.what() + " (use a smaller desk lambda or a larger grid)");
  } catch (const NseError& e) {
    throw NseError(level_tag(level) + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(level_tag(level) + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(level_tag(level) + e.what());
  }
}

}  // namespace

const std::vector<DirectionSet>& direction_families() {
  static const std::vector<DirectionSet> f = build_direction_sets(2);
  return f;
}

LevelParameters schedule(double a, double b, double beta, int q) {
  if (!(a > 1) || !(b > 1)) throw std::invalid_argument("schedule: a > 1 and b > 1 required");
  if (!(beta > 0) || !(beta < 1)) throw std::invalid_argument("schedule: 0 < beta < 1 required");
  if (q < 0) throw std::invalid_argument("schedule: q >= 0 required");
  LevelParameters p;
  p.q = q;
  const double la = std::log10(a);
  const double lq = la * std::pow(b, q), lq1 = la * std::pow(b, q + 1), l1 = la * b;
  p.log10_lambda = lq;
  p.log10_delta = 3 * beta * l1 - 2 * beta * lq;
  p.lambda = std::pow(10.0, lq);
  p.lambda_next = std::pow(10.0, lq1);
  p.delta = std::pow(10.0, p.log10_delta);
  p.r = std::pow(10.0, 0.75 * lq1);
  p.sigma = std::pow(10.0, -15.0 / 16.0 * lq);
  p.mu = std::pow(10.0, 1.25 * lq1);
  p.ell = std::pow(10.0, -20.0 * lq);
  return p;
}

double DeskSchedule::b() const {
  if (waves.empty()) return 2.0;
  return std::log(double(waves[0].lambda)) / std::log(lambda0);
}

double DeskSchedule::lambda(int q) const {
  if (q == 0) return lambda0;
  return double(waves.at(std::size_t(q - 1)).lambda);
}

double DeskSchedule::delta(int q) const {
  const double l1 = std::log(lambda0) * b();
  const double lq = std::log(lambda0) * std::pow(b(), q);
  return std::exp(3 * beta * l1 - 2 * beta * lq);
}

double DeskSchedule::band(int q) const {
  return std::size_t(q) < amp_band.size() ? amp_band[std::size_t(q)] : 2.0;
}

void DeskSchedule::validate() const {
  if (!(lambda0 > 1)) throw std::invalid_argument("lambda0 must exceed 1");
  if (!(beta > 0) || !(beta < 1)) throw std::invalid_argument("beta must lie in (0, 1)");
  if (!(eps_R > 0)) throw std::invalid_argument("eps_R must be positive");
  if (!(ell > 0)) throw std::invalid_argument("ell must be positive");
  double prev = lambda0;
  for (std::size_t q = 0; q < waves.size(); ++q) {
    try {
      waves[q].validate(true);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("desk level " + std::to_string(q + 1) + ": " + e.what());
    }
    if (!(waves[q].lambda > prev)) throw std::invalid_argument("desk lambda must increase with the level");
    prev = waves[q].lambda;
  }
  if (!waves.empty() && !(b() > 1)) throw std::invalid_argument("b = log lambda_1 / log lambda0 must exceed 1");
}

DeskSchedule desk_preset(const std::string& name) {
  DeskSchedule s;
  if (name == "hall") {
    s.lambda0 = 12;
    s.waves = {{24, 1, 2, 53.0}, {48, 1, 2, 126.0}};
  } else if (name == "hall-small" || name == "hmhd") {
    s.lambda0 = 6;
    s.waves = {{12, 1, 2, 22.0}, {24, 1, 2, 53.0}};
  } else if (name == "pump") {
    s.lambda0 = 48;
    s.waves = {{96, 1, 8, 302.0}};
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  s.validate();
  return s;
}

int preset_grid(const std::string& name) {
  if (name == "hall") return 128;
  if (name == "hall-small" || name == "hmhd") return 64;
  if (name == "pump") return 256;
  throw std::invalid_argument("unknown preset '" + name + "'");
}

EnergyProfile EnergyProfile::constant(double E, double T) {
  if (!(T > 0)) T = 1.0;
  return from_samples({0.0, T}, {E, E});
}

EnergyProfile EnergyProfile::from_samples(std::vector<double> t, std::vector<double> E) {
  if (t.size() != E.size() || t.empty()) throw std::invalid_argument("energy profile: need matching (t, E) samples");
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!std::isfinite(t[k]) || !std::isfinite(E[k])) throw std::invalid_argument("energy profile: non-finite sample");
    if (E[k] < 0) throw std::invalid_argument("energy profile: E must be nonnegative");
    if (k > 0 && !(t[k] > t[k - 1])) throw std::invalid_argument("energy profile: times must increase");
  }
  EnergyProfile p;
  p.times_ = std::move(t);
  p.values_ = std::move(E);
  const std::vector<double>& tt = p.times_;
  const std::vector<double>& vv = p.values_;
  if (tt.size() == 1) {
    const double c = vv[0];
    p.interp_ = std::make_shared<const std::function<double(double)>>([c](double) { return c; });
  } else {
    const std::size_t order = std::min<std::size_t>(3, tt.size() - 1);
    auto br = std::make_shared<boost::math::barycentric_rational<double>>(tt.begin(), tt.end(), vv.begin(), order);
    const double t0 = tt.front(), t1 = tt.back();
    p.interp_ = std::make_shared<const std::function<double(double)>>(
        [br, t0, t1](double s) { return std::max(0.0, (*br)(std::clamp(s, t0, t1))); });
  }
  return p;
}

EnergyProfile EnergyProfile::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open energy profile '" + path + "'");
  std::vector<double> t, E;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ss(line);
    double a, b;
    if (!(ss >> a)) continue;
    std::string rest;
    if (!(ss >> b) || (ss >> rest))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 't E'");
    t.push_back(a);
    E.push_back(b);
  }
  if (t.empty()) throw std::runtime_error("energy profile '" + path + "' has no samples");
  try {
    return from_samples(std::move(t), std::move(E));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

double EnergyProfile::operator()(double t) const {
  if (!interp_) throw std::logic_error("empty energy profile");
  return (*interp_)(t);
}

double EnergyProfile::max_second_difference() const {
  double m = 0;
  for (std::size_t k = 1; k + 1 < values_.size(); ++k)
    m = std::max(m, std::abs(values_[k + 1] - 2 * values_[k] + values_[k - 1]));
  return m;
}

HallRun start_hall(const HallConfig& cfg) {
  check_config(cfg);
  const Grid g(cfg.n);
  HallRun run;
  for (double t : cfg.slices) run.state.push_back({t, zero_jet(g), zero_jet(g), SpectralField(g, 6)});
  return run;
}

void hall_step(HallRun& run, const EnergyProfile& E, const HallConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const int q = int(run.levels.size());
  const int level = q + 1;
  const DeskSchedule& sch = cfg.schedule;
  if (std::size_t(q) >= sch.waves.size())
    throw std::invalid_argument("level " + std::to_string(level) + " has no desk wave parameters");
  const Grid g(cfg.n);
  const IntermittencyParams& wave = sch.waves[std::size_t(q)];
  LevelReport lr;
  lr.level = level;
  lr.lambda = wave.lambda;
  lr.lambda_sigma = wave.lambda_sigma;
  lr.r = wave.r;
  lr.mu = wave.mu;
  lr.delta = sch.delta(level);
  lr.delta_next = sch.delta(level + 1);

  with_level_context(level, [&] {
    const CutoffConfig cc = cutoff_config(sch, q);
    const std::size_t K = run.state.size();
    std::vector<CutoffPartition> cps;
    std::vector<const CutoffPartition*> ptrs;
    std::vector<double> Es(K), mj(K), ts(K);
    cps.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
      const SliceState& s = run.state[k];
      cps.push_back(cutoffs_of(g, s.R, cc));
      ts[k] = s.t;
      Es[k] = E(s.t);
      mj[k] = l2_norm_sq(s.J.value) / kTorusVolume;
    }
    for (const CutoffPartition& c : cps) ptrs.push_back(&c);
    const Rho0Result r0 = build_rho0(ts, Es, mj, ptrs, lr.delta, sch.ell);
    lr.rho0_within_bound = r0.within_bound;
    if (!r0.within_bound) lr.degraded.push_back("rho0 above 2 delta");
    for (std::size_t k = 0; k < K; ++k) {
      if (!cps[k].imax_within_bound) lr.degraded.push_back("cutoff index above the ell bound");
      const AmplitudeSet amps = build_amplitudes(cps[k], r0.rho0[k], direction_families(), {sch.band(q)});
      LevelBuild L = build_level(g, amps, wave, ts[k], run.state[k], SpectralField(), cfg);
      SliceReport s;
      s.t = ts[k];
      s.mean_J_sq_before = mj[k];
      s.gap_before = Es[k] - mj[k];
      s.branch = s.gap_before <= lr.delta / 100 ? "rest" : "pump";
      s.rho = r0.rho[k];
      s.rho0 = r0.rho0[k];
      fill_slice(s, L, amps, cps[k], lr.delta, lr.delta_next, Es[k]);
      judge_slice(lr, s, cfg.tol);
      lr.slices.push_back(std::move(s));
      run.state[k].B = std::move(L.B);
      run.state[k].J = std::move(L.J);
      run.state[k].R = std::move(L.S.total);
    }
  });

  double wmax = 0;
  for (const SliceReport& s : lr.slices) wmax = std::max(wmax, s.inc.w_l2);
  const double prev_w = run.w_partial_sums.empty() ? 0.0 : run.w_partial_sums.back();
  const double prev_d = run.delta_partial_sums.empty() ? 0.0 : run.delta_partial_sums.back();
  run.w_partial_sums.push_back(prev_w + wmax);
  run.delta_partial_sums.push_back(prev_d + std::sqrt(kTorusVolume * lr.delta));
  lr.seconds = since(t0);
  run.failed = run.failed || !lr.failures.empty();
  run.degraded = run.degraded || !lr.degraded.empty();
  run.levels.push_back(std::move(lr));
}

HallRun run_hall(const EnergyProfile& E, int Q, const HallConfig& cfg) {
  if (Q < 0) throw std::invalid_argument("level count must be >= 0");
  HallRun run = start_hall(cfg);
  for (int q = 0; q < Q; ++q) hall_step(run, E, cfg);
  return run;
}

NseResult nse_solve(const Grid& g, const MagneticTrajectory& B, const SpectralField& u0, const NseConfig& cfg) {
  if (!(cfg.dt > 0) || !(cfg.T >= 0)) throw std::invalid_argument("nse_solve: dt > 0 and T >= 0 required");
  NseResult res;
  const int steps = cfg.T > 0 ? int(std::ceil(cfg.T / cfg.dt - 1e-9)) : 0;
  const double h = steps > 0 ? cfg.T / steps : 0.0;
  SpectralField u = u0.empty() ? SpectralField(g, 3) : leray_project(u0);
  res.times.push_back(0.0);
  res.energy.push_back(0.5 * l2_norm_sq(u));
  // (1 + h |k|^2 / 2)^-1, the implicit half of the diffusion.
  auto solve_diffusion = [h](const SpectralField& f) {
    return map_modes(f, 3, [h](const Wavevector& k, const cplx* s, cplx* o) {
      const double m = 1.0 / (1.0 + 0.5 * h * k.norm2());
      for (int c = 0; c < 3; ++c) o[c] = m * s[c];
    });
  };
  for (int s = 0; s < steps; ++s) {
    const double tm = (s + 0.5) * h;
    const SpectralField Bm = B ? B(tm) : SpectralField();
    SpectralField f = SpectralField(g, 3);
    if (!Bm.empty() && Bm.modes() > 0)
      f = leray_project(divergence(dealiased_product(Bm, Bm, Product::Outer)));
    const SpectralField explicit_part = u + (0.5 * h) * laplacian(u) + h * f;
    SpectralField u1 = u;
    bool converged = false;
    int it = 0;
    for (; it < cfg.fp_max; ++it) {
      const SpectralField ub = 0.5 * (u + u1);
      const SpectralField N = leray_project(cross(ub, curl(ub)));
      SpectralField next = solve_diffusion(explicit_part + h * N);
      const double change = l2_norm(next - u1), size = l2_norm(next);
      u1 = std::move(next);
      if (change <= cfg.fp_tol * size || size == 0) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NseError("nse_solve: fixed-point iteration did not converge at step " + std::to_string(s));
    res.max_iterations = std::max(res.max_iterations, it + 1);
    const SpectralField ub = 0.5 * (u + u1);
    const double dE = (l2_norm_sq(u1) - l2_norm_sq(u)) / (2 * h);
    const double D = -inner(ub, laplacian(ub));
    const double F = inner(f, ub);
    const double scale = std::max({std::abs(dE), D, std::abs(F)});
    const double bal = scale > 0 ? std::abs(dE + D - F) / scale : 0.0;
    res.max_balance = std::max(res.max_balance, bal);
    res.max_div = std::max(res.max_div, max_abs_coeff(divergence(u1)));
    res.force_integral += h * l2_norm(f);
    const double norm = l2_norm(u1);
    if (!std::isfinite(norm) || norm > cfg.blowup)
      throw NseError("nse_solve: blow-up at t=" + std::to_string((s + 1) * h));
    if (norm > 0) {
      const double cfl = h * lp_norm(u1, kInf) * support_linf(u1);
      res.max_cfl = std::max(res.max_cfl, cfl);
      if (cfl > cfg.cfl)
        throw NseError("nse_solve: CFL number " + std::to_string(cfl) + " above " + std::to_string(cfg.cfl));
    }
    u = std::move(u1);
    res.times.push_back((s + 1) * h);
    res.energy.push_back(0.5 * l2_norm_sq(u));
  }
  res.steps = steps;
  // Pressure at T from div of the momentum equation.
  const SpectralField BT = B ? B(cfg.T) : SpectralField();
  SpectralField rhs = -1.0 * (cross(curl(u), u) + 0.5 * gradient(dot(u, u)));
  if (!BT.empty() && BT.modes() > 0) rhs += divergence(dealiased_product(BT, BT, Product::Outer));
  res.p = inverse_laplacian(divergence(rhs));
  res.u = std::move(u);
  return res;
}

SpectralField magnetic_field(const HmhdRun& run, const Grid& g, double t) {
  SpectralField B(g, 3);
  for (const auto& [amps, wave] : run.frames) B += build_increment(g, amps, direction_families(), wave, t).v().value;
  return B;
}

HmhdRun start_hmhd(const HmhdConfig& cfg) {
  check_config(cfg.hall);
  if (!(cfg.nse.T > 0)) throw std::invalid_argument("Hall-MHD horizon T must be positive");
  const Grid g(cfg.hall.n);
  HmhdRun run;
  run.at0 = {0.0, zero_jet(g), zero_jet(g), SpectralField(g, 6)};
  run.atT = {cfg.nse.T, zero_jet(g), zero_jet(g), SpectralField(g, 6)};
  run.u = SpectralField(g, 3);
  return run;
}

void hmhd_step(HmhdRun& run, const EnergyProfile& E, const HmhdConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const HallConfig& hc = cfg.hall;
  const DeskSchedule& sch = hc.schedule;
  const int q = int(run.levels.size());
  const int level = q + 1;
  if (std::size_t(q) >= sch.waves.size())
    throw std::invalid_argument("level " + std::to_string(level) + " has no desk wave parameters");
  const Grid g(hc.n);
  const IntermittencyParams& wave = sch.waves[std::size_t(q)];
  const double T = cfg.nse.T;
  HmhdLevelReport rep;
  LevelReport& lr = rep.hall;
  lr.level = level;
  lr.lambda = wave.lambda;
  lr.lambda_sigma = wave.lambda_sigma;
  lr.r = wave.r;
  lr.mu = wave.mu;
  lr.delta = sch.delta(level);
  lr.delta_next = sch.delta(level + 1);

  with_level_context(level, [&] {
    // Amplitudes are frozen at the t = 0 frame, where u_q = 0 and R^s_q = R_q.
    const CutoffPartition cp = cutoffs_of(g, run.at0.R, cutoff_config(sch, q));
    const double E0 = E(0.0);
    const double mj0 = l2_norm_sq(run.at0.J.value) / kTorusVolume;
    const Rho0Result r0 = build_rho0({0.0}, {E0}, {mj0}, {&cp}, lr.delta, sch.ell);
    lr.rho0_within_bound = r0.within_bound;
    if (!r0.within_bound) lr.degraded.push_back("rho0 above 2 delta");
    AmplitudeSet amps = build_amplitudes(cp, r0.rho0[0], direction_families(), {sch.band(q)});

    LevelBuild L0 = build_level(g, amps, wave, 0.0, run.at0, SpectralField(), hc);
    SliceReport s0;
    s0.t = 0.0;
    s0.mean_J_sq_before = mj0;
    s0.gap_before = E0 - mj0;
    s0.branch = s0.gap_before <= lr.delta / 100 ? "rest" : "pump";
    s0.rho = r0.rho[0];
    s0.rho0 = r0.rho0[0];
    fill_slice(s0, L0, amps, cp, lr.delta, lr.delta_next, E0);
    judge_slice(lr, s0, hc.tol);

    run.frames.emplace_back(amps, wave);
    const NseResult nse = nse_solve(g, [&](double t) { return magnetic_field(run, g, t); }, SpectralField(g, 3),
                                    cfg.nse);
    rep.nse_balance = nse.max_balance;
    rep.nse_div = nse.max_div;
    rep.nse_cfl = nse.max_cfl;
    rep.nse_steps = nse.steps;
    if (!(nse.max_balance <= hc.tol.nse_balance)) lr.failures.push_back("NSE energy balance");
    if (!(nse.max_div <= hc.tol.divergence)) lr.failures.push_back("div u");

    const SpectralField& u_next = nse.u;
    const SpectralField z = u_next - run.u;
    const SpectralField extra = curlcurl(cross(run.atT.B.value, run.u));
    LevelBuild LT = build_level(g, amps, wave, T, run.atT, extra, hc);
    const double mjT = l2_norm_sq(run.atT.J.value) / kTorusVolume;
    const double ET = E(T);
    SliceReport sT;
    sT.t = T;
    sT.mean_J_sq_before = mjT;
    sT.gap_before = ET - mjT;
    sT.branch = sT.gap_before <= lr.delta / 100 ? "rest" : "pump";
    sT.rho = r0.rho[0];
    sT.rho0 = r0.rho0[0];
    fill_slice(sT, LT, amps, cp, lr.delta, lr.delta_next, ET);
    judge_slice(lr, sT, hc.tol);

    const SpectralField v = LT.inc.v().value;
    const SpectralField M = cross(v, u_next) + cross(run.atT.B.value, z);
    const SpectralField Rs = traceless(LT.S.total + solenoidal_anti_divergence(curlcurl(M)));
    const SpectralField target =
        leray_project(residual_of_level(LT.B, LT.J) + curlcurl(cross(LT.B.value, u_next)));
    const SpectralField got = leray_project(divergence(sym_to_full(Rs)));
    const double tn = l2_norm(target);
    rep.reassembly_full = tn > 0 ? l2_norm(got - target) / tn : l2_norm(got);
    if (!(rep.reassembly_full <= hc.tol.reassembly)) lr.failures.push_back("full reassembly (R^s)");

    const double p = hc.p_near_one, sx = 2 * p / (2 - p);
    rep.u_l2 = l2_norm(u_next);
    rep.z_l2 = l2_norm(z);
    rep.M_lp = lp_norm(M, p);
    rep.M_l2 = l2_norm(M);
    rep.holder_bound = lp_norm(v, sx) * rep.u_l2 + lp_norm(run.atT.B.value, sx) * rep.z_l2;

    lr.slices = {std::move(s0), std::move(sT)};
    run.at0 = {0.0, std::move(L0.B), std::move(L0.J), std::move(L0.S.total)};
    run.atT = {T, std::move(LT.B), std::move(LT.J), Rs};
    run.u = u_next;
  });
  lr.seconds = since(t0);
  run.failed = run.failed || !lr.failures.empty();
  run.degraded = run.degraded || !lr.degraded.empty();
  run.levels.push_back(std::move(rep));
}

HmhdRun run_hmhd(const EnergyProfile& E, int Q, const HmhdConfig& cfg) {
  if (Q < 0) throw std::invalid_argument("level count must be >= 0");
  HmhdRun run = start_hmhd(cfg);
  for (int q = 0; q < Q; ++q) hmhd_step(run, E, cfg);
  return run;
}

std::vector<EnergyRow> energy_report(const std::vector<LevelReport>& levels, double slack) {
  std::vector<EnergyRow> rows;
  for (const LevelReport& lr : levels)
    for (const SliceReport& s : lr.slices) {
      EnergyRow r;
      r.level = lr.level;
      r.t = s.t;
      r.E = s.E;
      r.gap = s.gap_after;
      r.delta = lr.delta;
      r.delta_next = lr.delta_next;
      r.rho0 = s.rho0;
      r.branch = s.branch;
      r.in_range = s.gap_after >= -slack * lr.delta_next && s.gap_after <= (1 + slack) * lr.delta_next;
      r.window_ok = s.branch != "pump" || s.window <= 1 + slack;
      r.nonnegative = s.gap_after >= 0;
      rows.push_back(r);
    }
  return rows;
}

}  // namespace hallci
