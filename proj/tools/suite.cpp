#include "suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "hallci/beltrami.hpp"
#include "hallci/identities.hpp"
#include "hallci/intermittent.hpp"
#include "hallci/iteration.hpp"
#include "hallci/norms.hpp"
#include "hallci/random_fields.hpp"
#include "hallci/transform.hpp"
#include "report.hpp"

namespace hallci::cli {

namespace {

std::string sci(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.2e", v);
  return b;
}

std::string fix(double v, int digits = 3) {
  char b[32];
  std::snprintf(b, sizeof b, "%.*f", digits, v);
  return b;
}

double rel_mode_defect(const Wavevector& k, const Direction& d, double unit, int r) {
  // Coordinates of k in the (xi, A, xi x A) frame, in units of lambda sigma N0.
  const double c[3] = {(d.xi[0] * k.x + d.xi[1] * k.y + d.xi[2] * k.z) / unit,
                       (d.A[0] * k.x + d.A[1] * k.y + d.A[2] * k.z) / unit,
                       (d.xiA[0] * k.x + d.xiA[1] * k.y + d.xiA[2] * k.z) / unit};
  double worst = 0;
  for (double v : c) {
    const double n = std::round(v);
    worst = std::max(worst, std::abs(v - n));
    if (std::abs(n) > r) return 1.0;
  }
  return worst;
}

CriterionResult identities(std::uint64_t seed) {
  CriterionResult R;
  R.id = 1;
  R.title = "machine-precision identity suite (n=32, 50 trials)";
  const auto t0 = std::chrono::steady_clock::now();
  const Grid g(32);
  double worst = 0;
  std::string where = "none";
  auto note = [&](const std::string& name, double v) {
    if (!(v <= worst)) {
      worst = v;
      where = name;
    }
  };
  for (unsigned s = 0; s < 50; ++s) {
    const unsigned base = unsigned(seed) + 10 * s;
    const SpectralField A = random_field(g, 3, 8, base);
    const SpectralField B = random_field(g, 3, 8, base + 1);
    const SpectralField phi = random_field(g, 1, 8, base + 2);
    for (const IdentityResidual& r : vector_identity_suite(A, B, phi)) note(r.name, r.residual);
    const SpectralField v = freq_project(random_solenoidal(g, 8, base + 3), FreqKind::NonZero);
    const SpectralField f = curl(v);
    note("curl(inverse_curl)", max_abs_coeff(curl(inverse_curl(f)) - f));
    const SpectralField F = random_field(g, 3, 10, base + 4);
    const SpectralField P = leray_project(F);
    note("leray idempotence", max_abs_coeff(leray_project(P) - P));
    note("leray divergence", max_abs_coeff(divergence(P)));
    const SpectralField Rt = anti_divergence(F);
    note("anti-divergence", max_abs_coeff(divergence(Rt) - (F - freq_project(F, FreqKind::Leq, 0.5))));
    note("anti-divergence trace", max_abs_coeff(trace(Rt)));
    for (const SpectralField& h : {curl(F), P, Rt, cross(A, B), inverse_curl(f)})
      note("conjugate symmetry", conjugate_symmetry_defect(h));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  R.hard_ok = worst < 1e-10;
  R.pass = R.hard_ok && secs < 30;
  R.detail = "max residual " + sci(worst) + " (" + where + ") [<1e-10]; " + fix(secs, 1) + " s [<30 s]";
  return R;
}

CriterionResult beltrami_suite(std::uint64_t seed) {
  CriterionResult R;
  R.id = 2;
  R.title = "Beltrami and geometric suite";
  const std::vector<DirectionSet>& fam = direction_families();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  double curl_res = 0, geo_res = 0, mean_res = 0;
  double min_gamma = 1e300;
  for (const DirectionSet& ds : fam) {
    for (int lam : {9, 24}) {
      const Grid g(64);
      std::vector<cplx> a(ds.size());
      for (std::size_t p = 0; p < ds.pairs(); ++p) {
        a[2 * p] = cplx(nd(rng), nd(rng));
        a[2 * p + 1] = std::conj(a[2 * p]);
      }
      const SpectralField W = beltrami_wave(g, ds, a, lam);
      curl_res = std::max(curl_res, max_abs_coeff(curl(W) - double(lam) * W) / max_abs_coeff(W));
    }
    GammaSolver gs(ds);
    for (int s = 0; s < 100; ++s) {
      Mat3 E;
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) E(i, j) = E(j, i) = nd(rng);
      E *= std::uniform_real_distribution<double>(0.0, 0.999)(rng) * ds.eps_gamma / E.norm();
      const Mat3 M = Mat3::Identity() + E;
      const std::vector<double> gamma = gs.gamma(M);
      for (double v : gamma) min_gamma = std::min(min_gamma, v);
      geo_res = std::max(geo_res, (gs.reconstruct(gamma) - M).norm());
    }
    const Grid g(128);
    const IntermittencyParams p{24, 1, 2, 53.0};
    for (std::size_t q = 0; q < ds.pairs(); ++q) {
      const Direction& d = ds.directions[2 * q];
      const Direction& o = ds.directions[2 * q + 1];
      const FieldJet wp = intermittent_wave(g, d, 1.0, p, 0.3);
      const FieldJet wm = intermittent_wave(g, o, 1.0, p, 0.3);
      const Eigen::Matrix3cd m = mean_outer(wp.value, wm.value);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) mean_res = std::max(mean_res, std::abs(m(i, j) - d.B[i] * o.B[j]));
    }
  }
  R.pass = curl_res < 1e-11 && geo_res < 1e-9 && mean_res < 1e-10 && min_gamma > 0;
  R.hard_ok = R.pass;
  R.detail = "curl W - lambda W " + sci(curl_res) + " [<1e-11]; geometric identity " + sci(geo_res) +
             " over 200 R in the eps_gamma=" + fix(fam[0].eps_gamma, 4) + " ball [<1e-9], min gamma " +
             sci(min_gamma) + "; mean(W_xi (x) W_-xi) - B (x) B " + sci(mean_res) + " [<1e-10]";
  return R;
}

CriterionResult intermittency_suite() {
  CriterionResult R;
  R.id = 3;
  R.title = "intermittency suite";
  double dnorm = 0, eta_mean = 0, transport = 0, support = 0;
  bool counts = true;
  for (int r : {1, 2, 4, 8, 16}) {
    const SpectralField D = dirichlet_3d(Grid(64), r);
    dnorm = std::max(dnorm, std::abs(l2_norm_sq(D) / kTorusVolume - 1.0));
    counts = counts && D.modes() == std::size_t((2 * r + 1) * (2 * r + 1) * (2 * r + 1)) && support_linf(D) == r;
  }
  const IntermittencyParams p{24, 1, 2, 53.0};
  const Grid g(128);
  const double unit = double(p.lambda_sigma) * p.N0;
  for (const DirectionSet& ds : direction_families())
    for (const Direction& d : ds.directions) {
      const FieldJet eta = build_eta(g, d, p, 0.37);
      eta_mean = std::max(eta_mean, std::abs(l2_norm_sq(eta.value) / kTorusVolume - 1.0));
      transport = std::max({transport, check_transport(g, d, p, 0.0), check_transport(g, d, p, 0.71)});
      counts = counts && eta.value.modes() == std::size_t((2 * p.r + 1) * (2 * p.r + 1) * (2 * p.r + 1));
      for (std::size_t m = 0; m < eta.value.modes(); ++m)
        support = std::max(support, rel_mode_defect(eta.value.k(m), d, unit, p.r));
      const FieldJet w = intermittent_wave(g, d, 1.0, p, 0.0);
      const Wavevector shift{int(std::lround(p.lambda * d.xi[0])), int(std::lround(p.lambda * d.xi[1])),
                             int(std::lround(p.lambda * d.xi[2]))};
      for (std::size_t m = 0; m < w.value.modes(); ++m) {
        const Wavevector k = w.value.k(m);
        support = std::max(support, rel_mode_defect({k.x - shift.x, k.y - shift.y, k.z - shift.z}, d, unit, p.r));
      }
    }
  R.pass = dnorm < 1e-12 && eta_mean < 1e-12 && transport < 1e-12 && support < 1e-12 && counts;
  R.hard_ok = R.pass;
  R.detail = "|D_r|^2/(2pi)^3 - 1 " + sci(dnorm) + " [<1e-12]; mean(eta^2) - 1 " + sci(eta_mean) +
             " [<1e-12]; transport " + sci(transport) + " [<1e-12]; support lattice defect " + sci(support) +
             ", mode counts " + (counts ? "exact" : "WRONG");
  return R;
}

CriterionResult scaling_suite() {
  CriterionResult R;
  R.id = 4;
  R.title = "scaling-law reproduction";
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<SweepRow> rows = lp_scaling_sweep(direction_families()[0], SweepSpec{});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = true;
  std::string d;
  for (const SweepRow& r : rows) {
    const bool good = std::abs(r.slope - r.predicted) <= 0.15;
    ok = ok && good;
    const std::string p = std::isinf(r.p) ? "inf" : fix(r.p, 2);
    d += (d.empty() ? "" : "; ") + r.family + "/" + r.variable + " p=" + p + " " + fix(r.slope) + " vs " +
         fix(r.predicted, 2) + (good ? "" : " (off)");
  }
  R.pass = ok && secs < 300;
  R.detail = d + " [+-0.15]; " + fix(secs, 1) + " s [<300 s]";
  return R;
}

CriterionResult closeness_suite() {
  CriterionResult R;
  R.id = 5;
  R.title = "Hall-vs-NSE closeness";
  const DirectionSet& ds = direction_families()[0];
  IntermittencyParams p{12, 1, 0, 40.0};
  const double pure = nse_closeness(Grid(64), ds, 0, p);
  p.r = 2;
  const double big = nse_closeness(Grid(128), ds, 0, p);
  p.r = 1;
  const double small = nse_closeness(Grid(128), ds, 0, p);
  const double quotient = small / big;
  const bool halves = quotient >= 0.25 && quotient <= 1.0;
  R.hard_ok = pure < 1e-10;
  R.pass = R.hard_ok && halves;
  R.detail = "pure Beltrami ratio " + sci(pure) + " [<1e-10]; sigma r 2/12 -> 1/12: ratio " + fix(big) + " -> " +
             fix(small) + ", quotient " + fix(quotient) + " [0.25, 1]";
  return R;
}

CriterionResult reassembly_suite() {
  CriterionResult R;
  R.id = 6;
  R.title = "stress reassembly";
  HallConfig c;
  c.schedule = desk_preset("hall-small");
  c.n = preset_grid("hall-small");
  c.slices = {0.02};
  const HallRun run = run_hall(EnergyProfile::constant(1.0, 1.0), 1, c);
  const SliceReport& s = run.levels.at(0).slices.at(0);
  R.hard_ok = s.reassembly < 1e-8 && s.lambda_vp < 1e-11 && s.curl_wp < 1e-11 && s.rcorr_corrected < 1e-8;
  R.pass = R.hard_ok && s.rcorr_literal < 1e-8;
  R.detail = "P_H div R vs residual " + sci(s.reassembly) + " [<1e-8]; regrouping identity as displayed " +
             sci(s.rcorr_literal) + " [<1e-8], with -(K x w^t + v^t x curl K) " + sci(s.rcorr_corrected) +
             "; W_eps1 bookkeeping " + sci(std::max(s.lambda_vp, s.curl_wp)) + " [<1e-11]; dual route " +
             sci(s.dual_route);
  return R;
}

CriterionResult pumping_suite() {
  CriterionResult R;
  R.id = 7;
  R.title = "energy pumping (lambda=96, r in {4,8,16})";
  const DeskSchedule sch = desk_preset("pump");
  const double d1 = sch.delta(1), d2 = sch.delta(2);
  const double target = 1.0 - d2 / 2;
  std::vector<double> errs;
  bool nonneg = true, in_range = true;
  std::string d;
  for (int r : {4, 8, 16}) {
    const Grid g(r <= 8 ? 256 : 512);
    const IntermittencyParams p{96, 1, r, 302.0};
    CutoffConfig cc;
    cc.delta_next = d1;
    cc.lambda_q = sch.lambda(0);
    cc.eps_R = sch.eps_R;
    cc.c0 = sch.c0;
    cc.ell = sch.ell;
    const CutoffPartition cp = build_cutoffs_zero(g, cc);
    const AmplitudeSet amps = build_amplitudes(cp, pumping_rho(1.0, 0.0, cp, d1), direction_families(), {2.0});
    double err = 0;
    for (double t : {0.0, 0.005, 0.01}) {
      const Increment inc = build_increment(g, amps, direction_families(), p, t);
      const double J2 = l2_norm_sq(inc.w().value) / kTorusVolume;
      err = std::max(err, std::abs(J2 - target) / target);
      nonneg = nonneg && 1.0 - J2 >= 0;
      in_range = in_range && 1.0 - J2 <= d1;
    }
    errs.push_back(err);
    d += (d.empty() ? "" : ", ") + std::string("r=") + std::to_string(r) + ": " + fix(err);
  }
  const bool monotone = errs[1] < errs[0] && errs[2] < errs[1];
  R.pass = errs[1] <= 0.2 && monotone && nonneg;
  R.detail = "relative error vs E - delta_2/2 = " + fix(target, 4) + " (max over t): " + d + " [r=8 <= 0.2, " +
             "decreasing in r: " + (monotone ? "yes" : "no") + "]; gap nonnegative: " + (nonneg ? "yes" : "no") +
             ", gap in [0, delta_1]: " + (in_range ? "yes" : "no");
  return R;
}

CriterionResult smallness_suite() {
  CriterionResult R;
  R.id = 8;
  R.title = "smallness trends over 2 desk levels (preset hall, n=128)";
  HallConfig c;
  c.schedule = desk_preset("hall");
  c.n = preset_grid("hall");
  c.slices = {0.0, 0.02};
  const HallRun run = run_hall(EnergyProfile::constant(1.0, 1.0), 2, c);
  std::vector<double> stress, cw;
  double wc = 0, wt = 0;
  for (const LevelReport& L : run.levels) {
    double s = 0, w = 0;
    for (const SliceReport& x : L.slices) {
      s = std::max(s, x.stress_lp);
      w = std::max(w, x.C_w);
    }
    stress.push_back(s);
    cw.push_back(w);
  }
  for (const SliceReport& x : run.levels.back().slices) {
    wc = std::max(wc, x.inc.wc_over_wp);
    wt = std::max(wt, x.inc.wt_over_wp);
  }
  const bool decreasing = stress[1] < stress[0];
  const double spread = std::max(cw[0], cw[1]) / std::min(cw[0], cw[1]);
  R.hard_ok = !run.failed;
  R.pass = decreasing && wc < 0.2 && wt < 0.2 && spread <= 2.0 && R.hard_ok;
  R.detail = "stress L^1.05 " + sci(stress[0]) + " -> " + sci(stress[1]) + " [strictly decreasing]; finest |w^c|/|w^p| " +
             fix(wc) + ", |w^t|/|w^p| " + fix(wt) + " [<0.2]; |w|/(|T^3| delta)^1/2 " + fix(cw[0]) + " -> " +
             fix(cw[1]) + " [within factor 2]; reassembly and curl checks " + (run.failed ? "FAILED" : "ok");
  return R;
}

CriterionResult hmhd_suite() {
  CriterionResult R;
  R.id = 9;
  R.title = "Hall-MHD mode (preset hmhd, 2 levels, two profiles)";
  HmhdConfig c;
  c.hall.schedule = desk_preset("hmhd");
  c.hall.n = preset_grid("hmhd");
  double bal = 0, div = 0, reas = 0;
  bool decreasing = true;
  std::string mtraj;
  HmhdRun runs[2];
  const double Es[2] = {1.0, 0.75};
  for (int k = 0; k < 2; ++k) {
    runs[k] = run_hmhd(EnergyProfile::constant(Es[k], 1.0), 2, c);
    const auto& L = runs[k].levels;
    for (const HmhdLevelReport& r : L) {
      bal = std::max(bal, r.nse_balance);
      div = std::max(div, r.nse_div);
      reas = std::max(reas, r.reassembly_full);
      for (const SliceReport& s : r.hall.slices) reas = std::max(reas, s.reassembly);
    }
    decreasing = decreasing && L[1].M_lp < L[0].M_lp;
    mtraj += (k ? "; " : "") + std::string("E=") + fix(Es[k], 2) + ": " + sci(L[0].M_lp) + " -> " + sci(L[1].M_lp);
  }
  const double du = l2_norm(runs[0].u - runs[1].u);
  const double dB = l2_norm(runs[0].atT.B.value - runs[1].atT.B.value);
  const double dJ = l2_norm(runs[0].atT.J.value - runs[1].atT.J.value);
  const double dist = std::hypot(du, dB);
  R.hard_ok = bal < 1e-6 && div < 1e-12 && reas < 1e-8;
  R.pass = R.hard_ok && decreasing && dist > 0.1;
  R.detail = "NSE energy balance " + sci(bal) + " [<1e-6]; div u " + sci(div) + " [<1e-12]; |M^eps|_L1.05 " + mtraj +
             " [decreasing]; reassembly (both checks) " + sci(reas) + " [<1e-8]; |(u,B)_1 - (u,B)_2|_2 at T " +
             fix(dist, 4) + " [>0.1] (u " + sci(du) + ", B " + sci(dB) + ", J " + sci(dJ) + ")";
  return R;
}

CriterionResult determinism_suite(double elapsed) {
  CriterionResult R;
  R.id = 10;
  R.title = "selftest wall-clock and deterministic CSV";
  HallConfig c;
  c.schedule = desk_preset("hall-small");
  c.n = preset_grid("hall-small");
  c.slices = {0.0};
  std::string out[2];
  for (int k = 0; k < 2; ++k) {
    const HallRun run = run_hall(EnergyProfile::constant(1.0, 1.0), 1, c);
    out[k] = hall_levels_csv(run.levels) + stress_parts_csv(run.levels) + energy_csv(energy_report(run.levels, 0.25));
  }
  const bool same = out[0] == out[1];
  R.hard_ok = same;
  R.pass = same && elapsed < 900;
  R.detail = std::string("repeat-run CSV ") + (same ? "byte-identical" : "DIFFERENT") + " (" +
             std::to_string(out[0].size()) + " bytes); criteria 1-9 took " + fix(elapsed, 1) + " s [<900 s]";
  return R;
}

}  // namespace

std::string format_line(const CriterionResult& r) {
  char head[64];
  std::snprintf(head, sizeof head, "criterion %2d %s ", r.id, r.pass ? "PASS" : "FAIL");
  return std::string(head) + r.title + ": " + r.detail + " (" + fix(r.seconds, 1) + " s)";
}

std::vector<CriterionResult> run_suite(const SuiteOptions& opt) {
  auto want = [&](int id) { return opt.only.empty() || std::find(opt.only.begin(), opt.only.end(), id) != opt.only.end(); };
  std::vector<CriterionResult> out;
  double elapsed = 0;
  auto run = [&](int id, const std::function<CriterionResult()>& fn) {
    if (!want(id)) return;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r.id = id;
      r.title = "criterion " + std::to_string(id);
      r.pass = false;
      r.hard_ok = false;
      r.detail = std::string("aborted: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    elapsed += r.seconds;
    if (opt.on_result) opt.on_result(r);
    out.push_back(std::move(r));
  };
  run(1, [&] { return identities(opt.seed); });
  run(2, [&] { return beltrami_suite(opt.seed); });
  run(3, [] { return intermittency_suite(); });
  run(4, [] { return scaling_suite(); });
  run(5, [] { return closeness_suite(); });
  run(6, [] { return reassembly_suite(); });
  run(7, [] { return pumping_suite(); });
  run(8, [] { return smallness_suite(); });
  run(9, [] { return hmhd_suite(); });
  const double before = elapsed;
  run(10, [&] { return determinism_suite(before); });
  return out;
}

}  // namespace hallci::cli
