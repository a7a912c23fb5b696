#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "hallci/beltrami.hpp"
#include "hallci/intermittent.hpp"
#include "hallci/iteration.hpp"
#include "hallci/perturbation.hpp"
#include "hallci/snapshot.hpp"
#include "hallci/transform.hpp"
#include "report.hpp"
#include "suite.hpp"

using namespace hallci;
using namespace hallci::cli;

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out;
  int threads = 0;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config_path, "key=value configuration file");
  sub->add_option("--set", c.sets, "override one key, key=value (repeatable)");
  sub->add_option("--out", c.out, "output directory (overrides output_dir)");
  sub->add_option("--threads", c.threads, "thread cap (overrides threads); transforms are single-threaded")->check(CLI::PositiveNumber);
}

RunConfig resolve(const Common& c) {
  RunConfig cfg;
  if (!c.config_path.empty()) {
    if (!std::filesystem::is_regular_file(c.config_path))
      throw InputError("cannot read config '" + c.config_path + "'");
    cfg.load(c.config_path);
  }
  cfg.set_all(c.sets);
  if (!c.out.empty()) cfg.output_dir = c.out;
  if (c.threads > 0) cfg.threads = c.threads;
  set_thread_cap(cfg.threads);
  return cfg;
}

void put(const RunConfig& cfg, const std::string& name, const std::string& text) {
  try {
    write_file(cfg.output_dir, name, text);
  } catch (const std::exception& e) {
    throw OutputError(e.what());
  }
}

void snap(const RunConfig& cfg, const std::string& name, const SpectralField& f) {
  try {
    std::filesystem::create_directories(cfg.output_dir);
    write_snapshot((std::filesystem::path(cfg.output_dir) / name).string(), f);
  } catch (const std::exception& e) {
    throw OutputError(e.what());
  }
}

EnergyProfile profile_from(const std::string& path, double constant, double T) {
  if (path.empty()) return EnergyProfile::constant(constant, T);
  try {
    return EnergyProfile::load(path);
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string timing_text(const std::vector<std::pair<std::string, double>>& phases) {
  std::ostringstream os;
  for (const auto& [name, s] : phases) os << name << " " << fmt(s) << "\n";
  return os.str();
}

int verdict(bool failed, bool degraded) {
  if (failed) {
    std::cout << "status: FAILED\n";
    return kInvariant;
  }
  std::cout << (degraded ? "status: degraded\n" : "status: ok\n");
  return kOk;
}

// ---- subcommands

int cmd_suite(const std::vector<int>& only, std::uint64_t seed, bool require_pass) {
  SuiteOptions opt;
  opt.seed = seed;
  opt.only = only;
  opt.on_result = [](const CriterionResult& r) { std::cout << format_line(r) << std::endl; };
  const auto results = run_suite(opt);
  bool hard = true, all = true;
  for (const auto& r : results) {
    hard = hard && r.hard_ok;
    all = all && r.pass;
  }
  std::cout << "hard: " << (hard ? "ok" : "FAILED") << ", all criteria: " << (all ? "pass" : "not all pass") << "\n";
  return (require_pass ? all : hard) ? kOk : kInvariant;
}

int cmd_dump_directions(const RunConfig& cfg) {
  CsvWriter w({"family", "index", "pair", "positive", "xi_x", "xi_y", "xi_z", "A_x", "A_y", "A_z", "N0", "eps_gamma",
               "positivity_radius"});
  const auto& fam = direction_families();
  for (std::size_t f = 0; f < fam.size(); ++f) {
    const GammaSolver gs(fam[f]);
    const double rad = gs.positivity_radius();
    for (std::size_t i = 0; i < fam[f].size(); ++i) {
      const Direction& d = fam[f].directions[i];
      w << int(f) << i << d.pair << (d.positive ? "1" : "0") << d.xi[0] << d.xi[1] << d.xi[2] << d.A[0] << d.A[1]
        << d.A[2] << fam[f].N0 << fam[f].eps_gamma << rad;
      w.end_row();
    }
  }
  put(cfg, "directions.csv", w.str());
  std::cout << w.str();
  return kOk;
}

struct WaveArgs {
  int family = 0, pair = 0, level = 1;
  double t = 0;
  bool snapshot = false;
};

int cmd_build_wave(const RunConfig& cfg, const WaveArgs& a) {
  const auto& fam = direction_families();
  if (a.family < 0 || std::size_t(a.family) >= fam.size()) throw std::invalid_argument("--family out of range");
  const DirectionSet& ds = fam[std::size_t(a.family)];
  if (a.pair < 0 || std::size_t(a.pair) >= ds.pairs()) throw std::invalid_argument("--pair out of range");
  if (a.level < 1 || std::size_t(a.level) > cfg.hall.schedule.waves.size())
    throw std::invalid_argument("--level has no desk wave parameters");
  const IntermittencyParams& p = cfg.hall.schedule.waves[std::size_t(a.level - 1)];
  const Grid g(cfg.hall.n);
  const FieldJet W = intermittent_pair(g, ds, std::size_t(a.pair), cplx(1.0), p, a.t);

  // Beltrami part alone, for the curl eigen-residual.
  std::vector<cplx> amp(ds.size(), cplx(0));
  amp[2 * std::size_t(a.pair)] = amp[2 * std::size_t(a.pair) + 1] = 1.0;
  const SpectralField belt = beltrami_wave(g, ds, amp, p.lambda);
  const double curl_res = max_abs_coeff(curl(belt) - double(p.lambda) * belt) / (p.lambda * max_abs_coeff(belt));

  CsvWriter w({"family", "pair", "lambda", "lambda_sigma", "r", "mu", "t", "l2", "l1", "l4", "linf", "div",
               "beltrami_curl_residual", "modes"});
  auto nr = lp_norms(W.value, {1.0, 2.0, 4.0, kInf});
  w << a.family << a.pair << p.lambda << p.lambda_sigma << p.r << p.mu << a.t << nr[2.0] << nr[1.0] << nr[4.0]
    << nr[kInf] << max_abs_coeff(divergence(W.value)) << curl_res << W.value.modes();
  w.end_row();
  put(cfg, "wave.csv", w.str());
  std::cout << w.str();
  if (a.snapshot) snap(cfg, "wave.snp", W.value);
  return curl_res < cfg.hall.tol.curl_consistency ? kOk : kInvariant;
}

int cmd_sweep_norms(const RunConfig& cfg) {
  const auto rows = lp_scaling_sweep(direction_families()[0], SweepSpec{});
  CsvWriter w({"family", "variable", "p", "slope", "predicted", "x", "norm"});
  for (const SweepRow& r : rows) {
    std::string xs, ns;
    for (std::size_t k = 0; k < r.x.size(); ++k) {
      xs += (k ? ";" : "") + fmt(r.x[k]);
      ns += (k ? ";" : "") + fmt(r.norm[k]);
    }
    w << r.family << r.variable << r.p << r.slope << r.predicted << xs << ns;
    w.end_row();
  }
  put(cfg, "sweep.csv", w.str());
  std::cout << w.str();
  return kOk;
}

struct IncrementArgs {
  double energy = 1.0, t = 0.0;
  bool snapshot = false;
};

// Level-one increment from the zero state at one instant.
int cmd_build_increment(const RunConfig& cfg, const IncrementArgs& a) {
  const DeskSchedule& sch = cfg.hall.schedule;
  sch.validate();
  if (sch.waves.empty()) throw std::invalid_argument("the schedule has no levels");
  const Grid g(cfg.hall.n);
  CutoffConfig cc;
  cc.delta_next = sch.delta(1);
  cc.lambda_q = sch.lambda(0);
  cc.eps_R = sch.eps_R;
  cc.c0 = sch.c0;
  cc.ell = sch.ell;
  const CutoffPartition cp = build_cutoffs_zero(g, cc);
  const double rho = pumping_rho(a.energy, 0.0, cp, sch.delta(1));
  AmplitudeConfig ac;
  ac.amp_band = sch.band(0);
  const AmplitudeSet amps = build_amplitudes(cp, rho, direction_families(), ac);
  const Increment inc = build_increment(g, amps, direction_families(), sch.waves[0], a.t);
  const IncrementChecks ch = check_increment(inc);
  const IncrementNorms nm = increment_norm_suite(inc, sch.delta(1));

  CsvWriter w({"t", "E", "rho", "lambda", "mu", "div_vpc", "div_v", "div_w", "curl_v_minus_w", "lambda_vp", "curl_wp",
               "wp_l2", "wc_l2", "wt_l2", "vp_l2", "w_l2", "v_l2", "wp_over_delta", "wc_over_wp", "wt_over_wp"});
  w << a.t << a.energy << rho << inc.lambda << inc.mu << ch.div_vpc << ch.div_v << ch.div_w << ch.curl_v_minus_w
    << ch.lambda_vp << ch.curl_wp << nm.wp_l2 << nm.wc_l2 << nm.wt_l2 << nm.vp_l2 << nm.w_l2 << nm.v_l2
    << nm.wp_over_delta << nm.wc_over_wp << nm.wt_over_wp;
  w.end_row();
  put(cfg, "increment.csv", w.str());
  std::cout << w.str();
  if (a.snapshot) {
    snap(cfg, "increment_v.snp", inc.v().value);
    snap(cfg, "increment_w.snp", inc.w().value);
  }
  const double tol = cfg.hall.tol.divergence;
  const bool ok = ch.div_vpc <= tol && ch.div_v <= tol && ch.div_w <= tol &&
                  ch.curl_v_minus_w <= cfg.hall.tol.curl_consistency;
  return ok ? kOk : kInvariant;
}

// One level from the zero state, one slice, with the full stress split.
int cmd_assemble_stress(RunConfig cfg, const IncrementArgs& a) {
  cfg.hall.slices = {a.t};
  const auto t0 = std::chrono::steady_clock::now();
  const HallRun run = run_hall(EnergyProfile::constant(a.energy, std::max(1.0, a.t)), 1, cfg.hall);
  put(cfg, "levels.csv", hall_levels_csv(run.levels));
  put(cfg, "stress_parts.csv", stress_parts_csv(run.levels));
  put(cfg, "invariants.csv", invariants_csv(run.levels));
  put(cfg, "timing.txt", timing_text({{"assemble", seconds_since(t0)}}));
  std::cout << stress_parts_csv(run.levels);
  if (a.snapshot) snap(cfg, "stress_R.snp", run.state[0].R);
  for (const auto& lr : run.levels)
    for (const auto& f : lr.failures) std::cout << "hard failure: " << f << "\n";
  return verdict(run.failed, run.degraded);
}

struct HallArgs {
  int levels = 2;
  std::string profile, profile2;
  double energy = 1.0, energy2 = -1.0;
};

void write_snapshots(const RunConfig& cfg, int level, const std::vector<SliceState>& state) {
  for (std::size_t k = 0; k < state.size(); ++k) {
    const std::string base = "level" + std::to_string(level) + "_t" + std::to_string(k) + "_";
    snap(cfg, base + "B.snp", state[k].B.value);
    snap(cfg, base + "J.snp", state[k].J.value);
    snap(cfg, base + "R.snp", state[k].R);
  }
}

int cmd_run_hall(const RunConfig& cfg, const HallArgs& a) {
  if (a.levels < 0) throw std::invalid_argument("--levels must be nonnegative");
  const double T = cfg.hall.slices.empty() ? 1.0 : std::max(1.0, cfg.hall.slices.back());
  const EnergyProfile E = profile_from(a.profile, a.energy, T);
  put(cfg, "config.txt", cfg.echo());

  std::vector<std::pair<std::string, double>> phases;
  auto t0 = std::chrono::steady_clock::now();
  HallRun run = start_hall(cfg.hall);
  phases.emplace_back("start", seconds_since(t0));
  for (int q = 0; q < a.levels; ++q) {
    t0 = std::chrono::steady_clock::now();
    hall_step(run, E, cfg.hall);
    phases.emplace_back("level" + std::to_string(q + 1), seconds_since(t0));
    std::cout << "level " << q + 1 << " done (" << fmt(phases.back().second) << " s)" << std::endl;
    if (cfg.snapshots) write_snapshots(cfg, q + 1, run.state);
  }
  put(cfg, "levels.csv", hall_levels_csv(run.levels));
  put(cfg, "stress_parts.csv", stress_parts_csv(run.levels));
  put(cfg, "energy.csv", energy_csv(energy_report(run.levels, cfg.hall.tol.gap_slack)));
  put(cfg, "invariants.csv", invariants_csv(run.levels));
  put(cfg, "summary.csv", hall_summary_csv(run));
  put(cfg, "timing.txt", timing_text(phases));
  for (const auto& lr : run.levels) {
    for (const auto& f : lr.failures) std::cout << "hard failure: level " << lr.level << ": " << f << "\n";
    for (const auto& f : lr.degraded) std::cout << "degraded: level " << lr.level << ": " << f << "\n";
  }
  return verdict(run.failed, run.degraded);
}

double l2_distance(const SpectralField& a, const SpectralField& b) { return l2_norm(a - b); }

int cmd_run_hmhd(const RunConfig& cfg, const HallArgs& a) {
  if (a.levels < 0) throw std::invalid_argument("--levels must be nonnegative");
  const HmhdConfig hc = cfg.hmhd();
  const double T = std::max(1.0, hc.nse.T);
  const EnergyProfile E = profile_from(a.profile, a.energy, T);
  const bool second = !a.profile2.empty() || a.energy2 >= 0;
  std::optional<EnergyProfile> E2;
  if (second) E2 = profile_from(a.profile2, a.energy2 >= 0 ? a.energy2 : a.energy, T);
  put(cfg, "config.txt", cfg.echo());

  std::vector<std::pair<std::string, double>> phases;
  auto run_one = [&](const EnergyProfile& P, const std::string& tag) {
    HmhdRun run = start_hmhd(hc);
    for (int q = 0; q < a.levels; ++q) {
      const auto t0 = std::chrono::steady_clock::now();
      hmhd_step(run, P, hc);
      phases.emplace_back(tag + "level" + std::to_string(q + 1), seconds_since(t0));
      std::cout << tag << "level " << q + 1 << " done (" << fmt(phases.back().second) << " s)" << std::endl;
    }
    return run;
  };
  const HmhdRun run = run_one(E, "");
  std::vector<LevelReport> hall_levels;
  for (const auto& lv : run.levels) hall_levels.push_back(lv.hall);
  put(cfg, "hmhd.csv", hmhd_csv(run));
  put(cfg, "levels.csv", hall_levels_csv(hall_levels));
  put(cfg, "stress_parts.csv", stress_parts_csv(hall_levels));
  put(cfg, "invariants.csv", invariants_csv(hall_levels));
  if (cfg.snapshots && !run.levels.empty()) {
    const Grid g(hc.hall.n);
    snap(cfg, "u_T.snp", run.u);
    snap(cfg, "B_T.snp", magnetic_field(run, g, hc.nse.T));
  }

  bool failed = run.failed, degraded = run.degraded;
  if (E2) {
    const HmhdRun other = run_one(*E2, "second ");
    failed = failed || other.failed;
    degraded = degraded || other.degraded;
    const Grid g(hc.hall.n);
    const double du = l2_distance(run.u, other.u);
    const double dB = l2_distance(magnetic_field(run, g, hc.nse.T), magnetic_field(other, g, hc.nse.T));
    CsvWriter w({"du_l2", "dB_l2", "distance", "failed_first", "failed_second"});
    w << du << dB << std::hypot(du, dB) << int(run.failed) << int(other.failed);
    w.end_row();
    put(cfg, "uniqueness.csv", w.str());
    std::cout << w.str();
  }
  put(cfg, "timing.txt", timing_text(phases));
  return verdict(failed, degraded);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale convex integration for the Hall and Hall-MHD equations"};
  app.require_subcommand(1);
  Common common;

  auto* verify = app.add_subcommand("verify-identities", "machine-precision suites (criteria 1-3)");
  auto* dirs = app.add_subcommand("dump-directions", "direction catalog with eps_gamma");
  auto* wave = app.add_subcommand("build-wave", "one intermittent wave pair and its norms");
  auto* sweep = app.add_subcommand("sweep-norms", "Lp scaling sweeps and fitted exponents");
  auto* incr = app.add_subcommand("build-increment", "level-one increment from the zero state");
  auto* stress = app.add_subcommand("assemble-stress", "level-one stress split from the zero state");
  auto* hall = app.add_subcommand("run-hall", "iterate the Hall scheme");
  auto* hmhd = app.add_subcommand("run-hmhd", "iterate the Hall-MHD scheme");
  auto* self = app.add_subcommand("selftest", "all ten acceptance criteria");
  for (auto* s : {verify, dirs, wave, sweep, incr, stress, hall, hmhd, self}) add_common(s, common);

  WaveArgs wa;
  wave->add_option("--family", wa.family, "direction family (0 or 1)");
  wave->add_option("--pair", wa.pair, "pair within the family");
  wave->add_option("--level", wa.level, "desk level whose wave parameters are used");
  wave->add_option("--time", wa.t, "time");
  wave->add_flag("--snapshot", wa.snapshot, "also write wave.snp");

  IncrementArgs ia;
  for (auto* s : {incr, stress}) {
    s->add_option("--energy", ia.energy, "constant energy level E");
    s->add_option("--time", ia.t, "time");
    s->add_flag("--snapshot", ia.snapshot, "also write the fields");
  }

  HallArgs ha;
  for (auto* s : {hall, hmhd}) {
    s->add_option("--levels", ha.levels, "number of levels Q");
    s->add_option("--profile", ha.profile, "energy profile file, lines 't E'");
    s->add_option("--energy", ha.energy, "constant energy when no profile is given");
  }
  hmhd->add_option("--profile2", ha.profile2, "second profile for the uniqueness distance");
  hmhd->add_option("--energy2", ha.energy2, "second constant energy for the uniqueness distance");

  std::vector<int> only;
  self->add_option("--only", only, "run only these criteria")->check(CLI::Range(1, 10));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const RunConfig cfg = resolve(common);
    if (*verify) return cmd_suite({1, 2, 3}, cfg.seed, false);
    if (*dirs) return cmd_dump_directions(cfg);
    if (*wave) return cmd_build_wave(cfg, wa);
    if (*sweep) return cmd_sweep_norms(cfg);
    if (*incr) return cmd_build_increment(cfg, ia);
    if (*stress) return cmd_assemble_stress(cfg, ia);
    if (*hall) return cmd_run_hall(cfg, ha);
    if (*hmhd) return cmd_run_hmhd(cfg, ha);
    if (*self) return cmd_suite(only, cfg.seed, false);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  } catch (const OutputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOutput;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid: " << e.what() << "\n";
    return kUsage;
  } catch (const BandOverflow& e) {
    std::cerr << "band overflow: " << e.what() << "\n";
    return kNumerical;
  } catch (const NseError& e) {
    std::cerr << "nse: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvariant;
  }
  return kUsage;
}
