#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hallci::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double d = 0;
  try {
    d = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size() || !std::isfinite(d)) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long i = 0;
  try {
    i = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != v.size()) throw ConfigError(key + ": expected an integer, got '" + v + "'");
  return i;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  throw ConfigError(key + ": expected 0/1/true/false, got '" + v + "'");
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

}  // namespace

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunConfig::RunConfig() { apply_preset(preset); }

void RunConfig::apply_preset(const std::string& name) {
  try {
    hall.schedule = desk_preset(name);
    hall.n = preset_grid(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("preset: ") + e.what());
  }
  preset = name;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  DeskSchedule& s = hall.schedule;
  Tolerances& t = hall.tol;
  const std::string v = trim(value);
  if (key == "preset") return apply_preset(v);
  if (key == "n") {
    const long long n = to_int(key, v);
    if (n < 8 || n > 1024 || n % 2) throw ConfigError("n: expected an even grid size in [8, 1024]");
    hall.n = int(n);
    return;
  }
  if (key == "lambda0") { s.lambda0 = to_double(key, v); return; }
  if (key == "beta") { s.beta = to_double(key, v); return; }
  if (key == "eps_R") { s.eps_R = to_double(key, v); return; }
  if (key == "c0") { s.c0 = int(to_int(key, v)); return; }
  if (key == "ell") { s.ell = to_double(key, v); return; }
  if (key == "p_near_one") { hall.p_near_one = to_double(key, v); return; }
  if (key == "zeta") { hall.zeta = to_double(key, v); return; }
  if (key == "slices") {
    std::vector<double> ts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) ts.push_back(to_double(key, trim(item)));
    if (ts.empty()) throw ConfigError("slices: at least one time is required");
    hall.slices = ts;
    return;
  }
  if (key == "nse.dt") { nse.dt = to_double(key, v); return; }
  if (key == "nse.T") { nse.T = to_double(key, v); return; }
  if (key == "nse.cfl") { nse.cfl = to_double(key, v); return; }
  if (key == "nse.blowup") { nse.blowup = to_double(key, v); return; }
  if (key == "nse.fp_tol") { nse.fp_tol = to_double(key, v); return; }
  if (key == "nse.fp_max") { nse.fp_max = int(to_int(key, v)); return; }
  if (key == "tol.curl_consistency") { t.curl_consistency = to_double(key, v); return; }
  if (key == "tol.divergence") { t.divergence = to_double(key, v); return; }
  if (key == "tol.reassembly") { t.reassembly = to_double(key, v); return; }
  if (key == "tol.dual_route") { t.dual_route = to_double(key, v); return; }
  if (key == "tol.nse_balance") { t.nse_balance = to_double(key, v); return; }
  if (key == "tol.gap_slack") { t.gap_slack = to_double(key, v); return; }
  if (key == "output_dir") { output_dir = v; return; }
  if (key == "seed") { seed = std::uint64_t(to_int(key, v)); return; }
  if (key == "threads") { threads = int(to_int(key, v)); return; }
  if (key == "snapshots") { snapshots = to_bool(key, v); return; }
  // level.K.field, K >= 1; a new level copies the previous one.
  if (key.rfind("level.", 0) == 0) {
    const auto dot = key.find('.', 6);
    if (dot == std::string::npos) throw ConfigError("unknown key '" + key + "'");
    const long long K = to_int(key, key.substr(6, dot - 6));
    if (K < 1 || K > 8) throw ConfigError(key + ": level index must lie in [1, 8]");
    const std::string field = key.substr(dot + 1);
    while (s.waves.size() < std::size_t(K)) s.waves.push_back(s.waves.empty() ? IntermittencyParams{} : s.waves.back());
    while (s.amp_band.size() < s.waves.size()) s.amp_band.push_back(2.0);
    IntermittencyParams& w = s.waves[std::size_t(K - 1)];
    if (field == "lambda") w.lambda = int(to_int(key, v));
    else if (field == "lambda_sigma") w.lambda_sigma = int(to_int(key, v));
    else if (field == "r") w.r = int(to_int(key, v));
    else if (field == "mu") w.mu = to_double(key, v);
    else if (field == "amp_band") s.amp_band[std::size_t(K - 1)] = to_double(key, v);
    else throw ConfigError("unknown key '" + key + "'");
    return;
  }
  throw ConfigError("unknown key '" + key + "'");
}

void RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  for (const auto& [k, v] : kv)
    if (k == "preset") set(k, v);
  for (const auto& [k, v] : kv)
    if (k != "preset") set(k, v);
}

void RunConfig::set_all(const std::vector<std::string>& assignments) {
  std::vector<std::pair<std::string, std::string>> kv;
  for (const std::string& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + a + "'");
    kv.emplace_back(trim(a.substr(0, eq)), a.substr(eq + 1));
  }
  for (const auto& [k, v] : kv)
    if (k == "preset") set(k, v);
  for (const auto& [k, v] : kv)
    if (k != "preset") set(k, v);
}

std::map<std::string, std::string> RunConfig::entries() const {
  const DeskSchedule& s = hall.schedule;
  const Tolerances& t = hall.tol;
  std::map<std::string, std::string> m;
  m["preset"] = preset;
  m["n"] = std::to_string(hall.n);
  m["lambda0"] = fmt(s.lambda0);
  m["beta"] = fmt(s.beta);
  m["eps_R"] = fmt(s.eps_R);
  m["c0"] = std::to_string(s.c0);
  m["ell"] = fmt(s.ell);
  m["p_near_one"] = fmt(hall.p_near_one);
  m["zeta"] = fmt(hall.zeta);
  m["slices"] = join(hall.slices);
  for (std::size_t q = 0; q < s.waves.size(); ++q) {
    const std::string p = "level." + std::to_string(q + 1) + ".";
    m[p + "lambda"] = std::to_string(s.waves[q].lambda);
    m[p + "lambda_sigma"] = std::to_string(s.waves[q].lambda_sigma);
    m[p + "r"] = std::to_string(s.waves[q].r);
    m[p + "mu"] = fmt(s.waves[q].mu);
    m[p + "amp_band"] = fmt(s.band(int(q)));
  }
  m["nse.dt"] = fmt(nse.dt);
  m["nse.T"] = fmt(nse.T);
  m["nse.cfl"] = fmt(nse.cfl);
  m["nse.blowup"] = fmt(nse.blowup);
  m["nse.fp_tol"] = fmt(nse.fp_tol);
  m["nse.fp_max"] = std::to_string(nse.fp_max);
  m["tol.curl_consistency"] = fmt(t.curl_consistency);
  m["tol.divergence"] = fmt(t.divergence);
  m["tol.reassembly"] = fmt(t.reassembly);
  m["tol.dual_route"] = fmt(t.dual_route);
  m["tol.nse_balance"] = fmt(t.nse_balance);
  m["tol.gap_slack"] = fmt(t.gap_slack);
  m["output_dir"] = output_dir;
  m["seed"] = std::to_string(seed);
  m["threads"] = std::to_string(threads);
  m["snapshots"] = snapshots ? "1" : "0";
  return m;
}

std::string RunConfig::echo() const {
  std::string s;
  for (const auto& [k, v] : entries()) s += k + "=" + v + "\n";
  return s;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  for (const std::string& h : header) cell(h);
  end_row();
}

void CsvWriter::cell(const std::string& s) {
  if (col_ > 0) out_ += ',';
  out_ += s;
  ++col_;
}

CsvWriter& CsvWriter::operator<<(double v) {
  cell(fmt(v));
  return *this;
}
CsvWriter& CsvWriter::operator<<(int v) {
  cell(std::to_string(v));
  return *this;
}
CsvWriter& CsvWriter::operator<<(std::size_t v) {
  cell(std::to_string(v));
  return *this;
}
CsvWriter& CsvWriter::operator<<(const std::string& v) {
  if (v.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (char c : v) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    cell(q + "\"");
  } else {
    cell(v);
  }
  return *this;
}

void CsvWriter::end_row() {
  if (col_ != width_) throw std::logic_error("csv row has " + std::to_string(col_) + " cells, expected " +
                                             std::to_string(width_));
  out_ += '\n';
  col_ = 0;
}

std::string hall_levels_csv(const std::vector<LevelReport>& levels) {
  CsvWriter w({"level", "t", "lambda", "lambda_sigma", "r", "mu", "delta", "delta_next", "E", "mean_J_sq_before",
               "mean_J_sq_after", "gap_before", "gap_after", "branch", "window", "rho", "rho0", "imax",
               "ball_violations", "active_points", "worst_ball_ratio", "energy_identity_residual", "wp_l2", "wc_l2",
               "wt_l2", "vp_l2", "w_l2", "v_l2", "wc_over_wp", "wt_over_wp", "lambda_vp_over_wp", "weps_over_wp",
               "C_w", "C_v", "stress_lp", "stress_l2", "reassembly", "dual_route", "rcorr_literal", "rcorr_corrected",
               "lambda_vp", "curl_wp", "mean_cancellation", "curl_consistency", "div_B"});
  for (const LevelReport& L : levels)
    for (const SliceReport& s : L.slices) {
      w << L.level << s.t << L.lambda << L.lambda_sigma << L.r << L.mu << L.delta << L.delta_next << s.E
        << s.mean_J_sq_before << s.mean_J_sq_after << s.gap_before << s.gap_after << s.branch << s.window << s.rho
        << s.rho0 << s.imax << s.ball_violations << s.active_points << s.worst_ball_ratio
        << s.energy_identity_residual << s.inc.wp_l2 << s.inc.wc_l2 << s.inc.wt_l2 << s.inc.vp_l2 << s.inc.w_l2
        << s.inc.v_l2 << s.inc.wc_over_wp << s.inc.wt_over_wp << s.inc.lambda_vp_over_wp << s.inc.weps_over_wp
        << s.C_w << s.C_v << s.stress_lp << s.stress_l2 << s.reassembly << s.dual_route << s.rcorr_literal
        << s.rcorr_corrected << s.lambda_vp << s.curl_wp << s.mean_cancellation << s.curl_consistency << s.div_B;
      w.end_row();
    }
  return w.str();
}

std::string stress_parts_csv(const std::vector<LevelReport>& levels) {
  CsvWriter w({"level", "t", "part", "lp", "l2"});
  for (const LevelReport& L : levels)
    for (const SliceReport& s : L.slices)
      for (const PartNorm& p : s.parts) {
        w << L.level << s.t << p.name << p.lp << p.l2;
        w.end_row();
      }
  return w.str();
}

std::string energy_csv(const std::vector<EnergyRow>& rows) {
  CsvWriter w({"level", "t", "E", "gap", "delta", "delta_next", "rho0", "branch", "in_range", "window_ok",
               "nonnegative"});
  for (const EnergyRow& r : rows) {
    w << r.level << r.t << r.E << r.gap << r.delta << r.delta_next << r.rho0 << r.branch << int(r.in_range)
      << int(r.window_ok) << int(r.nonnegative);
    w.end_row();
  }
  return w.str();
}

std::string invariants_csv(const std::vector<LevelReport>& levels) {
  CsvWriter w({"level", "severity", "check"});
  for (const LevelReport& L : levels) {
    for (const std::string& f : L.failures) {
      w << L.level << "hard" << f;
      w.end_row();
    }
    for (const std::string& d : L.degraded) {
      w << L.level << "soft" << d;
      w.end_row();
    }
  }
  return w.str();
}

std::string hall_summary_csv(const HallRun& run) {
  CsvWriter w({"level", "w_partial_sum", "delta_partial_sum", "max_stress_lp", "hard_failures", "soft_failures"});
  for (std::size_t q = 0; q < run.levels.size(); ++q) {
    const LevelReport& L = run.levels[q];
    double m = 0;
    for (const SliceReport& s : L.slices) m = std::max(m, s.stress_lp);
    w << L.level << run.w_partial_sums[q] << run.delta_partial_sums[q] << m << L.failures.size() << L.degraded.size();
    w.end_row();
  }
  return w.str();
}

std::string hmhd_csv(const HmhdRun& run) {
  CsvWriter w({"level", "nse_steps", "nse_balance", "nse_div", "nse_cfl", "u_l2", "z_l2", "M_lp", "M_l2",
               "holder_bound", "reassembly_full"});
  for (const HmhdLevelReport& r : run.levels) {
    w << r.hall.level << r.nse_steps << r.nse_balance << r.nse_div << r.nse_cfl << r.u_l2 << r.z_l2 << r.M_lp
      << r.M_l2 << r.holder_bound << r.reassembly_full;
    w.end_row();
  }
  return w.str();
}

void write_file(const std::string& dir, const std::string& name, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir + "': " + ec.message());
  const std::string path = (std::filesystem::path(dir) / name).string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace hallci::cli
