#include "qlbm/harness.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qlbm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

BackendKind backend_from_string(const std::string& s) {
  if (s == "auto") return BackendKind::Auto;
  if (s == "statevector") return BackendKind::Statevector;
  if (s == "mps") return BackendKind::Mps;
  throw std::invalid_argument("config: backend must be auto|statevector|mps");
}

std::string backend_to_string(BackendKind b) {
  switch (b) {
    case BackendKind::Statevector: return "statevector";
    case BackendKind::Mps: return "mps";
    default: return "auto";
  }
}

}  // namespace

SimConfig SimConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");

  static const char* known[] = {
      "n_sites", "n_steps", "alpha", "T_bound", "T_solid", "T_melt",
      "L_over_cp", "backend", "statevector_cap", "chi_max", "sv_cutoff",
      "reinit_interval", "settling_window", "reinit_encoding",
      "ancilla_readout", "shots", "seed", "out_dir"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) {
      if (it.key() == k) ok = true;
    }
    if (!ok) throw std::invalid_argument("config: unknown key '" + it.key() + "'");
  }

  SimConfig c;
  auto get = [&j](const char* key, auto& target) {
    if (j.contains(key)) target = j.at(key).get<std::decay_t<decltype(target)>>();
  };
  get("n_sites", c.params.n_sites);
  get("n_steps", c.n_steps);
  get("alpha", c.params.alpha);
  get("T_bound", c.params.T_bound);
  get("T_solid", c.params.T_solid);
  get("T_melt", c.params.T_melt);
  get("L_over_cp", c.params.L_over_cp);
  if (j.contains("backend")) c.backend = backend_from_string(j.at("backend").get<std::string>());
  get("statevector_cap", c.statevector_cap);
  get("chi_max", c.chi_max);
  get("sv_cutoff", c.sv_cutoff);
  get("reinit_interval", c.reinit_interval);
  get("settling_window", c.settling_window);
  if (j.contains("reinit_encoding")) {
    const std::string s = j.at("reinit_encoding").get<std::string>();
    if (s == "equilibrium") c.reinit_encoding = ReinitEncoding::Equilibrium;
    else if (s == "marginal") c.reinit_encoding = ReinitEncoding::Marginal;
    else throw std::invalid_argument("config: reinit_encoding must be equilibrium|marginal");
  }
  if (j.contains("ancilla_readout")) {
    const std::string s = j.at("ancilla_readout").get<std::string>();
    if (s == "at_reinit") c.ancilla_readout = AncillaReadout::AtReinit;
    else if (s == "every_step") c.ancilla_readout = AncillaReadout::EveryStep;
    else throw std::invalid_argument("config: ancilla_readout must be at_reinit|every_step");
  }
  get("shots", c.shots);
  get("seed", c.seed);
  get("out_dir", c.out_dir);
  c.validate();
  return c;
}

SimConfig SimConfig::from_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string SimConfig::to_json_text() const {
  json j;
  j["n_sites"] = params.n_sites;
  j["n_steps"] = n_steps;
  j["alpha"] = params.alpha;
  j["T_bound"] = params.T_bound;
  j["T_solid"] = params.T_solid;
  j["T_melt"] = params.T_melt;
  j["L_over_cp"] = params.L_over_cp;
  j["backend"] = backend_to_string(backend);
  j["statevector_cap"] = statevector_cap;
  j["chi_max"] = chi_max;
  j["sv_cutoff"] = sv_cutoff;
  j["reinit_interval"] = reinit_interval;
  j["settling_window"] = settling_window;
  j["reinit_encoding"] =
      reinit_encoding == ReinitEncoding::Equilibrium ? "equilibrium" : "marginal";
  j["ancilla_readout"] =
      ancilla_readout == AncillaReadout::AtReinit ? "at_reinit" : "every_step";
  j["shots"] = shots;
  j["seed"] = seed;
  j["out_dir"] = out_dir;
  return j.dump(2);
}

std::string SimConfig::config_hash() const {
  // FNV-1a 64 over the canonical dump.
  const std::string s = to_json_text();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void SimConfig::validate() const {
  hybrid().validate();
  if (n_steps < 0) throw std::invalid_argument("config: n_steps must be >= 0");
}

HybridConfig SimConfig::hybrid() const {
  HybridConfig h;
  h.params = params;
  h.backend = backend;
  h.statevector_cap = statevector_cap;
  h.chi_max = chi_max;
  h.sv_cutoff = sv_cutoff;
  h.reinit_interval = reinit_interval;
  h.settling_window = settling_window;
  h.reinit_encoding = reinit_encoding;
  h.ancilla_readout = ancilla_readout;
  h.shots = shots;
  h.seed = seed;
  return h;
}

fs::path output_root(const SimConfig& cfg) {
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  if (const char* env = std::getenv("QLBM_OUT_ROOT")) return env;
  return "runs";
}

double rms_error(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("rms_error: length mismatch");
  if (a.empty()) throw std::invalid_argument("rms_error: empty series");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / a.size());
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) {
    out << (i ? "," : "") << header[i];
  }
  out << "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw std::invalid_argument("write_csv: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << fmt17(row[i]);
    }
    out << "\n";
  }
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) return table;
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) table.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream rs(line);
    while (std::getline(rs, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    table.rows.push_back(std::move(row));
  }
  return table;
}

void write_run_csvs(const fs::path& dir, const std::string& prefix,
                    const std::vector<StepRecord>& steps) {
  const int n = steps.empty() ? 0 : static_cast<int>(steps.front().T.size());
  std::vector<std::string> theader = {"t"};
  for (int k = 0; k < n; ++k) theader.push_back("site_" + std::to_string(k));
  std::vector<std::vector<double>> trows, irows;
  for (const StepRecord& s : steps) {
    std::vector<double> row = {static_cast<double>(s.t)};
    row.insert(row.end(), s.T.begin(), s.T.end());
    trows.push_back(std::move(row));
    const double eta = s.melting_node >= 0 ? s.eta[s.melting_node] : 0.0;
    irows.push_back({static_cast<double>(s.t), s.interface_x, eta,
                     static_cast<double>(s.melting_node)});
  }
  write_csv(dir / (prefix + "temps.csv"), theader, trows);
  write_csv(dir / (prefix + "interface.csv"), {"t", "x_I", "eta", "melting_node"}, irows);
}

void write_classical_csvs(const fs::path& dir, const std::string& prefix,
                          const std::vector<StepState>& series) {
  const int n = series.empty() ? 0 : series.front().field.n_sites();
  std::vector<std::string> theader = {"t"};
  for (int k = 0; k < n; ++k) theader.push_back("site_" + std::to_string(k));
  std::vector<std::vector<double>> trows, irows;
  for (std::size_t t = 0; t < series.size(); ++t) {
    const auto& s = series[t];
    std::vector<double> row = {static_cast<double>(t)};
    const auto temps = s.field.temperatures();
    row.insert(row.end(), temps.begin(), temps.end());
    trows.push_back(std::move(row));
    const int mn = s.ledger.melting_node ? *s.ledger.melting_node : -1;
    const double eta = mn >= 0 ? s.ledger.eta[mn] : 0.0;
    irows.push_back({static_cast<double>(t), s.ledger.interface_x(), eta,
                     static_cast<double>(mn)});
  }
  write_csv(dir / (prefix + "temps.csv"), theader, trows);
  write_csv(dir / (prefix + "interface.csv"), {"t", "x_I", "eta", "melting_node"}, irows);
}

AnalyticReference analytic_reference(const SimConfig& cfg) {
  const Params& p = cfg.params;
  if (!p.melting_enabled()) {
    throw std::domain_error("analytic_reference: no melting regime for this config");
  }
  AnalyticReference ref;
  ref.stefan = StefanParams{(p.T_bound - p.T_melt) / p.L_over_cp,
                            (p.T_melt - p.T_solid) / p.L_over_cp,
                            p.alpha,
                            static_cast<double>(p.n_sites - 1),
                            p.T_bound,
                            p.T_melt,
                            p.T_solid,
                            10};
  ref.lambda = solve_lambda(ref.stefan);
  for (int t = 0; t <= cfg.n_steps; ++t) {
    ref.interface_x.push_back(interface_position(ref.lambda.lambda, p.alpha, t));
  }
  return ref;
}

namespace {

json calibration_json(const CalibrationReport& cal) {
  json j;
  j["bare_omega"] = cal.bare_omega;
  j["bare_weights"] = cal.bare_weights;
  j["fit_rms"] = cal.fit_rms;
  j["equilibrium_fixed_point_error"] = cal.equilibrium_fixed_point_error;
  j["matched_omega"] = cal.matched_omega;
  j["matched_weights"] = cal.matched_weights;
  return j;
}

}  // namespace

ExperimentSummary run_experiment(const SimConfig& cfg) {
  cfg.validate();
  const fs::path dir = output_root(cfg) / cfg.config_hash();
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "config.json");
    out << cfg.to_json_text() << "\n";
  }

  const HybridResult q = run_hybrid(cfg.hybrid(), cfg.n_steps);
  const Params matched = matched_comparator_params(cfg.params, q.calibration);
  const auto matched_series = run(matched, cfg.n_steps);
  const auto classical_series = run(cfg.params, cfg.n_steps);

  write_run_csvs(dir, "qlbm_", q.steps);
  write_classical_csvs(dir, "matched_classical_", matched_series);
  write_classical_csvs(dir, "classical_", classical_series);

  ExperimentSummary sum;
  sum.run_dir = dir;
  sum.calibration = q.calibration;
  sum.reinit_count = q.reinit_count;
  sum.used_mps = q.used_mps;
  sum.truncation_error = q.steps.back().truncation_error;
  sum.final_T = q.steps.back().T;

  std::vector<std::vector<double>> err_rows;
  std::vector<double> xI_diffs;
  for (int t = 0; t <= cfg.n_steps; ++t) {
    const double rt = rms_error(q.steps[t].T, matched_series[t].field.temperatures());
    const double dx = q.steps[t].interface_x - matched_series[t].ledger.interface_x();
    err_rows.push_back({static_cast<double>(t), rt, std::abs(dx)});
    sum.max_rms_T = std::max(sum.max_rms_T, rt);
    sum.max_abs_xI_err = std::max(sum.max_abs_xI_err, std::abs(dx));
    xI_diffs.push_back(dx);
  }
  sum.rms_xI = rms_error(xI_diffs, std::vector<double>(xI_diffs.size(), 0.0));
  write_csv(dir / "errors.csv", {"t", "rms_T", "rms_xI"}, err_rows);

  if (cfg.params.melting_enabled()) {
    const AnalyticReference ref = analytic_reference(cfg);
    std::vector<std::vector<double>> arows;
    for (int t = 0; t <= cfg.n_steps; ++t) {
      arows.push_back({static_cast<double>(t), ref.interface_x[t]});
      if (classical_series[t].ledger.melting_node) {
        sum.classical_vs_analytic_max_xI_err =
            std::max(sum.classical_vs_analytic_max_xI_err,
                     std::abs(classical_series[t].ledger.interface_x() -
                              ref.interface_x[t]));
      }
    }
    write_csv(dir / "analytic_interface.csv", {"t", "x_I"}, arows);
  }

  json s;
  s["max_rms_T"] = sum.max_rms_T;
  s["rms_xI"] = sum.rms_xI;
  s["max_abs_xI_err"] = sum.max_abs_xI_err;
  s["classical_vs_analytic_max_xI_err"] = sum.classical_vs_analytic_max_xI_err;
  s["truncation_error"] = sum.truncation_error;
  s["reinit_count"] = sum.reinit_count;
  s["used_mps"] = sum.used_mps;
  s["calibration"] = calibration_json(sum.calibration);
  std::ofstream out(dir / "summary.json");
  out << s.dump(2) << "\n";
  return sum;
}

ReinitStudySummary compare_reinit_schedules(const SimConfig& cfg) {
  SimConfig c1 = cfg;
  c1.reinit_interval = 1;
  SimConfig c12 = cfg;
  c12.reinit_interval = 12;

  ReinitStudySummary out;
  out.interval_1 = run_experiment(c1);
  out.interval_12 = run_experiment(c12);
  out.final_field_rms_diff = rms_error(out.interval_1.final_T, out.interval_12.final_T);

  const fs::path dir = output_root(cfg) / (cfg.config_hash() + "_reinit_study");
  fs::create_directories(dir);
  json s;
  s["interval_1"] = {{"max_rms_T", out.interval_1.max_rms_T},
                     {"rms_xI", out.interval_1.rms_xI},
                     {"reinit_count", out.interval_1.reinit_count},
                     {"run_dir", out.interval_1.run_dir.string()}};
  s["interval_12"] = {{"max_rms_T", out.interval_12.max_rms_T},
                      {"rms_xI", out.interval_12.rms_xI},
                      {"reinit_count", out.interval_12.reinit_count},
                      {"run_dir", out.interval_12.run_dir.string()}};
  s["final_field_rms_diff"] = out.final_field_rms_diff;
  std::ofstream os(dir / "summary.json");
  os << s.dump(2) << "\n";
  return out;
}

}  // namespace qlbm
