// Unit tests for the experiment harness: config parsing and hashing, error
// metrics, CSV persistence, and the experiment output layout.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlbm/harness.hpp"

using namespace qlbm;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test; removed on destruction.
struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("qlbm_harness_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("rms_error matches hand-computed values") {
  CHECK(rms_error({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0}) == 0.0);
  CHECK(rms_error({0.25}, {1.0}) == doctest::Approx(0.75).epsilon(1e-15));
  // Two entries, one off by 1: sqrt(1/2).
  CHECK(rms_error({0.0, 1.0}, {0.0, 0.0}) ==
        doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("rms_error rejects mismatched or empty input") {
  CHECK_THROWS_AS(rms_error({1.0, 2.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(rms_error({}, {}), std::invalid_argument);
}

TEST_CASE("CSV round-trip reproduces doubles bit-exactly") {
  TempDir tmp("csv_roundtrip");
  const std::vector<std::string> header = {"a", "b", "c"};
  const std::vector<std::vector<double>> rows = {
      {1.0 / 3.0, -2.718281828459045e-17, 6.02214076e23},
      {0.1 + 0.2, 1e-308, -0.0},
      {3.14159265358979323846, 2.0 / 7.0, 123456789.123456789},
  };
  const fs::path p = tmp.path / "t.csv";
  write_csv(p, header, rows);
  const CsvTable back = read_csv(p);
  REQUIRE(back.header == header);
  REQUIRE(back.rows.size() == rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      CHECK(back.rows[r][c] == rows[r][c]);
    }
  }
}

TEST_CASE("write_csv rejects rows that do not match the header width") {
  TempDir tmp("csv_width");
  CHECK_THROWS_AS(write_csv(tmp.path / "bad.csv", {"a", "b"}, {{1.0}}),
                  std::invalid_argument);
}

TEST_CASE("read_csv throws on a missing file") {
  CHECK_THROWS_AS(read_csv("/nonexistent/qlbm_missing.csv"), std::runtime_error);
}

TEST_CASE("config defaults survive a JSON round-trip") {
  const SimConfig def;
  const SimConfig back = SimConfig::from_json_text(def.to_json_text());
  CHECK(back.params.n_sites == def.params.n_sites);
  CHECK(back.n_steps == def.n_steps);
  CHECK(back.params.alpha == def.params.alpha);
  CHECK(back.params.T_melt == def.params.T_melt);
  CHECK(back.params.L_over_cp == def.params.L_over_cp);
  CHECK(back.backend == def.backend);
  CHECK(back.chi_max == def.chi_max);
  CHECK(back.sv_cutoff == def.sv_cutoff);
  CHECK(back.reinit_interval == def.reinit_interval);
  CHECK(back.shots == def.shots);
  CHECK(back.seed == def.seed);
}

TEST_CASE("config parser reads every key and rejects unknown ones") {
  const std::string text = R"({
    "n_sites": 9, "n_steps": 40, "alpha": 0.25, "T_bound": 0.9,
    "T_solid": 0.1, "T_melt": 0.5, "L_over_cp": 4.0,
    "backend": "mps", "statevector_cap": 20, "chi_max": 32,
    "sv_cutoff": 1e-10, "reinit_interval": 6, "settling_window": 3,
    "reinit_encoding": "marginal", "ancilla_readout": "every_step",
    "shots": 1000, "seed": 7, "out_dir": "/tmp/x"
  })";
  const SimConfig c = SimConfig::from_json_text(text);
  CHECK(c.params.n_sites == 9);
  CHECK(c.n_steps == 40);
  CHECK(c.params.alpha == 0.25);
  CHECK(c.params.T_bound == 0.9);
  CHECK(c.params.T_solid == 0.1);
  CHECK(c.params.T_melt == 0.5);
  CHECK(c.params.L_over_cp == 4.0);
  CHECK(c.backend == BackendKind::Mps);
  CHECK(c.statevector_cap == 20);
  CHECK(c.chi_max == 32);
  CHECK(c.sv_cutoff == 1e-10);
  CHECK(c.reinit_interval == 6);
  CHECK(c.settling_window == 3);
  CHECK(c.reinit_encoding == ReinitEncoding::Marginal);
  CHECK(c.ancilla_readout == AncillaReadout::EveryStep);
  CHECK(c.shots == 1000);
  CHECK(c.seed == 7);
  CHECK(c.out_dir == "/tmp/x");

  CHECK_THROWS_AS(SimConfig::from_json_text(R"({"n_site": 9})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(SimConfig::from_json_text(R"({"backend": "gpu"})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(SimConfig::from_json_text(R"({"reinit_encoding": "raw"})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(SimConfig::from_json_text("not json"), std::invalid_argument);
  CHECK_THROWS_AS(SimConfig::from_json_text("[1,2]"), std::invalid_argument);
  CHECK_THROWS_AS(SimConfig::from_json_text(R"({"n_steps": -1})"),
                  std::invalid_argument);
}

TEST_CASE("config hash is deterministic and sensitive to every field change") {
  const SimConfig a;
  CHECK(a.config_hash() == a.config_hash());
  CHECK(a.config_hash().size() == 16);
  SimConfig b = a;
  b.seed = 2;
  CHECK(b.config_hash() != a.config_hash());
  SimConfig c = a;
  c.reinit_interval = 12;
  CHECK(c.config_hash() != a.config_hash());
  CHECK(c.config_hash() != b.config_hash());
}

TEST_CASE("output root prefers the explicit override") {
  SimConfig c;
  c.out_dir = "/tmp/explicit_root";
  CHECK(output_root(c) == fs::path("/tmp/explicit_root"));
}

TEST_CASE("analytic reference requires a melting regime and follows sqrt(t)") {
  SimConfig no_melt;
  no_melt.params.T_melt = 2.0;  // above T_bound: plain conduction
  no_melt.params.T_solid = 0.5;
  CHECK_THROWS_AS(analytic_reference(no_melt), std::domain_error);

  SimConfig melt;
  melt.n_steps = 100;
  const AnalyticReference ref = analytic_reference(melt);
  REQUIRE(static_cast<int>(ref.interface_x.size()) == melt.n_steps + 1);
  CHECK(ref.interface_x[0] == 0.0);
  for (int t = 1; t <= melt.n_steps; ++t) {
    CHECK(ref.interface_x[t] > ref.interface_x[t - 1]);
  }
  // x_I(4t) = 2 x_I(t) for a sqrt(t) trajectory.
  CHECK(ref.interface_x[100] ==
        doctest::Approx(2.0 * ref.interface_x[25]).epsilon(1e-12));
}

TEST_CASE("experiment run writes the full output layout") {
  TempDir tmp("experiment");
  SimConfig cfg;
  cfg.params.n_sites = 5;
  cfg.n_steps = 6;
  cfg.backend = BackendKind::Statevector;
  cfg.out_dir = tmp.path.string();
  const ExperimentSummary sum = run_experiment(cfg);

  CHECK(sum.run_dir == tmp.path / cfg.config_hash());
  for (const char* name :
       {"config.json", "qlbm_temps.csv", "qlbm_interface.csv",
        "matched_classical_temps.csv", "matched_classical_interface.csv",
        "classical_temps.csv", "classical_interface.csv", "errors.csv",
        "analytic_interface.csv", "summary.json"}) {
    CAPTURE(name);
    CHECK(fs::exists(sum.run_dir / name));
  }

  // One row per step plus the initial state, one column per site plus time.
  const CsvTable temps = read_csv(sum.run_dir / "qlbm_temps.csv");
  CHECK(static_cast<int>(temps.rows.size()) == cfg.n_steps + 1);
  CHECK(static_cast<int>(temps.header.size()) == cfg.params.n_sites + 1);
  const CsvTable errs = read_csv(sum.run_dir / "errors.csv");
  CHECK(static_cast<int>(errs.rows.size()) == cfg.n_steps + 1);

  // Per-step re-encoding keeps the quantum run on top of the matched
  // classical comparator.
  CHECK(sum.max_rms_T < 1e-10);
  CHECK(sum.rms_xI < 1e-10);
  CHECK(sum.calibration.matched_omega == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sum.reinit_count == cfg.n_steps);

  // The stored config reproduces the run directory name.
  const SimConfig back = SimConfig::from_json_file(sum.run_dir / "config.json");
  CHECK(back.config_hash() == cfg.config_hash());
}
