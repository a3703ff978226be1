// Configuration ingestion and deterministic result emission.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "sideband/config.hpp"
#include "sideband/io.hpp"

using namespace sideband;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  fs::path dir = fs::temp_directory_path() / "sideband_io_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const ValidationError& e) {
    return e.what();
  }
  FAIL("expected a validation error");
  return {};
}

}  // namespace

TEST_CASE("defaults match the shipped parameter file") {
  RunConfig def = default_config();
  def.validate();
  CHECK(def.system.rabi_freq == doctest::Approx(6.0));
  CHECK(def.system.eps_2 == doctest::Approx(54.6));
  CHECK(def.simulation.frame == Frame::DriveFrame);
  CHECK(def.simulation.fock_dim == 0);
  CHECK(def.protocol.name == "fock");
  CHECK(def.protocol.ramp_ns == doctest::Approx(200.0));
  CHECK(def.protocol.rabi_ramp_ns == doctest::Approx(20.0));
  CHECK(def.output.directory == "out");
  CHECK(def.output.has_format("csv"));
  CHECK(def.output.has_format("svg"));
  CHECK(!def.output.has_format("hdf5"));

  // The repository ships the same values as a file.
  if (fs::exists("paper_params.json")) {
    RunConfig shipped = load_config("paper_params.json");
    CHECK(shipped.system.chi_1 == doctest::Approx(def.system.chi_1));
    CHECK(shipped.protocol.ramp_ns == doctest::Approx(def.protocol.ramp_ns));
  }
}

TEST_CASE("partial configs overlay onto defaults") {
  RunConfig cfg = parse_config(R"({
    "system": {"eps_1": 15.6},
    "simulation": {"frame": "jc", "fock_dim": 12},
    "protocol": {"name": "swap", "n": 3, "ramp_shape": "linear"}
  })",
                               "inline");
  CHECK(cfg.system.eps_1 == doctest::Approx(15.6));
  CHECK(cfg.system.eps_2 == doctest::Approx(54.6));  // untouched default
  CHECK(cfg.simulation.frame == Frame::JCFrame);
  CHECK(cfg.simulation.fock_dim == 12);
  CHECK(cfg.protocol.name == "swap");
  CHECK(cfg.protocol.n == 3);
  CHECK(cfg.protocol.ramp_shape == RampShape::Linear);
  cfg.validate();
}

TEST_CASE("parse errors carry line and column of the defect") {
  std::string msg = error_text([] {
    parse_config("{\n  \"system\": {\n    \"chi_1\": 0.035,,\n  }\n}\n", "broken.json");
  });
  CHECK(msg.find("broken.json") != std::string::npos);
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("column") != std::string::npos);

  std::string empty = error_text([] { parse_config("", "empty.json"); });
  CHECK(empty.find("parse error") != std::string::npos);
  CHECK(empty.find("line 1") != std::string::npos);
}

TEST_CASE("unknown keys are rejected with their full path") {
  std::string top = error_text([] { parse_config(R"({"sytem": {}})", "x"); });
  CHECK(top.find("unknown key 'sytem'") != std::string::npos);

  std::string nested =
      error_text([] { parse_config(R"({"system": {"qubit_t1": 10}})", "x"); });
  CHECK(nested.find("system.qubit_t1") != std::string::npos);

  std::string sim = error_text(
      [] { parse_config(R"({"simulation": {"step_size": 0.1}})", "x"); });
  CHECK(sim.find("simulation.step_size") != std::string::npos);
}

TEST_CASE("type mismatches name the offending field") {
  std::string msg = error_text([] {
    parse_config(R"({"system": {"chi_1": "abc"}})", "x");
  });
  CHECK(msg.find("system.chi_1") != std::string::npos);
  CHECK(msg.find("number") != std::string::npos);

  std::string arr = error_text([] {
    parse_config(R"({"output": {"formats": "csv"}})", "x");
  });
  CHECK(arr.find("output.formats") != std::string::npos);
}

TEST_CASE("semantic validation uses field paths and named bounds") {
  std::string t2 = error_text([] {
    parse_config(R"({"system": {"t2_echo_qubit": 70.0}})", "x");
  });
  CHECK(t2.find("t2_echo_qubit") != std::string::npos);

  std::string dim = error_text([] {
    parse_config(R"({"simulation": {"fock_dim": 1}})", "x");
  });
  CHECK(dim.find("fock_dim") != std::string::npos);

  std::string proto = error_text([] {
    parse_config(R"({"protocol": {"name": "ghz"}})", "x");
  });
  CHECK(proto.find("protocol.name") != std::string::npos);

  std::string fmt = error_text([] {
    parse_config(R"({"output": {"formats": ["csv", "bmp"]}})", "x");
  });
  CHECK(fmt.find("formats") != std::string::npos);

  CHECK_THROWS_AS(frame_from_string("lab"), ValidationError);
  CHECK(frame_from_string("jc") == Frame::JCFrame);
  CHECK(frame_from_string("drive") == Frame::DriveFrame);
  CHECK_THROWS_AS(ramp_shape_from_string("boxcar"), ValidationError);
  CHECK(ramp_shape_from_string("linear") == RampShape::Linear);
}

TEST_CASE("frequencies are carried verbatim through the round trip") {
  RunConfig cfg = parse_config(
      R"({"frequencies": {"omega_q_ghz": 6.269, "omega_r_ghz": 7.706}})", "x");
  nlohmann::ordered_json j = config_to_json(cfg);
  CHECK(j["frequencies"]["omega_q_ghz"] == doctest::Approx(6.269));
  CHECK(j["frequencies"]["omega_r_ghz"] == doctest::Approx(7.706));

  // Full round trip: serialize, reparse, reserialize, compare.
  RunConfig again = parse_config(j.dump(), "roundtrip");
  CHECK(config_to_json(again) == j);

  // load_config on a missing path names the file.
  std::string missing = error_text([] { load_config("/nonexistent/params.json"); });
  CHECK(missing.find("params.json") != std::string::npos);
}

TEST_CASE("number formatting is locale-free shortest-faithful decimal") {
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-0.5) == "-0.5");
  CHECK(format_number(1.3736263736263736) == "1.37362637363");
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(1e-9) == "1e-09");
}

TEST_CASE("CSV writer emits validated rectangular tables deterministically") {
  CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{1.0, 2.5}, {3.0, -4.125}};
  t.validate();

  fs::path p = temp_dir() / "table.csv";
  write_csv(p, t);
  const std::string body = slurp(p);
  CHECK(body == "a,b\n1,2.5\n3,-4.125\n");

  write_csv(p, t);
  CHECK(slurp(p) == body);  // byte-identical rerun

  CsvTable ragged;
  ragged.header = {"a", "b"};
  ragged.rows = {{1.0}};
  CHECK_THROWS_AS(ragged.validate(), ValidationError);

  CsvTable empty_header;
  CHECK_THROWS_AS(empty_header.validate(), ValidationError);
}

TEST_CASE("grid and sweep tables carry the documented columns") {
  CharGrid g;
  g.x_kind = CharComponent::ReAlpha;
  g.y_kind = CharComponent::ImAlpha;
  g.x = CharAxis{-1.0, 1.0, 3};
  g.y = CharAxis{-0.5, 0.5, 2};
  g.values.assign(6, cxd(0.0, 0.0));
  g.values[1 * 3 + 2] = cxd(0.25, -0.75);  // iy = 1, ix = 2
  CsvTable t = char_grid_table(g);
  CHECK(t.header == std::vector<std::string>{"re_alpha", "im_alpha", "re_C", "im_C"});
  REQUIRE(t.rows.size() == 6);
  // Row order: y outer, x inner; the (x=1, y=0.5) point is the last row.
  CHECK(t.rows.back()[0] == doctest::Approx(1.0));
  CHECK(t.rows.back()[1] == doctest::Approx(0.5));
  CHECK(t.rows.back()[2] == doctest::Approx(0.25));
  CHECK(t.rows.back()[3] == doctest::Approx(-0.75));

  SweepResult sweep;
  sweep.parameter = "tau_1";
  sweep.grid = {1.0, 1.1, 1.2};
  sweep.objective = {0.3, 0.9, 0.5};
  sweep.best_index = 1;
  sweep.best_value = 0.9;
  sweep.refined_location = 1.11;
  sweep.refined_value = 0.91;
  sweep.fit = {-1.0, 2.0, -0.9};
  CsvTable st = sweep_table(sweep);
  CHECK(st.header == std::vector<std::string>{"tau_us", "objective"});
  CHECK(st.rows.size() == 3);

  nlohmann::ordered_json js = sweep_to_json(sweep);
  CHECK(js["parameter"] == "tau_1");
  CHECK(js["points"] == 3);
  CHECK(js["best_index"] == 1);
  CHECK(js["refined_location_us"] == doctest::Approx(1.11));
  CHECK(js["fit_coefficients"].size() == 3);
}

TEST_CASE("JSON writer is stable and newline-terminated") {
  nlohmann::ordered_json j;
  j["n"] = 2;
  j["value"] = 0.5;
  fs::path p = temp_dir() / "meta.json";
  write_json(p, j);
  const std::string body = slurp(p);
  CHECK(body.back() == '\n');
  CHECK(body.find("\"n\": 2") != std::string::npos);
  write_json(p, j);
  CHECK(slurp(p) == body);
}

TEST_CASE("SVG plots are self-contained and reproducible") {
  CharGrid g;
  g.x_kind = CharComponent::ReAlpha;
  g.y_kind = CharComponent::ImAlpha;
  const int np = 9;
  g.x = CharAxis{-2.0, 2.0, np};
  g.y = CharAxis{-2.0, 2.0, np};
  g.values.assign(np * np, cxd(0.0, 0.0));
  for (int iy = 0; iy < np; ++iy)
    for (int ix = 0; ix < np; ++ix)
      g.values[static_cast<size_t>(iy) * np + ix] =
          std::exp(-0.5 * (g.x.at(ix) * g.x.at(ix) + g.y.at(iy) * g.y.at(iy)));
  g.origin = cxd(1.0, 0.0);

  fs::path p = temp_dir() / "heat.svg";
  HeatmapSpec spec;
  spec.title = "vacuum";
  write_svg_heatmap(p, g, spec);
  const std::string body = slurp(p);
  CHECK(body.find("<svg") != std::string::npos);
  CHECK(body.find("</svg>") != std::string::npos);
  CHECK(body.find("Re(alpha)") != std::string::npos);
  CHECK(body.find("http") == std::string::npos);  // no external references
  write_svg_heatmap(p, g, spec);
  CHECK(slurp(p) == body);

  // Line plots refuse degenerate axes and mismatched series.
  std::vector<double> x = {0.0, 1.0, 2.0};
  LineSeries s;
  s.name = "f";
  s.y = {0.1, 0.4, 0.2};
  fs::path lp = temp_dir() / "line.svg";
  write_svg_lineplot(lp, x, {s}, {"study", "t", "F"});
  const std::string line_body = slurp(lp);
  CHECK(line_body.find("<svg") != std::string::npos);
  CHECK(line_body.find("study") != std::string::npos);

  CHECK_THROWS_AS(write_svg_lineplot(lp, {0.0}, {s}, {"", "", ""}), ValidationError);
  LineSeries wrong = s;
  wrong.y = {0.1};
  CHECK_THROWS_AS(write_svg_lineplot(lp, x, {wrong}, {"", "", ""}), ValidationError);
}

TEST_CASE("trajectory and study tables match their sources") {
  Trajectory traj;
  traj.times = {0.0, 0.5, 1.0};
  traj.records = {{"n_mem1", {0.0, 0.5, 1.0}}, {"sigma_z", {1.0, 0.0, -1.0}}};
  CsvTable t = trajectory_table(traj);
  CHECK(t.header == std::vector<std::string>{"t_us", "n_mem1", "sigma_z"});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[1][0] == doctest::Approx(0.5));
  CHECK(t.rows[1][1] == doctest::Approx(0.5));
  CHECK(t.rows[1][2] == doctest::Approx(0.0));

  SwapTimeResult sw;
  sw.tau_prime = 1.9;
  sw.peak_n2 = 0.99;
  sw.times = {0.1, 0.2};
  sw.n2 = {0.3, 0.6};
  CsvTable swt = swap_transfer_table(sw);
  CHECK(swt.header == std::vector<std::string>{"t_us", "n_mem2"});
  CHECK(swt.rows.size() == 2);

  std::vector<RampCoherencePoint> pts = {{1, 20.0, 1.0, 0.97, 0.98}};
  CsvTable ft = fidelity_table(pts);
  CHECK(ft.header == std::vector<std::string>{"n", "ramp_ns", "coherence_mult",
                                              "fidelity", "postselect_prob"});
  REQUIRE(ft.rows.size() == 1);
  CHECK(ft.rows[0][0] == doctest::Approx(1.0));
  CHECK(ft.rows[0][3] == doctest::Approx(0.97));
}

TEST_CASE("schedules serialize with their step structure") {
  TimingTable t = analytic_timings(0.182, 2);
  auto sched = fock_generation_schedule(2, t, 0.02, Frame::JCFrame);
  nlohmann::ordered_json j = schedule_to_json(sched);
  CHECK(j["protocol"] == "fock");
  CHECK(j["target_n"] == 2);
  CHECK(j["frame"] == "jc");
  REQUIRE(j["steps"].is_array());
  CHECK(j["steps"].size() == sched.steps.size());
  bool saw_hold = false;
  for (const auto& step : j["steps"]) {
    REQUIRE(step.contains("kind"));
    if (step["kind"] == "hold") {
      saw_hold = true;
      CHECK(step["duration_us"].get<double>() > 0.0);
    }
  }
  CHECK(saw_hold);
}
