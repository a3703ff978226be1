// Run configuration: JSON ingestion with strict key checking, field-path
// error messages, and defaults taken from the shipped device-parameter file.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "sideband/params.hpp"
#include "sideband/schedule.hpp"
#include "sideband/state.hpp"

namespace sideband {

struct SimulationConfig {
  Frame frame = Frame::DriveFrame;
  int fock_dim = 0;     // per-mode truncation; 0 = automatic per protocol
  double dt_max = 0.0;  // us; 0 = automatic (fraction of the fastest drive period)
  double rtol = 0.0;    // 0 = integrator default
  double atol = 0.0;    // 0 = integrator default
};

struct ProtocolConfig {
  std::string name = "fock";  // fock | swap | bell
  int n = 1;
  double ramp_ns = 200.0;      // sideband-drive edge length
  double rabi_ramp_ns = 20.0;  // Rabi-drive edge length
  RampShape ramp_shape = RampShape::RaisedCosine;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats = {"csv", "json", "svg"};

  bool has_format(const std::string& f) const;
};

struct RunConfig {
  SystemParams system;
  SimulationConfig simulation;
  ProtocolConfig protocol;
  OutputConfig output;
  // GHz-scale mode frequencies, recorded verbatim for documentation; the
  // frame-level models never use them (both working frames eliminate them).
  nlohmann::ordered_json frequencies = nlohmann::ordered_json::object();

  void validate() const;  // throws ValidationError with a field path
};

// The shipped device parameters (identical to paper_params.json at the repo
// root); every load starts from these and overlays the file's keys.
RunConfig default_config();

// Parse + validate. Parse failures report line/column; validation failures
// report the offending field path. `source` names the input in messages.
RunConfig parse_config(const std::string& text, const std::string& source);
RunConfig load_config(const std::filesystem::path& path);

// Full round-trip serialization (also used to embed the effective
// configuration into summary outputs).
nlohmann::ordered_json config_to_json(const RunConfig& cfg);

Frame frame_from_string(const std::string& s);          // "jc" | "drive"
RampShape ramp_shape_from_string(const std::string& s);  // "raised_cosine" | "linear"

}  // namespace sideband
