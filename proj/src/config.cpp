#include "sideband/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "sideband/common.hpp"

namespace sideband {

using nlohmann::ordered_json;

bool OutputConfig::has_format(const std::string& f) const {
  for (const auto& s : formats)
    if (s == f) return true;
  return false;
}

Frame frame_from_string(const std::string& s) {
  if (s == "jc") return Frame::JCFrame;
  if (s == "drive") return Frame::DriveFrame;
  throw ValidationError("frame must be 'jc' or 'drive', got '" + s + "'");
}

RampShape ramp_shape_from_string(const std::string& s) {
  if (s == "raised_cosine") return RampShape::RaisedCosine;
  if (s == "linear") return RampShape::Linear;
  throw ValidationError("ramp_shape must be 'raised_cosine' or 'linear', got '" + s + "'");
}

void RunConfig::validate() const {
  try {
    system.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("config field 'system': ") + e.what());
  }
  if (simulation.fock_dim != 0 && simulation.fock_dim < 2)
    throw ValidationError("config field 'simulation.fock_dim': must be 0 (automatic) or >= 2");
  if (simulation.dt_max < 0.0)
    throw ValidationError("config field 'simulation.dt_max_us': must be >= 0");
  if (simulation.rtol < 0.0)
    throw ValidationError("config field 'simulation.rtol': must be >= 0");
  if (simulation.atol < 0.0)
    throw ValidationError("config field 'simulation.atol': must be >= 0");
  if (protocol.name != "fock" && protocol.name != "swap" && protocol.name != "bell")
    throw ValidationError("config field 'protocol.name': must be one of fock|swap|bell");
  if (protocol.n < 1 || protocol.n > 20)
    throw ValidationError("config field 'protocol.n': must be in [1, 20]");
  if (protocol.ramp_ns < 0.0)
    throw ValidationError("config field 'protocol.ramp_ns': must be >= 0");
  if (protocol.rabi_ramp_ns < 0.0)
    throw ValidationError("config field 'protocol.rabi_ramp_ns': must be >= 0");
  if (output.directory.empty())
    throw ValidationError("config field 'output.directory': must be nonempty");
  for (const auto& f : output.formats)
    if (f != "csv" && f != "json" && f != "svg")
      throw ValidationError("config field 'output.formats': unknown format '" + f +
                            "' (expected csv|json|svg)");
}

RunConfig default_config() { return RunConfig{}; }

namespace {

[[noreturn]] void unknown_key(const std::string& path) {
  throw ValidationError("config: unknown key '" + path + "'");
}

void check_keys(const ordered_json& obj, const std::string& prefix,
                const std::set<std::string>& allowed) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) unknown_key(prefix.empty() ? item.key() : prefix + "." + item.key());
}

double get_number(const ordered_json& obj, const std::string& path, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw ValidationError("config field '" + path + "': expected a number");
  return v.get<double>();
}

std::string get_string(const ordered_json& obj, const std::string& path, const std::string& key) {
  const auto& v = obj.at(key);
  if (!v.is_string())
    throw ValidationError("config field '" + path + "': expected a string");
  return v.get<std::string>();
}

void overlay_system(const ordered_json& obj, SystemParams& p) {
  static const std::set<std::string> keys = {
      "rabi_freq", "chi_r", "chi_1", "chi_2",  "kappa_r",  "eps_r",   "eps_1",
      "eps_2",     "t1_qubit", "t2_echo_qubit", "t1_mem1", "t1_mem2", "include_readout"};
  check_keys(obj, "system", keys);
  auto num = [&](const char* k, double& field) {
    if (obj.contains(k)) field = get_number(obj, std::string("system.") + k, k);
  };
  num("rabi_freq", p.rabi_freq);
  num("chi_r", p.chi_r);
  num("chi_1", p.chi_1);
  num("chi_2", p.chi_2);
  num("kappa_r", p.kappa_r);
  num("eps_r", p.eps_r);
  num("eps_1", p.eps_1);
  num("eps_2", p.eps_2);
  num("t1_qubit", p.t1_qubit);
  num("t2_echo_qubit", p.t2_echo_qubit);
  num("t1_mem1", p.t1_mem1);
  num("t1_mem2", p.t1_mem2);
  if (obj.contains("include_readout")) {
    if (!obj["include_readout"].is_boolean())
      throw ValidationError("config field 'system.include_readout': expected a boolean");
    p.include_readout = obj["include_readout"].get<bool>();
  }
}

void overlay_simulation(const ordered_json& obj, SimulationConfig& s) {
  static const std::set<std::string> keys = {"frame", "fock_dim", "dt_max_us", "rtol", "atol"};
  check_keys(obj, "simulation", keys);
  if (obj.contains("frame")) {
    try {
      s.frame = frame_from_string(get_string(obj, "simulation.frame", "frame"));
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("config field 'simulation.frame': ") + e.what());
    }
  }
  if (obj.contains("fock_dim")) {
    const auto& v = obj["fock_dim"];
    if (!v.is_number_integer())
      throw ValidationError("config field 'simulation.fock_dim': expected an integer");
    s.fock_dim = v.get<int>();
  }
  if (obj.contains("dt_max_us")) s.dt_max = get_number(obj, "simulation.dt_max_us", "dt_max_us");
  if (obj.contains("rtol")) s.rtol = get_number(obj, "simulation.rtol", "rtol");
  if (obj.contains("atol")) s.atol = get_number(obj, "simulation.atol", "atol");
}

void overlay_protocol(const ordered_json& obj, ProtocolConfig& p) {
  static const std::set<std::string> keys = {"name", "n", "ramp_ns", "rabi_ramp_ns", "ramp_shape"};
  check_keys(obj, "protocol", keys);
  if (obj.contains("name")) p.name = get_string(obj, "protocol.name", "name");
  if (obj.contains("n")) {
    const auto& v = obj["n"];
    if (!v.is_number_integer())
      throw ValidationError("config field 'protocol.n': expected an integer");
    p.n = v.get<int>();
  }
  if (obj.contains("ramp_ns")) p.ramp_ns = get_number(obj, "protocol.ramp_ns", "ramp_ns");
  if (obj.contains("rabi_ramp_ns"))
    p.rabi_ramp_ns = get_number(obj, "protocol.rabi_ramp_ns", "rabi_ramp_ns");
  if (obj.contains("ramp_shape")) {
    try {
      p.ramp_shape = ramp_shape_from_string(get_string(obj, "protocol.ramp_shape", "ramp_shape"));
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("config field 'protocol.ramp_shape': ") + e.what());
    }
  }
}

void overlay_output(const ordered_json& obj, OutputConfig& o) {
  static const std::set<std::string> keys = {"directory", "formats"};
  check_keys(obj, "output", keys);
  if (obj.contains("directory")) o.directory = get_string(obj, "output.directory", "directory");
  if (obj.contains("formats")) {
    const auto& v = obj["formats"];
    if (!v.is_array())
      throw ValidationError("config field 'output.formats': expected an array of strings");
    o.formats.clear();
    for (const auto& f : v) {
      if (!f.is_string())
        throw ValidationError("config field 'output.formats': expected an array of strings");
      o.formats.push_back(f.get<std::string>());
    }
  }
}

// nlohmann reports a byte offset; convert to 1-based line/column for humans.
std::pair<int, int> line_column(const std::string& text, size_t byte) {
  int line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  ordered_json root;
  try {
    root = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ValidationError("config parse error in " + source + " at line " + std::to_string(line) +
                          ", column " + std::to_string(col) + ": " + e.what());
  }
  if (!root.is_object())
    throw ValidationError("config parse error in " + source + ": top level must be a JSON object");

  RunConfig cfg = default_config();
  static const std::set<std::string> top = {"system", "frequencies", "simulation", "protocol",
                                            "output"};
  check_keys(root, "", top);
  auto section = [&](const char* key) -> const ordered_json* {
    if (!root.contains(key)) return nullptr;
    if (!root[key].is_object())
      throw ValidationError(std::string("config field '") + key + "': expected a JSON object");
    return &root[key];
  };
  if (const auto* s = section("system")) overlay_system(*s, cfg.system);
  if (const auto* s = section("simulation")) overlay_simulation(*s, cfg.simulation);
  if (const auto* s = section("protocol")) overlay_protocol(*s, cfg.protocol);
  if (const auto* s = section("output")) overlay_output(*s, cfg.output);
  if (root.contains("frequencies")) {
    // Recorded verbatim: GHz-scale mode frequencies document the device but
    // play no role in the frame-level models.
    if (!root["frequencies"].is_object())
      throw ValidationError("config field 'frequencies': expected a JSON object");
    cfg.frequencies = root["frequencies"];
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("config file '" + path.string() + "' cannot be opened");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), "'" + path.string() + "'");
}

ordered_json config_to_json(const RunConfig& cfg) {
  ordered_json j;
  ordered_json sys;
  sys["rabi_freq"] = cfg.system.rabi_freq;
  sys["chi_r"] = cfg.system.chi_r;
  sys["chi_1"] = cfg.system.chi_1;
  sys["chi_2"] = cfg.system.chi_2;
  sys["kappa_r"] = cfg.system.kappa_r;
  sys["eps_r"] = cfg.system.eps_r;
  sys["eps_1"] = cfg.system.eps_1;
  sys["eps_2"] = cfg.system.eps_2;
  sys["t1_qubit"] = cfg.system.t1_qubit;
  sys["t2_echo_qubit"] = cfg.system.t2_echo_qubit;
  sys["t1_mem1"] = cfg.system.t1_mem1;
  sys["t1_mem2"] = cfg.system.t1_mem2;
  sys["include_readout"] = cfg.system.include_readout;
  j["system"] = std::move(sys);
  j["frequencies"] = cfg.frequencies;
  ordered_json sim;
  sim["frame"] = frame_name(cfg.simulation.frame);
  sim["fock_dim"] = cfg.simulation.fock_dim;
  sim["dt_max_us"] = cfg.simulation.dt_max;
  sim["rtol"] = cfg.simulation.rtol;
  sim["atol"] = cfg.simulation.atol;
  j["simulation"] = std::move(sim);
  ordered_json prot;
  prot["name"] = cfg.protocol.name;
  prot["n"] = cfg.protocol.n;
  prot["ramp_ns"] = cfg.protocol.ramp_ns;
  prot["rabi_ramp_ns"] = cfg.protocol.rabi_ramp_ns;
  prot["ramp_shape"] = ramp_shape_name(cfg.protocol.ramp_shape);
  j["protocol"] = std::move(prot);
  ordered_json out;
  out["directory"] = cfg.output.directory;
  out["formats"] = cfg.output.formats;
  j["output"] = std::move(out);
  return j;
}

}  // namespace sideband
