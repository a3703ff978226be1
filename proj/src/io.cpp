#include "sideband/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "sideband/common.hpp"

namespace sideband {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void CsvTable::validate() const {
  if (header.empty()) throw ValidationError("CsvTable: empty header");
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw ValidationError("CsvTable: row width " + std::to_string(row.size()) +
                            " does not match header width " + std::to_string(header.size()));
  }
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);  // binary: byte-identical across platforms
  if (!out) throw ValidationError("cannot open output file '" + path.string() + "'");
  return out;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  table.validate();
  std::ofstream out = open_out(path);
  for (size_t i = 0; i < table.header.size(); ++i)
    out << (i ? "," : "") << table.header[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
  if (!out) throw ValidationError("write failed for '" + path.string() + "'");
}

CsvTable trajectory_table(const Trajectory& traj) {
  CsvTable t;
  t.header.push_back("t_us");
  for (const auto& rec : traj.records) t.header.push_back(rec.first);
  t.rows.reserve(traj.times.size());
  for (size_t i = 0; i < traj.times.size(); ++i) {
    std::vector<double> row;
    row.reserve(t.header.size());
    row.push_back(traj.times[i]);
    for (const auto& rec : traj.records) row.push_back(rec.second[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable char_grid_table(const CharGrid& grid) {
  CsvTable t;
  t.header = {char_component_name(grid.x_kind), char_component_name(grid.y_kind), "re_C", "im_C"};
  t.rows.reserve(static_cast<size_t>(grid.x.points) * grid.y.points);
  for (int iy = 0; iy < grid.y.points; ++iy)
    for (int ix = 0; ix < grid.x.points; ++ix) {
      cxd c = grid.at(ix, iy);
      t.rows.push_back({grid.x.at(ix), grid.y.at(iy), c.real(), c.imag()});
    }
  return t;
}

CsvTable sweep_table(const SweepResult& sweep) {
  CsvTable t;
  t.header = {"tau_us", "objective"};
  for (size_t i = 0; i < sweep.grid.size(); ++i)
    t.rows.push_back({sweep.grid[i], sweep.objective[i]});
  return t;
}

CsvTable swap_transfer_table(const SwapTimeResult& result) {
  CsvTable t;
  t.header = {"t_us", "n_mem2"};
  for (size_t i = 0; i < result.times.size(); ++i)
    t.rows.push_back({result.times[i], result.n2[i]});
  return t;
}

CsvTable fidelity_table(const std::vector<RampCoherencePoint>& points) {
  CsvTable t;
  t.header = {"n", "ramp_ns", "coherence_mult", "fidelity", "postselect_prob"};
  for (const auto& p : points)
    t.rows.push_back({static_cast<double>(p.n), p.ramp_ns, p.coherence_mult, p.fidelity,
                      p.postselect_prob});
  return t;
}

namespace {

const char* pauli_name(Pauli p) {
  switch (p) {
    case Pauli::X: return "x";
    case Pauli::Y: return "y";
    case Pauli::Z: return "z";
    case Pauli::Plus: return "plus";
    case Pauli::Minus: return "minus";
  }
  return "?";
}

}  // namespace

nlohmann::ordered_json schedule_to_json(const PulseSchedule& schedule) {
  nlohmann::ordered_json j;
  j["frame"] = schedule.frame == Frame::JCFrame ? "jc" : "drive";
  j["protocol"] = schedule.protocol;
  j["target_n"] = schedule.target_n;
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const Step& s : schedule.steps) {
    nlohmann::ordered_json step;
    step["kind"] = step_kind_name(s.kind);
    switch (s.kind) {
      case StepKind::RampUp:
      case StepKind::RampDown:
        step["channel"] = s.channel;
        step["duration_us"] = s.duration;
        step["shape"] = ramp_shape_name(s.shape);
        if (s.amplitude != 0.0) step["amplitude_mhz"] = s.amplitude;
        break;
      case StepKind::Hold:
        step["channels"] = s.channels;
        step["duration_us"] = s.duration;
        break;
      case StepKind::RabiPhaseFlip:
        break;
      case StepKind::QubitPulse:
        step["axis"] = pauli_name(s.axis);
        step["angle_rad"] = s.angle;
        break;
    }
    if (!s.note.empty()) step["note"] = s.note;
    steps.push_back(std::move(step));
  }
  j["steps"] = std::move(steps);
  return j;
}

nlohmann::ordered_json sweep_to_json(const SweepResult& sweep) {
  nlohmann::ordered_json j;
  j["parameter"] = sweep.parameter;
  j["points"] = sweep.grid.size();
  j["grid_lo_us"] = sweep.grid.empty() ? 0.0 : sweep.grid.front();
  j["grid_hi_us"] = sweep.grid.empty() ? 0.0 : sweep.grid.back();
  j["maximize"] = sweep.maximize;
  j["extremum_found"] = sweep.extremum_found;
  j["best_index"] = sweep.best_index;
  j["best_value"] = sweep.best_value;
  j["refined_location_us"] = sweep.refined_location;
  j["refined_value"] = sweep.refined_value;
  j["fit_coefficients"] = {sweep.fit[0], sweep.fit[1], sweep.fit[2]};
  return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw ValidationError("write failed for '" + path.string() + "'");
}

// ---- SVG ---------------------------------------------------------------

namespace {

// Fixed diverging map: blue (#3b4cc0) -> white -> red (#b40426), t in [0,1].
std::string diverging_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  auto lerp = [](double a, double b, double u) { return a + (b - a) * u; };
  double r, g, b;
  if (t < 0.5) {
    double u = t / 0.5;
    r = lerp(0x3b, 0xff, u);
    g = lerp(0x4c, 0xff, u);
    b = lerp(0xc0, 0xff, u);
  } else {
    double u = (t - 0.5) / 0.5;
    r = lerp(0xff, 0xb4, u);
    g = lerp(0xff, 0x04, u);
    b = lerp(0xff, 0x26, u);
  }
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", static_cast<int>(std::lround(r)),
                static_cast<int>(std::lround(g)), static_cast<int>(std::lround(b)));
  return buf;
}

std::string fmt_px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string svg_text(double x, double y, const std::string& s, const char* anchor = "middle",
                     int size = 12) {
  return "<text x=\"" + fmt_px(x) + "\" y=\"" + fmt_px(y) + "\" font-family=\"monospace\" font-size=\"" +
         std::to_string(size) + "\" text-anchor=\"" + anchor + "\">" + s + "</text>\n";
}

std::string axis_display_name(CharComponent c) {
  switch (c) {
    case CharComponent::ReAlpha: return "Re(alpha)";
    case CharComponent::ImAlpha: return "Im(alpha)";
    case CharComponent::ReBeta: return "Re(beta)";
    case CharComponent::ImBeta: return "Im(beta)";
  }
  return "?";
}

}  // namespace

void write_svg_heatmap(const std::filesystem::path& path, const CharGrid& grid,
                       const HeatmapSpec& spec) {
  const int nx = grid.x.points, ny = grid.y.points;
  if (nx < 1 || ny < 1 || grid.values.size() != static_cast<size_t>(nx) * ny)
    throw ValidationError("write_svg_heatmap: grid size mismatch");

  double scale = spec.scale_max;
  if (scale <= 0.0) {
    for (const cxd& v : grid.values) scale = std::max(scale, std::abs(v.real()));
    if (scale <= 0.0) scale = 1.0;
  }

  const double ml = 70, mr = 120, mt = 40, mb = 55;
  const double pw = 440, ph = 440;
  const double W = ml + pw + mr, H = mt + ph + mb;
  const double cw = pw / nx, ch = ph / ny;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_px(W) + "\" height=\"" +
       fmt_px(H) + "\" viewBox=\"0 0 " + fmt_px(W) + " " + fmt_px(H) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += svg_text(ml + pw / 2, mt - 14, spec.title, "middle", 14);

  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      double v = grid.at(ix, iy).real();
      double t = (v + scale) / (2.0 * scale);
      double x = ml + ix * cw;
      double y = mt + ph - (iy + 1) * ch;  // y axis increases upward
      s += "<rect x=\"" + fmt_px(x) + "\" y=\"" + fmt_px(y) + "\" width=\"" + fmt_px(cw + 0.5) +
           "\" height=\"" + fmt_px(ch + 0.5) + "\" fill=\"" + diverging_color(t) + "\"/>\n";
    }
  }
  s += "<rect x=\"" + fmt_px(ml) + "\" y=\"" + fmt_px(mt) + "\" width=\"" + fmt_px(pw) +
       "\" height=\"" + fmt_px(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

  // Axis calibration: tick values at the first, middle, and last grid lines.
  auto x_ticks = {0, (nx - 1) / 2, nx - 1};
  for (int i : x_ticks) {
    double px = ml + (i + 0.5) * cw;
    s += "<line x1=\"" + fmt_px(px) + "\" y1=\"" + fmt_px(mt + ph) + "\" x2=\"" + fmt_px(px) +
         "\" y2=\"" + fmt_px(mt + ph + 5) + "\" stroke=\"black\"/>\n";
    s += svg_text(px, mt + ph + 18, format_number(grid.x.at(i)));
  }
  auto y_ticks = {0, (ny - 1) / 2, ny - 1};
  for (int i : y_ticks) {
    double py = mt + ph - (i + 0.5) * ch;
    s += "<line x1=\"" + fmt_px(ml - 5) + "\" y1=\"" + fmt_px(py) + "\" x2=\"" + fmt_px(ml) +
         "\" y2=\"" + fmt_px(py) + "\" stroke=\"black\"/>\n";
    s += svg_text(ml - 8, py + 4, format_number(grid.y.at(i)), "end");
  }
  s += svg_text(ml + pw / 2, H - 12, axis_display_name(grid.x_kind));
  s += "<g transform=\"translate(16," + fmt_px(mt + ph / 2) + ") rotate(-90)\">" +
       svg_text(0, 0, axis_display_name(grid.y_kind)) + "</g>\n";

  // Color bar with printed calibration of the fixed diverging scale.
  const double bx = ml + pw + 25, bw = 18;
  const int nseg = 64;
  for (int i = 0; i < nseg; ++i) {
    double t = (i + 0.5) / nseg;
    double y = mt + ph - (i + 1) * (ph / nseg);
    s += "<rect x=\"" + fmt_px(bx) + "\" y=\"" + fmt_px(y) + "\" width=\"" + fmt_px(bw) +
         "\" height=\"" + fmt_px(ph / nseg + 0.5) + "\" fill=\"" + diverging_color(t) + "\"/>\n";
  }
  s += "<rect x=\"" + fmt_px(bx) + "\" y=\"" + fmt_px(mt) + "\" width=\"" + fmt_px(bw) +
       "\" height=\"" + fmt_px(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
  s += svg_text(bx + bw + 6, mt + 4, "+" + format_number(scale), "start");
  s += svg_text(bx + bw + 6, mt + ph / 2 + 4, "0", "start");
  s += svg_text(bx + bw + 6, mt + ph + 4, "-" + format_number(scale), "start");
  s += svg_text(bx + bw / 2, mt - 10, "Re C");

  s += "</svg>\n";

  std::ofstream out = open_out(path);
  out << s;
  if (!out) throw ValidationError("write failed for '" + path.string() + "'");
}

void write_svg_lineplot(const std::filesystem::path& path, const std::vector<double>& x,
                        const std::vector<LineSeries>& series, const LinePlotSpec& spec) {
  if (x.size() < 2) throw ValidationError("write_svg_lineplot: need at least two x points");
  for (const auto& ser : series)
    if (ser.y.size() != x.size())
      throw ValidationError("write_svg_lineplot: series '" + ser.name + "' length mismatch");

  double xlo = x.front(), xhi = x.back();
  double ylo = series.empty() ? 0.0 : series[0].y[0], yhi = ylo;
  for (const auto& ser : series)
    for (double v : ser.y) {
      ylo = std::min(ylo, v);
      yhi = std::max(yhi, v);
    }
  if (yhi - ylo < 1e-300) {
    ylo -= 1.0;
    yhi += 1.0;
  } else {
    double pad = 0.06 * (yhi - ylo);
    ylo -= pad;
    yhi += pad;
  }
  if (xhi - xlo < 1e-300) xhi = xlo + 1.0;

  const double ml = 80, mr = 160, mt = 40, mb = 55;
  const double pw = 480, ph = 320;
  const double W = ml + pw + mr, H = mt + ph + mb;
  auto X = [&](double v) { return ml + (v - xlo) / (xhi - xlo) * pw; };
  auto Y = [&](double v) { return mt + ph - (v - ylo) / (yhi - ylo) * ph; };

  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  const int npal = 8;

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_px(W) + "\" height=\"" +
       fmt_px(H) + "\" viewBox=\"0 0 " + fmt_px(W) + " " + fmt_px(H) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += svg_text(ml + pw / 2, mt - 14, spec.title, "middle", 14);
  s += "<rect x=\"" + fmt_px(ml) + "\" y=\"" + fmt_px(mt) + "\" width=\"" + fmt_px(pw) +
       "\" height=\"" + fmt_px(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    double fx = xlo + (xhi - xlo) * i / 4.0;
    s += "<line x1=\"" + fmt_px(X(fx)) + "\" y1=\"" + fmt_px(mt + ph) + "\" x2=\"" + fmt_px(X(fx)) +
         "\" y2=\"" + fmt_px(mt + ph + 5) + "\" stroke=\"black\"/>\n";
    s += svg_text(X(fx), mt + ph + 18, format_number(fx));
    double fy = ylo + (yhi - ylo) * i / 4.0;
    s += "<line x1=\"" + fmt_px(ml - 5) + "\" y1=\"" + fmt_px(Y(fy)) + "\" x2=\"" + fmt_px(ml) +
         "\" y2=\"" + fmt_px(Y(fy)) + "\" stroke=\"black\"/>\n";
    s += svg_text(ml - 8, Y(fy) + 4, format_number(fy), "end");
  }
  s += svg_text(ml + pw / 2, H - 12, spec.x_label);
  s += "<g transform=\"translate(18," + fmt_px(mt + ph / 2) + ") rotate(-90)\">" +
       svg_text(0, 0, spec.y_label) + "</g>\n";

  for (size_t k = 0; k < series.size(); ++k) {
    const char* color = palette[k % npal];
    std::string pts;
    for (size_t i = 0; i < x.size(); ++i) {
      pts += fmt_px(X(x[i])) + "," + fmt_px(Y(series[k].y[i]));
      if (i + 1 < x.size()) pts += " ";
    }
    s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
         "\" stroke-width=\"1.5\"/>\n";
    double ly = mt + 16 + 18 * static_cast<double>(k);
    s += "<line x1=\"" + fmt_px(ml + pw + 12) + "\" y1=\"" + fmt_px(ly - 4) + "\" x2=\"" +
         fmt_px(ml + pw + 34) + "\" y2=\"" + fmt_px(ly - 4) + "\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>\n";
    s += svg_text(ml + pw + 40, ly, series[k].name, "start", 11);
  }

  s += "</svg>\n";

  std::ofstream out = open_out(path);
  out << s;
  if (!out) throw ValidationError("write failed for '" + path.string() + "'");
}

}  // namespace sideband
