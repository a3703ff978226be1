// Result emission: CSV tables, JSON metadata, and self-contained SVG plots
// (heatmaps and line plots) for every figure-class output. All writers are
// deterministic: no timestamps, no locale dependence, fixed formatting.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "sideband/calibration.hpp"
#include "sideband/evolve.hpp"
#include "sideband/schedule.hpp"
#include "sideband/tomography.hpp"

namespace sideband {

// Shortest faithful decimal ("%.12g", C locale: '.' separator).
std::string format_number(double v);

// A rectangular numeric table; every CSV on disk goes through this.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  void validate() const;  // header nonempty, every row matches header width
};

// Writes header + rows, '\n' line endings, UTF-8 (ASCII subset).
void write_csv(const std::filesystem::path& path, const CsvTable& table);

// t_us followed by every recorded observable column, in recording order.
CsvTable trajectory_table(const Trajectory& traj);
// Axis quadratures and complex value: <x_kind>, <y_kind>, re_C, im_C.
CsvTable char_grid_table(const CharGrid& grid);
// tau_us, objective.
CsvTable sweep_table(const SweepResult& sweep);
// t_us, n_mem2.
CsvTable swap_transfer_table(const SwapTimeResult& result);
// n, ramp_ns, coherence_mult, fidelity, postselect_prob.
CsvTable fidelity_table(const std::vector<RampCoherencePoint>& points);

nlohmann::ordered_json schedule_to_json(const PulseSchedule& schedule);
// Extremum location/value, grid bounds, and quadratic-fit coefficients.
nlohmann::ordered_json sweep_to_json(const SweepResult& sweep);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

// Heatmap of Re C over the grid with a fixed blue-white-red diverging color
// map anchored at [-scale_max, +scale_max] and printed axis/color-scale
// calibration. scale_max <= 0 selects the grid's own max |Re C|.
struct HeatmapSpec {
  std::string title;
  double scale_max = 1.0;
};
void write_svg_heatmap(const std::filesystem::path& path, const CharGrid& grid,
                       const HeatmapSpec& spec);

struct LineSeries {
  std::string name;
  std::vector<double> y;
};
struct LinePlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
};
// Shared-x line plot with axis calibration and a legend (fixed palette).
void write_svg_lineplot(const std::filesystem::path& path, const std::vector<double>& x,
                        const std::vector<LineSeries>& series, const LinePlotSpec& spec);

}  // namespace sideband
