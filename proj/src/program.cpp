#include "sideband/program.hpp"

#include <cmath>

namespace sideband {

const char* envelope_shape_name(EnvelopeShape s) {
  switch (s) {
    case EnvelopeShape::Constant: return "constant";
    case EnvelopeShape::RampUpCosine: return "ramp_up_cosine";
    case EnvelopeShape::RampDownCosine: return "ramp_down_cosine";
    case EnvelopeShape::RampUpLinear: return "ramp_up_linear";
    case EnvelopeShape::RampDownLinear: return "ramp_down_linear";
  }
  return "unknown";
}

double Envelope::value(double t_local) const {
  switch (shape) {
    case EnvelopeShape::Constant:
      return amplitude;
    case EnvelopeShape::RampUpCosine:
      if (duration <= 0.0) return amplitude;
      return amplitude * 0.5 * (1.0 - std::cos(kTwoPi / 2.0 * t_local / duration));
    case EnvelopeShape::RampDownCosine:
      if (duration <= 0.0) return 0.0;
      return amplitude * 0.5 * (1.0 + std::cos(kTwoPi / 2.0 * t_local / duration));
    case EnvelopeShape::RampUpLinear:
      if (duration <= 0.0) return amplitude;
      return amplitude * (t_local / duration);
    case EnvelopeShape::RampDownLinear:
      if (duration <= 0.0) return 0.0;
      return amplitude * (1.0 - t_local / duration);
  }
  return 0.0;
}

double Envelope::slope(double t_local) const {
  const double pi = kTwoPi / 2.0;
  switch (shape) {
    case EnvelopeShape::Constant:
      return 0.0;
    case EnvelopeShape::RampUpCosine:
      if (duration <= 0.0) return 0.0;
      return amplitude * 0.5 * (pi / duration) * std::sin(pi * t_local / duration);
    case EnvelopeShape::RampDownCosine:
      if (duration <= 0.0) return 0.0;
      return -amplitude * 0.5 * (pi / duration) * std::sin(pi * t_local / duration);
    case EnvelopeShape::RampUpLinear:
      if (duration <= 0.0) return 0.0;
      return amplitude / duration;
    case EnvelopeShape::RampDownLinear:
      if (duration <= 0.0) return 0.0;
      return -amplitude / duration;
  }
  return 0.0;
}

double CoefficientProgram::total_duration() const {
  double total = 0.0;
  for (const auto& s : segments) total += s.duration;
  return total;
}

double CoefficientProgram::segment_start(int i) const {
  double t = 0.0;
  for (int k = 0; k < i && k < static_cast<int>(segments.size()); ++k)
    t += segments[static_cast<size_t>(k)].duration;
  return t;
}

std::set<std::string> CoefficientProgram::channel_names() const {
  std::set<std::string> names;
  for (const auto& s : segments)
    for (const auto& [name, ch] : s.channels) names.insert(name);
  return names;
}

void CoefficientProgram::validate() const {
  for (size_t i = 0; i < segments.size(); ++i) {
    if (!(segments[i].duration > 0.0))
      throw ValidationError("program segment " + std::to_string(i) +
                            " has non-positive duration");
  }
  int prev = -1;
  for (const auto& ev : events) {
    if (ev.before_segment < prev)
      throw ValidationError("program events are not sorted by segment index");
    prev = ev.before_segment;
    if (ev.before_segment < 0 || ev.before_segment > static_cast<int>(segments.size()))
      throw ValidationError("program event index out of range");
    if (ev.qubit_unitary.rows() != 2 || ev.qubit_unitary.cols() != 2)
      throw ValidationError("program event unitary must be 2x2");
  }
  if (initial_qubit != 0 && initial_qubit != 1)
    throw ValidationError("program initial_qubit must be 0 or 1");
}

}  // namespace sideband
