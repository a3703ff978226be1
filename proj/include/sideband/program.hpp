// CoefficientProgram: the time axis of a simulation. A program is an ordered
// list of segments, each holding per-channel envelopes (real coefficient in
// rad/us) and a quadrature phase, plus instantaneous qubit unitaries applied
// at segment boundaries.
#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sideband/common.hpp"
#include "sideband/state.hpp"

namespace sideband {

enum class EnvelopeShape {
  Constant,
  RampUpCosine,    // amplitude * (1 - cos(pi t/T)) / 2
  RampDownCosine,  // amplitude * (1 + cos(pi t/T)) / 2
  RampUpLinear,    // amplitude * t/T
  RampDownLinear,  // amplitude * (1 - t/T)
};

const char* envelope_shape_name(EnvelopeShape s);

struct Envelope {
  EnvelopeShape shape = EnvelopeShape::Constant;
  double amplitude = 0.0;  // peak value (rad/us for Hamiltonian channels)
  double duration = 0.0;   // ramp duration; ignored for Constant

  // Value at local time t in [0, duration of the enclosing segment].
  double value(double t_local) const;
  // Time derivative of value at local time t.
  double slope(double t_local) const;
};

struct SegmentChannel {
  Envelope envelope;
  double phase = 0.0;  // quadrature phase in radians
};

struct Segment {
  double duration = 0.0;  // us, > 0
  std::map<std::string, SegmentChannel> channels;  // absent channel = off
  std::string tag;  // human-readable marker ("ramp_up", "hold", ...)
};

// Instantaneous qubit unitary applied at the boundary before segment
// `before_segment` (index == segments.size() means after the final segment).
struct InstantEvent {
  int before_segment = 0;
  MatrixXcd qubit_unitary;  // 2x2
  std::string tag;
};

struct CoefficientProgram {
  Frame frame = Frame::DriveFrame;
  std::vector<Segment> segments;
  std::vector<InstantEvent> events;  // sorted by before_segment
  // Initial qubit occupation for runs that start inside this frame (JC-frame
  // compilation folds the state-prep pulse into this instead of an event).
  int initial_qubit = 0;

  double total_duration() const;
  // Start time of segment i (i == segments.size() gives the total duration).
  double segment_start(int i) const;
  std::set<std::string> channel_names() const;
  // Throws ValidationError on non-positive durations, unsorted events,
  // out-of-range event indices, or non-2x2 event unitaries.
  void validate() const;
};

}  // namespace sideband
