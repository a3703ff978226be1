#include "sideband/layout.hpp"

#include <set>
#include <sstream>

namespace sideband {

SubsystemLayout::SubsystemLayout(std::vector<std::string> labels, std::vector<int> dims)
    : labels_(std::move(labels)), dims_(std::move(dims)) {
  if (labels_.size() != dims_.size()) {
    throw ValidationError("SubsystemLayout: labels and dims must have equal length");
  }
  if (labels_.empty()) {
    throw ValidationError("SubsystemLayout: at least one subsystem required");
  }
  std::set<std::string> seen;
  for (size_t k = 0; k < labels_.size(); ++k) {
    if (!seen.insert(labels_[k]).second) {
      throw ValidationError("SubsystemLayout: duplicate label '" + labels_[k] + "'");
    }
    if (dims_[k] < 2) {
      throw ValidationError("SubsystemLayout: dim of '" + labels_[k] + "' must be >= 2");
    }
    if (labels_[k] == "qubit" && dims_[k] != 2) {
      throw ValidationError("SubsystemLayout: qubit dim must be exactly 2");
    }
  }
  total_dim_ = 1;
  for (int d : dims_) total_dim_ *= d;
  strides_.assign(dims_.size(), 1);
  for (int k = static_cast<int>(dims_.size()) - 2; k >= 0; --k) {
    strides_[static_cast<size_t>(k)] =
        strides_[static_cast<size_t>(k) + 1] * dims_[static_cast<size_t>(k) + 1];
  }
}

SubsystemLayout SubsystemLayout::single(const std::string& label, int dim) {
  return SubsystemLayout({label}, {dim});
}

int SubsystemLayout::index_of(const std::string& label) const {
  for (size_t k = 0; k < labels_.size(); ++k) {
    if (labels_[k] == label) return static_cast<int>(k);
  }
  throw ValidationError("SubsystemLayout: unknown label '" + label + "'");
}

bool SubsystemLayout::has(const std::string& label) const {
  for (const auto& l : labels_) {
    if (l == label) return true;
  }
  return false;
}

int SubsystemLayout::flat_index(const std::vector<int>& occupations) const {
  if (occupations.size() != dims_.size()) {
    throw ValidationError("SubsystemLayout::flat_index: occupation count mismatch");
  }
  int idx = 0;
  for (size_t k = 0; k < dims_.size(); ++k) {
    if (occupations[k] < 0 || occupations[k] >= dims_[k]) {
      throw ValidationError("SubsystemLayout::flat_index: occupation out of range for '" +
                            labels_[k] + "'");
    }
    idx += occupations[k] * strides_[k];
  }
  return idx;
}

std::string SubsystemLayout::to_string() const {
  std::ostringstream os;
  os << "[";
  for (size_t k = 0; k < labels_.size(); ++k) {
    if (k) os << ", ";
    os << labels_[k] << ":" << dims_[k];
  }
  os << "]";
  return os.str();
}

}  // namespace sideband
