// SubsystemLayout: the ordered tensor-product structure (modes + qubit).
#pragma once

#include <string>
#include <vector>

#include "sideband/common.hpp"

namespace sideband {

// Ordered list of subsystems. The first label is the most significant tensor
// index: basis state |n_0, n_1, ..., q> has flat index
// ((n_0 * d_1 + n_1) * d_2 + ...) .
class SubsystemLayout {
 public:
  SubsystemLayout() = default;
  SubsystemLayout(std::vector<std::string> labels, std::vector<int> dims);

  static SubsystemLayout single(const std::string& label, int dim);

  int subsystem_count() const { return static_cast<int>(dims_.size()); }
  int dim(int k) const { return dims_.at(static_cast<size_t>(k)); }
  int dim_of(const std::string& label) const { return dims_.at(static_cast<size_t>(index_of(label))); }
  const std::string& label(int k) const { return labels_.at(static_cast<size_t>(k)); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<int>& dims() const { return dims_; }

  // Total Hilbert-space dimension (product of subsystem dims).
  int total_dim() const { return total_dim_; }

  int index_of(const std::string& label) const;  // throws ValidationError on unknown label
  bool has(const std::string& label) const;

  // Stride of subsystem k in the flat index (product of dims right of k).
  int stride(int k) const { return strides_.at(static_cast<size_t>(k)); }

  // Flat index from per-subsystem occupation numbers.
  int flat_index(const std::vector<int>& occupations) const;

  bool operator==(const SubsystemLayout& other) const {
    return labels_ == other.labels_ && dims_ == other.dims_;
  }
  bool operator!=(const SubsystemLayout& other) const { return !(*this == other); }

  std::string to_string() const;

 private:
  std::vector<std::string> labels_;
  std::vector<int> dims_;
  std::vector<int> strides_;
  int total_dim_ = 1;
};

}  // namespace sideband
