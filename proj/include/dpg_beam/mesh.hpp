#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpg_beam {

/// Closed interval [left, right] of one mesh element.
struct Element {
  double left = 0.0;
  double right = 1.0;

  double size() const noexcept { return right - left; }
  double midpoint() const noexcept { return 0.5 * (left + right); }
};

/// Partition 0 = x_0 < x_1 < ... < x_n = 1 of the unit interval.
///
/// Only node positions are stored; element sizes are derived from them.
class Mesh {
 public:
  explicit Mesh(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) {
      throw std::invalid_argument("Mesh: need at least one element");
    }
    if (nodes_.front() != 0.0 || nodes_.back() != 1.0) {
      throw std::invalid_argument("Mesh: nodes must start at 0 and end at 1");
    }
    for (std::size_t j = 1; j < nodes_.size(); ++j) {
      if (!(nodes_[j - 1] < nodes_[j])) {
        throw std::invalid_argument("Mesh: nodes must be strictly increasing (index " +
                                    std::to_string(j) + ")");
      }
    }
  }

  std::size_t num_elements() const noexcept { return nodes_.size() - 1; }
  std::size_t num_nodes() const noexcept { return nodes_.size(); }
  std::span<const double> nodes() const noexcept { return nodes_; }

  /// Element j spans [x_j, x_{j+1}] (zero based).
  Element element(std::size_t j) const { return {nodes_.at(j), nodes_.at(j + 1)}; }
  double element_size(std::size_t j) const { return element(j).size(); }

  double max_element_size() const noexcept {
    double h = 0.0;
    for (std::size_t j = 0; j + 1 < nodes_.size(); ++j) {
      h = std::max(h, nodes_[j + 1] - nodes_[j]);
    }
    return h;
  }

  /// Index of the element containing x; nodes belong to the element on their left
  /// except x = 0.
  std::size_t locate(double x) const {
    if (x < 0.0 || x > 1.0) throw std::out_of_range("Mesh::locate: x outside [0,1]");
    auto it = std::lower_bound(nodes_.begin() + 1, nodes_.end(), x);
    return static_cast<std::size_t>(std::distance(nodes_.begin() + 1, it));
  }

  bool operator==(const Mesh&) const = default;

 private:
  std::vector<double> nodes_;
};

/// Uniform mesh with nodes j/n.
inline Mesh uniform_mesh(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_mesh: n must be positive");
  std::vector<double> nodes(n + 1);
  for (std::size_t j = 0; j <= n; ++j) {
    nodes[j] = static_cast<double>(j) / static_cast<double>(n);
  }
  nodes.back() = 1.0;
  return Mesh(std::move(nodes));
}

/// Bisects every element at its midpoint.
inline Mesh refine_uniform(const Mesh& mesh) {
  const auto old = mesh.nodes();
  std::vector<double> nodes;
  nodes.reserve(2 * old.size() - 1);
  nodes.push_back(old.front());
  for (std::size_t j = 1; j < old.size(); ++j) {
    nodes.push_back(0.5 * (old[j - 1] + old[j]));
    nodes.push_back(old[j]);
  }
  return Mesh(std::move(nodes));
}

}  // namespace dpg_beam
