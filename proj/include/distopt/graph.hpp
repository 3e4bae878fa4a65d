#pragma once

#include <cstddef>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

namespace distopt {

// Weighted undirected information-sharing graph over N agents. Agents are
// indexed from 0 in the library; config files use 1-based indices.
class Topology {
 public:
  // Throws ValidationError unless `weights` is square, symmetric, nonnegative
  // and has a zero diagonal.
  Topology() = default;
  explicit Topology(Eigen::MatrixXd weights);

  // Edge list with 1-based endpoints: (i, j, weight).
  static Topology from_edges(
      std::size_t n_agents,
      const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges);

  static Topology empty(std::size_t n_agents);

  std::size_t size() const { return static_cast<std::size_t>(weights_.rows()); }
  double weight(std::size_t i, std::size_t j) const { return weights_(i, j); }
  const Eigen::MatrixXd& weights() const { return weights_; }

 private:
  Eigen::MatrixXd weights_;
};

// l_ii = sum_{j != i} a_ij, l_ij = -a_ij.
Eigen::MatrixXd laplacian(const Topology& topology);

// Breadth-first search from agent 0 over positive-weight edges.
bool is_connected(const Topology& topology);

// Indices j with a_ij > 0, ascending. Throws std::out_of_range for bad i.
std::vector<std::size_t> neighbors(const Topology& topology, std::size_t i);

}  // namespace distopt
