#include "distopt/graph.hpp"

#include <queue>
#include <stdexcept>
#include <string>

#include "distopt/errors.hpp"

namespace distopt {

Topology::Topology(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
  if (weights_.rows() != weights_.cols()) {
    throw ValidationError("topology weights must be square");
  }
  const auto n = weights_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (weights_(i, i) != 0.0) {
      throw ValidationError("topology weights must have a zero diagonal");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(weights_(i, j) >= 0.0)) {
        throw ValidationError("topology weights must be nonnegative");
      }
      if (weights_(i, j) != weights_(j, i)) {
        throw ValidationError("topology weights must be symmetric");
      }
    }
  }
}

Topology Topology::from_edges(
    std::size_t n_agents,
    const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n_agents, n_agents);
  for (const auto& [i, j, weight] : edges) {
    if (i < 1 || j < 1 || i > n_agents || j > n_agents) {
      throw ValidationError("edge (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") references a missing agent");
    }
    if (i == j) throw ValidationError("self-loops are not allowed");
    if (!(weight >= 0.0)) {
      throw ValidationError("edge weights must be nonnegative");
    }
    w(i - 1, j - 1) = weight;
    w(j - 1, i - 1) = weight;
  }
  return Topology(std::move(w));
}

Topology Topology::empty(std::size_t n_agents) {
  return Topology(Eigen::MatrixXd::Zero(n_agents, n_agents));
}

Eigen::MatrixXd laplacian(const Topology& topology) {
  Eigen::MatrixXd l = -topology.weights();
  for (Eigen::Index i = 0; i < l.rows(); ++i) {
    l(i, i) = topology.weights().row(i).sum();
  }
  return l;
}

bool is_connected(const Topology& topology) {
  const std::size_t n = topology.size();
  if (n <= 1) return true;
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const std::size_t i = frontier.front();
    frontier.pop();
    for (std::size_t j = 0; j < n; ++j) {
      if (!seen[j] && topology.weight(i, j) > 0.0) {
        seen[j] = true;
        ++reached;
        frontier.push(j);
      }
    }
  }
  return reached == n;
}

std::vector<std::size_t> neighbors(const Topology& topology, std::size_t i) {
  if (i >= topology.size()) {
    throw std::out_of_range("agent index " + std::to_string(i) +
                            " out of range");
  }
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < topology.size(); ++j) {
    if (topology.weight(i, j) > 0.0) out.push_back(j);
  }
  return out;
}

}  // namespace distopt
