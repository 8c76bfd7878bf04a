#pragma once

#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <doctest.h>

#include "netspill/graph.hpp"

namespace testutil {

inline void check_graph_invariants(const netspill::Graph& g) {
  std::size_t degree_sum = 0;
  for (netspill::NodeId v = 0; v < g.size(); ++v) {
    const auto nb = g.neighbors(v);
    degree_sum += nb.size();
    for (std::size_t k = 0; k < nb.size(); ++k) {
      REQUIRE(nb[k] != v);
      REQUIRE(nb[k] < g.size());
      if (k > 0) REQUIRE(nb[k - 1] < nb[k]);
      REQUIRE(g.has_edge(nb[k], v));
    }
  }
  REQUIRE(degree_sum == 2 * g.num_edges());
}

inline Eigen::MatrixXd dense(const netspill::Graph& g) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(g.size(), g.size());
  for (const auto& e : g.edges()) {
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  return a;
}

/// Dense A12 (n1 x n2).
inline Eigen::MatrixXd dense_a12(const netspill::LayeredNetwork& net) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(net.n1(), net.n2());
  for (const auto& l : net.interlinks()) a(l.u, l.w) = 1.0;
  return a;
}

inline double symmetric_radius(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

inline double general_radius(const Eigen::MatrixXd& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

/// Scratch directory removed at scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("netspill_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil
