#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "netspill/graph.hpp"
#include "netspill/params.hpp"

namespace netspill::spectral {

/// y = Op x. Implementations must not retain the spans.
using LinearOperator = std::function<void(std::span<const double> x, std::span<double> y)>;

struct PowerOptions {
  double tol = 1e-10;
  std::size_t max_iter = 100000;
};

struct PowerResult {
  double rho = 0.0;
  std::vector<double> vector;  // unit 2-norm, sign fixed so the entries sum to >= 0
  std::size_t iterations = 0;
  double residual = 0.0;  // ||Op v - rho v||
};

/// Dominant eigenvalue of a real operator with a non-negative Perron root.
///
/// Power iteration from the all-ones vector on Op + c I, where the shift c
/// is half the first Rayleigh estimate. The shift removes the -rho
/// eigenvalue of bipartite structures from the dominant set without
/// changing the eigenvectors. Stops when ||Op v - rho v|| <= tol * rho.
/// Throws ConvergenceError after max_iter iterations.
PowerResult spectral_radius(const LinearOperator& op, std::size_t n, const PowerOptions& options = {});

/// lambda(A) of an adjacency matrix.
double adjacency_spectral_radius(const Graph& g, const PowerOptions& options = {});

/// Matrix-free action of
///   H_T = A11 + (tau22 / alpha^2) A12 (I - tau22 A22)^{-1} A12^T
/// (tau11 H_T is the Schur complement of the block matrix under the
/// coupling constraint tau11 tau22 = alpha^2 tau12 tau21.)
/// on layer-1 vectors. The inner system is SPD when tau22 * lambda(A22) < 1;
/// it is factored densely for n2 <= 2000 and solved by conjugate gradients
/// to relative residual 1e-10 otherwise.
class HtOperator {
 public:
  static constexpr std::size_t kDenseLimit = 2000;

  HtOperator(const LayeredNetwork& net, double tau22, double alpha, std::optional<double> lambda2 = std::nullopt,
             const PowerOptions& power = {});

  std::size_t dimension() const noexcept { return net_.n1(); }
  double tau22() const noexcept { return tau22_; }
  double alpha() const noexcept { return alpha_; }
  double lambda2() const noexcept { return lambda2_; }

  void apply(std::span<const double> x, std::span<double> y) const;

  /// Solves (I - tau22 A22) z = b.
  void solve_inner(std::span<const double> b, std::span<double> z) const;

  /// Valid while *this is alive.
  LinearOperator as_operator() const;

  class InnerSolver;

 private:
  LayeredNetwork net_;
  double tau22_;
  double alpha_;
  double lambda2_;
  std::shared_ptr<const InnerSolver> solver_;
};

/// Throws SupercriticalError when tau22 * lambda(A22) >= 1.
HtOperator build_ht_operator(const LayeredNetwork& net, double tau22, double alpha);

/// Critical layer-1 strength tau11c = 1 / rho(H_T).
double epidemic_threshold(const LayeredNetwork& net, double tau22, double alpha, const PowerOptions& options = {});

/// rho of [t11 A11, t12 A12; t21 A21, t22 A22], matrix-free.
PowerResult block_power(const LayeredNetwork& net, double tau11, double tau12, double tau21, double tau22,
                        const PowerOptions& options = {});
double block_spectral_radius(const LayeredNetwork& net, double tau11, double tau12, double tau21, double tau22,
                             const PowerOptions& options = {});

/// Leading eigenvalue of the linearised SIR Jacobian
///   [b11 A11, b12 A12; b21 A21, b22 A22] - mu I.
double jacobian_leading_eigenvalue(const LayeredNetwork& net, const EpidemicParams& params,
                                   const PowerOptions& options = {});

struct CurvePoint {
  double tau2 = 0.0;   // tau22 * lambda(A22)
  double tau_c1 = 0.0; // tau11c * lambda(A11)
};

struct ThresholdCurve {
  std::vector<CurvePoint> points;
  double alpha = 1.0;
  double omega = 0.0;  // coupling descriptor; defaults to realised link density
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

struct CurveOptions {
  PowerOptions power;
  unsigned threads = 1;
  std::optional<double> omega;
};

/// Normalised threshold tau_c1 against normalised layer-2 strength tau2.
/// The grid must be strictly increasing inside [0, 1).
ThresholdCurve threshold_curve(const LayeredNetwork& net, double alpha, std::span<const double> tau2_grid,
                               const CurveOptions& options = {});

/// "tau2,tau_c1,omega,alpha,lambda1,lambda2" with a header row.
void write_threshold_csv(std::ostream& out, std::span<const ThresholdCurve> curves);

}  // namespace netspill::spectral
