#include "netspill/spectral.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "netspill/errors.hpp"
#include "netspill/format.hpp"
#include "netspill/parallel.hpp"

namespace netspill::spectral {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

PowerResult spectral_radius(const LinearOperator& op, std::size_t n, const PowerOptions& options) {
  if (n == 0) throw ParameterError("operator dimension must be positive");
  PowerResult result;
  std::vector<double>& v = result.vector;
  v.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> w(n);
  op(v, w);

  const double first = norm(w);
  if (first == 0.0) return result;  // zero operator on the start vector
  const double shift = 0.5 * first;

  double residual = 0.0;
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    const double rho = dot(v, w);
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual += (w[i] - rho * v[i]) * (w[i] - rho * v[i]);
    residual = std::sqrt(residual);
    result.iterations = it;
    if (residual <= options.tol * std::abs(rho)) {
      result.rho = rho;
      result.residual = residual;
      if (std::accumulate(v.begin(), v.end(), 0.0) < 0.0) {
        for (double& x : v) x = -x;
      }
      return result;
    }
    for (std::size_t i = 0; i < n; ++i) w[i] += shift * v[i];
    const double scale = norm(w);
    if (scale == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / scale;
    op(v, w);
  }
  throw ConvergenceError("power iteration did not converge in " + std::to_string(options.max_iter) + " iterations",
                         residual);
}

double adjacency_spectral_radius(const Graph& g, const PowerOptions& options) {
  if (g.size() == 0) return 0.0;
  return spectral_radius([&g](std::span<const double> x, std::span<double> y) { g.multiply(x, y); }, g.size(),
                         options)
      .rho;
}

// ---------------------------------------------------------------------------

class HtOperator::InnerSolver {
 public:
  InnerSolver(std::shared_ptr<const Graph> a22, double tau22) : a22_(std::move(a22)), tau22_(tau22) {
    const NodeId n = a22_->size();
    if (n <= kDenseLimit) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
      for (NodeId v = 0; v < n; ++v) {
        for (NodeId z : a22_->neighbors(v)) m(v, z) -= tau22;
      }
      llt_.compute(m);
      if (llt_.info() != Eigen::Success) {
        throw SupercriticalError("I - tau22 A22 is not positive definite; layer 2 is supercritical");
      }
      dense_ = true;
    }
  }

  void solve(std::span<const double> b, std::span<double> z) const {
    const auto n = static_cast<Eigen::Index>(b.size());
    if (dense_) {
      Eigen::Map<const Eigen::VectorXd> rhs(b.data(), n);
      Eigen::Map<Eigen::VectorXd> out(z.data(), n);
      out = llt_.solve(rhs);
      // One refinement step keeps the residual well under 1e-10 relative.
      Eigen::VectorXd r(n);
      apply_matrix(z, {r.data(), static_cast<std::size_t>(n)});
      r = rhs - r;
      out += llt_.solve(r);
      return;
    }
    conjugate_gradient(b, z);
  }

 private:
  // y = (I - tau22 A22) x
  void apply_matrix(std::span<const double> x, std::span<double> y) const {
    a22_->multiply(x, y);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] - tau22_ * y[i];
  }

  void conjugate_gradient(std::span<const double> b, std::span<double> x) const {
    const std::size_t n = b.size();
    std::fill(x.begin(), x.end(), 0.0);
    std::vector<double> r(b.begin(), b.end()), p(r), ap(n);
    const double target = 1e-10 * norm(b);
    double rr = dot(r, r);
    for (std::size_t it = 0; it < 10 * n + 100; ++it) {
      if (std::sqrt(rr) <= target) return;
      apply_matrix(p, ap);
      const double step = rr / dot(p, ap);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] += step * p[i];
        r[i] -= step * ap[i];
      }
      const double rr_next = dot(r, r);
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + (rr_next / rr) * p[i];
      rr = rr_next;
    }
    if (std::sqrt(rr) > target) throw ConvergenceError("inner conjugate gradient solve stalled", std::sqrt(rr));
  }

  std::shared_ptr<const Graph> a22_;
  double tau22_;
  bool dense_ = false;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

HtOperator::HtOperator(const LayeredNetwork& net, double tau22, double alpha, std::optional<double> lambda2,
                       const PowerOptions& power)
    : net_(net), tau22_(tau22), alpha_(alpha) {
  if (!(tau22 >= 0.0)) throw ParameterError("tau22 must be non-negative");
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  lambda2_ = lambda2 ? *lambda2 : adjacency_spectral_radius(net_.layer2(), power);
  if (tau22_ * lambda2_ >= 1.0) {
    throw SupercriticalError("tau22 * lambda(A22) = " + format_double(tau22_ * lambda2_) +
                             " >= 1: layer 2 sustains the epidemic alone and the layer-1 threshold is undefined");
  }
  if (tau22_ > 0.0 && !net_.interlinks().empty()) {
    solver_ = std::make_shared<const InnerSolver>(net_.layer2_ptr(), tau22_);
  }
}

void HtOperator::apply(std::span<const double> x, std::span<double> y) const {
  net_.layer1().multiply(x, y);
  if (!solver_) return;
  std::vector<double> t(net_.n2()), s(net_.n2()), z(net_.n1());
  net_.multiply_a21(x, t);
  solver_->solve(t, s);
  net_.multiply_a12(s, z);
  const double weight = tau22_ / (alpha_ * alpha_);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += weight * z[i];
}

void HtOperator::solve_inner(std::span<const double> b, std::span<double> z) const {
  if (solver_) {
    solver_->solve(b, z);
    return;
  }
  InnerSolver(net_.layer2_ptr(), tau22_).solve(b, z);
}

LinearOperator HtOperator::as_operator() const {
  return [this](std::span<const double> x, std::span<double> y) { apply(x, y); };
}

HtOperator build_ht_operator(const LayeredNetwork& net, double tau22, double alpha) {
  return HtOperator(net, tau22, alpha);
}

double epidemic_threshold(const LayeredNetwork& net, double tau22, double alpha, const PowerOptions& options) {
  if (net.n1() == 0) throw ParameterError("layer 1 is empty");
  const HtOperator ht(net, tau22, alpha, std::nullopt, options);
  const double rho = spectral_radius(ht.as_operator(), ht.dimension(), options).rho;
  if (!(rho > 0.0)) throw NumericError("H_T vanishes: layer 1 has no edges and no coupling, threshold unbounded");
  return 1.0 / rho;
}

PowerResult block_power(const LayeredNetwork& net, double tau11, double tau12, double tau21, double tau22,
                        const PowerOptions& options) {
  for (double t : {tau11, tau12, tau21, tau22}) {
    if (!(t >= 0.0)) throw ParameterError("block strengths must be non-negative");
  }
  const NodeId n1 = net.n1();
  const NodeId n2 = net.n2();
  auto op = [&](std::span<const double> x, std::span<double> y) {
    auto x1 = x.first(n1);
    auto x2 = x.subspan(n1);
    auto y1 = y.first(n1);
    auto y2 = y.subspan(n1);
    std::vector<double> cross1(n1), cross2(n2);
    net.layer1().multiply(x1, y1);
    net.multiply_a12(x2, cross1);
    for (NodeId i = 0; i < n1; ++i) y1[i] = tau11 * y1[i] + tau12 * cross1[i];
    net.layer2().multiply(x2, y2);
    net.multiply_a21(x1, cross2);
    for (NodeId i = 0; i < n2; ++i) y2[i] = tau22 * y2[i] + tau21 * cross2[i];
  };
  return spectral_radius(op, static_cast<std::size_t>(n1) + n2, options);
}

double block_spectral_radius(const LayeredNetwork& net, double tau11, double tau12, double tau21, double tau22,
                             const PowerOptions& options) {
  return block_power(net, tau11, tau12, tau21, tau22, options).rho;
}

double jacobian_leading_eigenvalue(const LayeredNetwork& net, const EpidemicParams& params,
                                   const PowerOptions& options) {
  params.validate();
  const double rho =
      block_spectral_radius(net, params.tau11(), params.tau12(), params.tau21(), params.tau22(), options);
  return params.mu * rho - params.mu;
}

ThresholdCurve threshold_curve(const LayeredNetwork& net, double alpha, std::span<const double> tau2_grid,
                               const CurveOptions& options) {
  for (std::size_t i = 0; i < tau2_grid.size(); ++i) {
    if (!(tau2_grid[i] >= 0.0 && tau2_grid[i] < 1.0)) {
      throw ParameterError("normalised tau2 grid values must lie in [0, 1)");
    }
    if (i > 0 && !(tau2_grid[i] > tau2_grid[i - 1])) throw ParameterError("tau2 grid must be strictly increasing");
  }
  ThresholdCurve curve;
  curve.alpha = alpha;
  curve.lambda1 = adjacency_spectral_radius(net.layer1(), options.power);
  curve.lambda2 = adjacency_spectral_radius(net.layer2(), options.power);
  if (!(curve.lambda1 > 0.0) || !(curve.lambda2 > 0.0)) {
    throw ParameterError("both layers need at least one edge to normalise strengths");
  }
  const double capacity = static_cast<double>(net.n1()) * net.n2();
  curve.omega = options.omega ? *options.omega : static_cast<double>(net.interlinks().size()) / capacity;

  curve.points.resize(tau2_grid.size());
  parallel_for(tau2_grid.size(), options.threads, [&](std::size_t i, unsigned) {
    const double tau22 = tau2_grid[i] / curve.lambda2;
    const HtOperator ht(net, tau22, alpha, curve.lambda2, options.power);
    const double rho = spectral_radius(ht.as_operator(), ht.dimension(), options.power).rho;
    curve.points[i] = {tau2_grid[i], curve.lambda1 / rho};
  });
  return curve;
}

void write_threshold_csv(std::ostream& out, std::span<const ThresholdCurve> curves) {
  out << "tau2,tau_c1,omega,alpha,lambda1,lambda2\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out << format_double(p.tau2) << ',' << format_double(p.tau_c1) << ',' << format_double(c.omega) << ','
          << format_double(c.alpha) << ',' << format_double(c.lambda1) << ',' << format_double(c.lambda2) << '\n';
    }
  }
}

}  // namespace netspill::spectral
