#pragma once

namespace netspill {

/// SIR rates on two coupled layers. beta_mn is the rate at which a
/// susceptible node of layer m is infected by one infected neighbour in
/// layer n; mu is the common recovery rate; alpha couples the cross rates
/// through beta11 * beta22 = alpha^2 * beta12 * beta21.
struct EpidemicParams {
  double beta11 = 0.0;
  double beta12 = 0.0;
  double beta21 = 0.0;
  double beta22 = 0.0;
  double mu = 1.0;
  double alpha = 1.0;

  /// Symmetric cross rates beta12 = beta21 = sqrt(beta11 * beta22) / alpha.
  static EpidemicParams coupled(double beta11, double beta22, double alpha, double mu = 1.0);

  /// Throws ParameterError on negative rates, non-positive mu or alpha, or
  /// (when requested) a violated coupling constraint beyond relative 1e-12.
  void validate(bool enforce_constraint = false) const;

  double tau11() const noexcept { return beta11 / mu; }
  double tau12() const noexcept { return beta12 / mu; }
  double tau21() const noexcept { return beta21 / mu; }
  double tau22() const noexcept { return beta22 / mu; }
};

}  // namespace netspill
