#include "netspill/params.hpp"

#include <cmath>
#include <string>

#include "netspill/errors.hpp"

namespace netspill {

EpidemicParams EpidemicParams::coupled(double beta11, double beta22, double alpha, double mu) {
  if (!(alpha > 0.0)) throw ParameterError("alpha must be positive");
  if (!(beta11 >= 0.0 && beta22 >= 0.0)) throw ParameterError("infection rates must be non-negative");
  const double cross = std::sqrt(beta11 * beta22) / alpha;
  EpidemicParams p{beta11, cross, cross, beta22, mu, alpha};
  p.validate();
  return p;
}

void EpidemicParams::validate(bool enforce_constraint) const {
  auto check_rate = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError(std::string(name) + " must be a non-negative rate");
  };
  check_rate(beta11, "beta11");
  check_rate(beta12, "beta12");
  check_rate(beta21, "beta21");
  check_rate(beta22, "beta22");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ParameterError("mu must be positive");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ParameterError("alpha must be positive");
  if (enforce_constraint) {
    const double lhs = beta11 * beta22;
    const double rhs = alpha * alpha * beta12 * beta21;
    if (std::abs(lhs - rhs) > 1e-12 * std::max(std::abs(lhs), std::abs(rhs))) {
      throw ParameterError("rates violate beta11*beta22 = alpha^2*beta12*beta21");
    }
  }
}

}  // namespace netspill
