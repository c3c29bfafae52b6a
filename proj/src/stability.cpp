#include "ramat/stability.hpp"

#include <stdexcept>

namespace ramat {

StabilityReport assess(double lambda, const ServiceRateCurve& curve) {
  if (curve.mu.empty()) throw std::invalid_argument("assess: empty service rate curve");
  if (!(lambda > 0)) throw std::invalid_argument("assess: lambda must be > 0");

  StabilityReport report;
  report.lambda = lambda;
  report.mu_sat = curve.mu.back();
  report.stable = lambda < report.mu_sat;
  report.margin = lambda - report.mu_sat;
  for (int n = 1; n <= curve.max_contenders(); ++n) {
    if (lambda >= curve.at(n)) {
      report.limiting_state = n;
      break;
    }
  }
  return report;
}

}  // namespace ramat
