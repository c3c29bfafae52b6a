#ifndef RAMAT_STABILITY_HPP
#define RAMAT_STABILITY_HPP

#include <optional>

#include "ramat/fixed_point.hpp"

namespace ramat {

// Outcome of the stability test lambda < mu(N). `limiting_state` (N') is the
// smallest contender count n with lambda >= mu(n); ties count as unstable.
struct StabilityReport {
  double lambda = 0.0;
  double mu_sat = 0.0;  // mu(N), the saturated rate with every station backlogged
  bool stable = false;
  std::optional<int> limiting_state;  // N'
  double margin = 0.0;  // lambda - mu_sat
};

StabilityReport assess(double lambda, const ServiceRateCurve& curve);

}  // namespace ramat

#endif  // RAMAT_STABILITY_HPP
