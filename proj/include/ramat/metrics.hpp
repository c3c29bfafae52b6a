#ifndef RAMAT_METRICS_HPP
#define RAMAT_METRICS_HPP

#include <cstddef>
#include <vector>

namespace ramat {

// End-of-transitory samples (T_E), one per replication that crossed the
// occupancy threshold. Shared by the coupled-queue and slot-level simulators.
struct Metric2Samples {
  std::vector<double> t_e;     // sorted ascending
  std::size_t censored = 0;    // never crossed theta
  std::size_t undefined = 0;   // crossed theta but no queue was ever empty
};

}  // namespace ramat

#endif  // RAMAT_METRICS_HPP
