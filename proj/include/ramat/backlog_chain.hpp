#ifndef RAMAT_BACKLOG_CHAIN_HPP
#define RAMAT_BACKLOG_CHAIN_HPP

#include <iosfwd>
#include <vector>

#include "ramat/fixed_point.hpp"

namespace ramat {

// Absorbing birth-death chain on the number of backlogged stations.
// States 0..limiting_state; the last state is absorbing. From x < N' the
// chain moves up on an arrival to an idle station, down on a departure that
// leaves the serving queue empty, and self-loops on a departure that leaves
// it backlogged (probability rho_x = lambda / mu(x)).
struct BacklogChain {
  int n_stations = 0;      // N
  int limiting_state = 0;  // N'
  double lambda = 0.0;
  std::vector<double> mu;    // mu[x - 1] for x = 1..N'
  std::vector<double> rho;   // rho[x - 1] for x = 1..N'-1
  std::vector<double> up;    // indexed by x = 0..N'-1
  std::vector<double> down;
  std::vector<double> stay;

  // Total event rate in transient state x (arrivals to idle stations plus
  // departures), used to convert event counts into time.
  double event_rate(int x) const {
    double rate = (n_stations - x) * lambda;
    if (x > 0) rate += x * mu[static_cast<std::size_t>(x) - 1];
    return rate;
  }
};

// Builds the chain for N stations at arrival rate lambda from a saturated
// service-rate curve. Throws StableRegimeError when lambda < mu(n) for all
// n <= N (no absorbing state).
BacklogChain build_chain(int n_stations, double lambda,
                         const ServiceRateCurve& curve);

// Mean number of events (arrivals, departures and self-loops) to reach the
// absorbing state from each state; h[N'] = 0. Solved by eliminating the
// self-loops and sweeping the resulting tridiagonal system.
std::vector<double> hitting_times(const BacklogChain& chain);

// Expected seconds to absorption from state 0: the same linear system with
// per-step cost 1/event_rate(x) instead of 1, which equals the
// fundamental-matrix visit counts weighted by mean holding times.
// `hitting` must be the vector returned by hitting_times(chain).
double expected_hitting_time_seconds(const BacklogChain& chain,
                                     const std::vector<double>& hitting);

// Audit dump: one row per transient state (x, up, down, stay, h(x)).
void write_chain_csv(std::ostream& out, const BacklogChain& chain,
                     const std::vector<double>& hitting);

}  // namespace ramat

#endif  // RAMAT_BACKLOG_CHAIN_HPP
