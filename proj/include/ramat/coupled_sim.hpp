#ifndef RAMAT_COUPLED_SIM_HPP
#define RAMAT_COUPLED_SIM_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ramat/fixed_point.hpp"
#include "ramat/metrics.hpp"
#include "ramat/parallel.hpp"

namespace ramat {

// Monte Carlo model of N coupled queues: Poisson arrivals at rate lambda per
// queue, exponential service at the state-dependent rate mu(n_x) shared by
// the n_x backlogged queues, event times by Gillespie's direct method.
struct CoupledConfig {
  int n_queues = 0;   // N
  int max_queue = 0;  // Q, packets per queue
  double lambda = 0.0;
  ServiceRateCurve curve;
  double theta = 0.0;  // mean-occupancy threshold, packets; 0 = 0.75 * Q
  int preload = 0;     // packets per queue at t = 0
  std::uint64_t max_events = 2'000'000'000;
  std::uint64_t seed = 0;
  // When set, the record carries time spent at each total packet count
  // (capped; last bucket is overflow) for distribution checks.
  bool track_occupancy = false;

  double theta_packets() const { return theta > 0.0 ? theta : 0.75 * max_queue; }
  void validate() const;
};

struct TrajectoryPoint {
  double t;
  int min_queue;
  double mean_queue;
  int max_queue;
};

// Outcome of one replication.
struct TransientRecord {
  std::optional<std::uint64_t> hit_event_index;  // first event with n_x = N'
  std::optional<double> hit_time;                // clock at that event
  std::optional<double> t_theta;  // first time mean occupancy exceeds theta
  std::optional<double> t_e;      // last instant before t_theta with an empty queue
  std::uint64_t total_events = 0;
  bool reached_theta = false;
  std::uint64_t dropped = 0;  // arrivals lost to full queues
  double end_time = 0.0;
  double time_average_queue = 0.0;  // time-weighted mean per-queue occupancy
  std::vector<TrajectoryPoint> trajectory;
  std::vector<double> occupancy_time;  // see CoupledConfig::track_occupancy
};

TransientRecord run_replication(const CoupledConfig& config);

// Mean first-hitting statistics of the limiting state over independent
// replications seeded from config.seed; 95% normal confidence interval.
struct Metric1Summary {
  double mean_events = 0.0;
  double mean_time = 0.0;
  double ci_events_half = 0.0;
  double ci_time_half = 0.0;
  std::size_t hits = 0;
  std::size_t censored = 0;  // replications that never hit the limiting state
};

Metric1Summary metric1_mean(const CoupledConfig& config,
                            std::size_t replications,
                            RunPolicy policy = RunPolicy::Parallel);

Metric2Samples metric2_samples(const CoupledConfig& config,
                               std::size_t replications,
                               RunPolicy policy = RunPolicy::Parallel);

// One row per replication: seed_index, hit_events, hit_time_s, T_theta_s,
// T_E_s, total_events, censored.
void write_replication_csv(std::ostream& out,
                           const std::vector<TransientRecord>& records);

// Downsampled queue evolution of one replication: t_s, min, mean, max.
void write_trajectory_csv(std::ostream& out, const TransientRecord& record);

}  // namespace ramat

#endif  // RAMAT_COUPLED_SIM_HPP
