#ifndef RAMAT_DCF_SIM_HPP
#define RAMAT_DCF_SIM_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ramat/metrics.hpp"
#include "ramat/parallel.hpp"
#include "ramat/protocol.hpp"

namespace ramat {

enum class TrafficModel { Poisson, Cbr, Bursty };

std::string to_string(TrafficModel traffic);

// Slot-level simulation of N DCF stations with finite queues.
struct DcfSimConfig {
  ProtocolParams params;  // protocol must be Dcf
  int n_stations = 0;
  int max_queue = 0;  // Q, packets
  double lambda = 0.0;  // packets/s per station; 0 disables arrivals
  double theta = 0.0;   // mean-occupancy threshold, packets; 0 = 0.75 * Q
  int preload = 0;
  double horizon = 86400.0;      // seconds
  double throughput_bin = 1.0;   // seconds
  // Post-success hold: the station stays off the channel for an
  // exponentially distributed time after every delivery.
  std::optional<double> mitigation_mean_delay;
  TrafficModel traffic = TrafficModel::Poisson;
  int burst_size = 10;     // packets per burst (Bursty)
  double burst_gap = 1.0;  // seconds between bursts (Bursty)
  std::uint64_t seed = 0;

  double theta_packets() const { return theta > 0.0 ? theta : 0.75 * max_queue; }
  void validate() const;  // throws; InvalidProtocolError if not Dcf
};

struct ThroughputBin {
  double t;     // bin start, seconds
  double bits;  // payload bits delivered in the bin
};

struct QueueSample {
  double t;
  int min_queue;
  double mean_queue;
  int max_queue;
};

struct SimTrace {
  std::vector<ThroughputBin> throughput_series;
  std::vector<QueueSample> queue_series;  // sampled once per throughput bin
  std::optional<double> t_theta;
  std::optional<double> t_e;
  std::uint64_t arrivals = 0;
  std::uint64_t delivered_packets = 0;
  std::uint64_t collisions = 0;  // collision slots
  std::uint64_t drops = 0;
  std::uint64_t empty_slots = 0;
  std::uint64_t queued_at_end = 0;
  double end_time = 0.0;  // equals the exact sum of all slot durations
};

// Called every 600 simulated seconds so long runs can report progress.
using ProgressFn = std::function<void(double sim_time)>;

// Runs one simulation to the horizon. Idle stretches are batched (exactly,
// slot-aligned); the trace is identical to run_reference's.
SimTrace run(const DcfSimConfig& config, const ProgressFn& progress = {});

// Slot-by-slot reference implementation kept for testing the batched engine.
SimTrace run_reference(const DcfSimConfig& config);

// One T_E per replication that crossed theta within the horizon; runs stop
// at the crossing. Throws AllCensoredError / AllUndefinedError as for the
// coupled simulator.
Metric2Samples metric2_samples_sim(const DcfSimConfig& config,
                                   std::size_t replications,
                                   RunPolicy policy = RunPolicy::Parallel,
                                   const ProgressFn& progress = {});

void write_throughput_csv(std::ostream& out, const SimTrace& trace);
void write_queue_csv(std::ostream& out, const SimTrace& trace);
// Summary rows: seed_index, T_E_s, T_theta_s, delivered, collisions, drops.
void write_summary_csv(std::ostream& out,
                       const std::vector<std::uint64_t>& seed_indices,
                       const std::vector<SimTrace>& traces);

}  // namespace ramat

#endif  // RAMAT_DCF_SIM_HPP
