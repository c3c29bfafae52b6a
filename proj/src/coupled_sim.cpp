#include "ramat/coupled_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "ramat/csv.hpp"
#include "ramat/errors.hpp"
#include "ramat/rng.hpp"
#include "ramat/stability.hpp"

namespace ramat {

namespace {

constexpr std::uint64_t kBookkeepingStride = 10'000;
constexpr std::uint64_t kMaxTrajectoryPoints = 100'000;
constexpr std::size_t kOccupancyBuckets = 257;  // last bucket is overflow

TransientRecord run_impl(const CoupledConfig& config, bool stop_at_hit) {
  config.validate();

  const int n_queues = config.n_queues;
  const double arrival_rate = config.n_queues * config.lambda;
  const double theta_packets = config.theta_packets() * n_queues;

  std::optional<int> limiting;
  {
    const StabilityReport report = assess(config.lambda, config.curve);
    if (report.limiting_state && *report.limiting_state <= n_queues)
      limiting = report.limiting_state;
  }

  Rng rng(config.seed);
  std::vector<int> queue(n_queues, config.preload);
  // Backlogged queue ids in a dense vector with a position index, so the
  // departing queue can be drawn uniformly in O(1).
  std::vector<int> backlogged;
  std::vector<int> position(n_queues, -1);
  if (config.preload > 0) {
    backlogged.resize(n_queues);
    for (int i = 0; i < n_queues; ++i) {
      backlogged[i] = i;
      position[i] = i;
    }
  }
  std::int64_t total_packets = static_cast<std::int64_t>(n_queues) * config.preload;

  TransientRecord record;
  if (config.track_occupancy) record.occupancy_time.assign(kOccupancyBuckets, 0.0);
  const std::uint64_t stride =
      std::max<std::uint64_t>(1, config.max_events / kMaxTrajectoryPoints);
  double clock = 0.0;
  double last_empty = 0.0;
  double queue_time_integral = 0.0;  // integral of total packets over time
  bool ever_empty = backlogged.size() < static_cast<std::size_t>(n_queues);

  auto snapshot = [&]() {
    const auto [lo, hi] = std::minmax_element(queue.begin(), queue.end());
    record.trajectory.push_back({clock, *lo,
                                 static_cast<double>(total_packets) / n_queues,
                                 *hi});
  };
  snapshot();

  if (limiting && static_cast<int>(backlogged.size()) >= *limiting) {
    record.hit_event_index = 0;
    record.hit_time = 0.0;
    if (stop_at_hit) return record;
  }
  if (total_packets > theta_packets) {
    record.reached_theta = true;
    record.t_theta = 0.0;
    if (ever_empty) record.t_e = 0.0;
    return record;
  }

  while (record.total_events < config.max_events) {
    const auto n_backlogged = static_cast<int>(backlogged.size());
    double total_rate = arrival_rate;
    if (n_backlogged > 0) {
      const double mu = config.curve.at(n_backlogged);
      if (!(mu > 0.0))
        throw DegenerateRatesError("coupled sim: mu(n) <= 0 for n = " +
                                   std::to_string(n_backlogged));
      total_rate += n_backlogged * mu;
    }

    const double dt = rng.next_exponential(total_rate);
    clock += dt;
    // The state during the elapsed interval is the pre-event one.
    queue_time_integral += static_cast<double>(total_packets) * dt;
    if (config.track_occupancy) {
      const auto bucket = std::min<std::size_t>(
          static_cast<std::size_t>(total_packets), kOccupancyBuckets - 1);
      record.occupancy_time[bucket] += dt;
    }
    if (n_backlogged < n_queues) {
      last_empty = clock;
      ever_empty = true;
    }

    if (rng.next_u01() * total_rate < arrival_rate) {
      const int i = static_cast<int>(rng.next_below(n_queues));
      if (queue[i] == config.max_queue) {
        ++record.dropped;  // full queue, arrival lost, clock still advanced
      } else {
        if (queue[i]++ == 0) {
          position[i] = static_cast<int>(backlogged.size());
          backlogged.push_back(i);
        }
        ++total_packets;
      }
    } else {
      const int slot = static_cast<int>(rng.next_below(backlogged.size()));
      const int j = backlogged[slot];
      if (--queue[j] == 0) {
        const int last = backlogged.back();
        backlogged[slot] = last;
        position[last] = slot;
        backlogged.pop_back();
        position[j] = -1;
      }
      --total_packets;
    }
    ++record.total_events;

    if (record.total_events % kBookkeepingStride == 0) {
      const auto recount = std::count_if(queue.begin(), queue.end(),
                                         [](int q) { return q > 0; });
      if (recount != static_cast<std::ptrdiff_t>(backlogged.size()))
        throw std::logic_error("coupled sim: backlog bookkeeping diverged");
    }
    if (record.total_events % stride == 0) snapshot();

    if (!record.hit_event_index && limiting &&
        static_cast<int>(backlogged.size()) >= *limiting) {
      record.hit_event_index = record.total_events;
      record.hit_time = clock;
      if (stop_at_hit) break;
    }
    if (total_packets > theta_packets) {
      record.reached_theta = true;
      record.t_theta = clock;
      if (ever_empty) record.t_e = last_empty;
      break;
    }
  }

  if (record.trajectory.back().t != clock) snapshot();
  record.end_time = clock;
  if (clock > 0.0) record.time_average_queue = queue_time_integral / clock / n_queues;
  return record;
}

}  // namespace

void CoupledConfig::validate() const {
  if (n_queues < 1) throw std::invalid_argument("coupled sim: N must be >= 1");
  if (max_queue < 1) throw std::invalid_argument("coupled sim: Q must be >= 1");
  if (!(lambda > 0)) throw std::invalid_argument("coupled sim: lambda must be > 0");
  if (curve.max_contenders() < n_queues)
    throw std::invalid_argument("coupled sim: curve shorter than N");
  if (!(theta_packets() > 0) || theta_packets() > max_queue)
    throw std::invalid_argument("coupled sim: theta must be in (0, Q]");
  if (preload < 0 || preload > max_queue)
    throw std::invalid_argument("coupled sim: preload must be in [0, Q]");
  if (max_events == 0) throw std::invalid_argument("coupled sim: max_events must be > 0");
}

TransientRecord run_replication(const CoupledConfig& config) {
  return run_impl(config, false);
}

Metric1Summary metric1_mean(const CoupledConfig& config,
                            std::size_t replications, RunPolicy policy) {
  if (replications < 1)
    throw std::invalid_argument("metric1_mean: replications must be >= 1");

  std::vector<std::optional<std::pair<double, double>>> hits(replications);
  for_each_index(replications, policy, [&](std::size_t i) {
    CoupledConfig rep = config;
    rep.seed = seed_for(config.seed, i);
    const TransientRecord record = run_impl(rep, true);
    if (record.hit_event_index)
      hits[i] = std::pair{static_cast<double>(*record.hit_event_index),
                          *record.hit_time};
  });

  Metric1Summary summary;
  double sum_events = 0.0, sum_time = 0.0;
  for (const auto& hit : hits) {
    if (!hit) {
      ++summary.censored;
      continue;
    }
    ++summary.hits;
    sum_events += hit->first;
    sum_time += hit->second;
  }
  if (summary.hits == 0) return summary;

  summary.mean_events = sum_events / summary.hits;
  summary.mean_time = sum_time / summary.hits;
  if (summary.hits >= 2) {
    double ss_events = 0.0, ss_time = 0.0;
    for (const auto& hit : hits) {
      if (!hit) continue;
      ss_events += (hit->first - summary.mean_events) * (hit->first - summary.mean_events);
      ss_time += (hit->second - summary.mean_time) * (hit->second - summary.mean_time);
    }
    const double scale = 1.96 / std::sqrt(static_cast<double>(summary.hits));
    summary.ci_events_half = scale * std::sqrt(ss_events / (summary.hits - 1));
    summary.ci_time_half = scale * std::sqrt(ss_time / (summary.hits - 1));
  } else {
    summary.ci_events_half = std::numeric_limits<double>::infinity();
    summary.ci_time_half = std::numeric_limits<double>::infinity();
  }
  return summary;
}

Metric2Samples metric2_samples(const CoupledConfig& config,
                               std::size_t replications, RunPolicy policy) {
  if (replications < 1)
    throw std::invalid_argument("metric2_samples: replications must be >= 1");

  std::vector<TransientRecord> records(replications);
  for_each_index(replications, policy, [&](std::size_t i) {
    CoupledConfig rep = config;
    rep.seed = seed_for(config.seed, i);
    records[i] = run_impl(rep, false);
  });

  Metric2Samples samples;
  for (const auto& record : records) {
    if (!record.reached_theta) {
      ++samples.censored;
      continue;
    }
    if (!record.t_e) {
      ++samples.undefined;
      continue;
    }
    samples.t_e.push_back(*record.t_e);
  }
  if (samples.t_e.empty()) {
    if (samples.censored == replications)
      throw AllCensoredError("metric2_samples: no replication crossed theta");
    throw AllUndefinedError(
        "metric2_samples: theta crossed but no queue was ever empty");
  }
  std::sort(samples.t_e.begin(), samples.t_e.end());
  return samples;
}

void write_trajectory_csv(std::ostream& out, const TransientRecord& record) {
  CsvWriter csv(out);
  csv.header({"t_s", "min", "mean", "max"});
  for (const TrajectoryPoint& point : record.trajectory) {
    csv.field(point.t)
        .field(point.min_queue)
        .field(point.mean_queue)
        .field(point.max_queue);
    csv.end_row();
  }
}

void write_replication_csv(std::ostream& out,
                           const std::vector<TransientRecord>& records) {
  CsvWriter csv(out);
  csv.header({"seed_index", "hit_events", "hit_time_s", "T_theta_s", "T_E_s",
              "total_events", "censored"});
  for (std::size_t i = 0; i < records.size(); ++i) {
    const TransientRecord& r = records[i];
    csv.field(static_cast<std::uint64_t>(i));
    if (r.hit_event_index)
      csv.field(*r.hit_event_index);
    else
      csv.field(std::optional<double>{});
    csv.field(r.hit_time)
        .field(r.t_theta)
        .field(r.t_e)
        .field(r.total_events)
        .field(!r.reached_theta);
    csv.end_row();
  }
}

}  // namespace ramat
