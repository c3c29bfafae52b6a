#include "ramat/dcf_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>

#include "ramat/csv.hpp"
#include "ramat/errors.hpp"
#include "ramat/rng.hpp"

namespace ramat {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kHeartbeatPeriod = 600.0;  // simulated seconds

struct Station {
  std::deque<double> queue;  // arrival timestamps, head is in service
  int backoff = 0;           // slots remaining; meaningful when queue non-empty
  int stage = 0;
  double hold_until = 0.0;   // station is off the channel before this time
  double next_arrival = kInfinity;
};

struct RunOptions {
  bool batched = true;
  bool stop_at_theta = false;
};

// The whole simulation is slot-synchronous. Time is always derived from the
// three slot counters, so the accounting identity
//   t = empty_slots * sigma + successes * T_s + collisions * T_c
// holds exactly, and the batched and slot-by-slot engines see identical
// clocks. All random draws happen at slot boundaries in a pinned order
// (transmission outcome first, then due arrivals in timestamp order), which
// makes the two engines consume the same stream.
class Simulator {
 public:
  Simulator(const DcfSimConfig& config, RunOptions options,
            const ProgressFn& progress)
      : cfg_(config),
        opt_(options),
        progress_(progress),
        timings_(compute_timings(config.params)),
        rng_(config.seed),
        stations_(config.n_stations) {}

  SimTrace run() {
    initialize();
    visit_boundary(0.0, SlotKind::None, {});

    while (true) {
      const double t = now();
      if (t >= cfg_.horizon) break;
      if (opt_.stop_at_theta && trace_.t_theta) break;

      const Scan scan = scan_stations(t);
      if (!scan.transmitters.empty()) {
        SlotKind kind = scan.transmitters.size() == 1 ? SlotKind::Success
                                                      : SlotKind::Collision;
        if (kind == SlotKind::Success)
          ++successes_;
        else
          ++collisions_;
        // A busy period counts as one backoff slot for the bystanders, the
        // same one-tick-per-slot view the analytical service model takes.
        for (int i = 0; i < cfg_.n_stations; ++i) {
          Station& s = stations_[i];
          if (!s.queue.empty() && s.hold_until <= t && s.backoff > 0)
            --s.backoff;
        }
        visit_boundary(now(), kind, scan.transmitters);
        continue;
      }

      // Empty slot(s). Nothing can change before the earliest of: a counter
      // reaching zero, an arrival becoming due, a hold expiring, the horizon.
      std::uint64_t batch = 1;
      if (opt_.batched) {
        double wake = scan.next_wake;
        wake = std::min(wake, cfg_.horizon);
        std::uint64_t to_wake = slots_until(t, wake);
        batch = std::min(scan.min_backoff, to_wake);
        batch = std::max<std::uint64_t>(batch, 1);
      }
      empty_slots_ += batch;
      for (int i = 0; i < cfg_.n_stations; ++i) {
        Station& s = stations_[i];
        if (!s.queue.empty() && s.hold_until <= t)
          s.backoff -= static_cast<int>(batch);
      }
      visit_boundary(now(), SlotKind::None, {});
    }

    finish();
    return std::move(trace_);
  }

 private:
  enum class SlotKind { None, Success, Collision };

  struct Scan {
    std::vector<int> transmitters;
    std::uint64_t min_backoff = std::numeric_limits<std::uint64_t>::max();
    double next_wake = kInfinity;  // earliest arrival or hold expiry
  };

  double now() const {
    return static_cast<double>(empty_slots_) * cfg_.params.empty_slot +
           static_cast<double>(successes_) * timings_.success +
           static_cast<double>(collisions_) * timings_.collision;
  }

  std::uint64_t slots_until(double t, double wake) const {
    if (wake == kInfinity) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(
        std::ceil((wake - t) / cfg_.params.empty_slot));
  }

  void initialize() {
    trace_ = SimTrace{};
    for (Station& s : stations_)
      s.queue.assign(static_cast<std::size_t>(cfg_.preload), 0.0);
    total_packets_ = static_cast<std::int64_t>(cfg_.n_stations) * cfg_.preload;
    count_empty_ = cfg_.preload > 0 ? 0 : cfg_.n_stations;
    if (cfg_.preload > 0)
      for (Station& s : stations_)
        s.backoff = static_cast<int>(rng_.next_below(cfg_.params.min_cw));
    if (cfg_.lambda > 0) {
      for (int i = 0; i < cfg_.n_stations; ++i) {
        Station& s = stations_[i];
        switch (cfg_.traffic) {
          case TrafficModel::Poisson:
            s.next_arrival = rng_.next_exponential(cfg_.lambda);
            break;
          case TrafficModel::Cbr:
            s.next_arrival = rng_.next_u01() / cfg_.lambda;
            break;
          case TrafficModel::Bursty:
            s.next_arrival = rng_.next_u01() * burst_gap();
            break;
        }
        arrival_heap_.emplace(s.next_arrival, i);
      }
    }
    ever_empty_ = count_empty_ > 0;
    last_empty_ = 0.0;
    next_heartbeat_ = kHeartbeatPeriod;
  }

  double burst_gap() const {
    return cfg_.burst_gap > 0 ? cfg_.burst_gap : cfg_.burst_size / cfg_.lambda;
  }

  Scan scan_stations(double t) const {
    Scan scan;
    for (int i = 0; i < cfg_.n_stations; ++i) {
      const Station& s = stations_[i];
      if (s.queue.empty()) continue;
      if (s.hold_until > t) {
        scan.next_wake = std::min(scan.next_wake, s.hold_until);
        continue;
      }
      if (s.backoff == 0)
        scan.transmitters.push_back(i);
      else
        scan.min_backoff =
            std::min(scan.min_backoff, static_cast<std::uint64_t>(s.backoff));
    }
    if (!arrival_heap_.empty())
      scan.next_wake = std::min(scan.next_wake, arrival_heap_.top().first);
    return scan;
  }

  void visit_boundary(double t, SlotKind kind, const std::vector<int>& tx) {
    flush_bins(t);

    // The state of the elapsed slot still holds at t; record emptiness first.
    if (count_empty_ > 0) {
      last_empty_ = t;
      ever_empty_ = true;
    }

    if (kind == SlotKind::Success) {
      complete_success(tx.front(), t);
    } else if (kind == SlotKind::Collision) {
      for (int i : tx) {
        Station& s = stations_[i];
        s.stage = std::min(s.stage + 1, cfg_.params.max_backoff_stage);
        s.backoff = static_cast<int>(
            rng_.next_below(static_cast<std::uint64_t>(cfg_.params.min_cw)
                            << s.stage));
      }
    }

    process_arrivals(t);

    if (!trace_.t_theta &&
        static_cast<double>(total_packets_) >
            cfg_.theta_packets() * cfg_.n_stations) {
      trace_.t_theta = t;
      if (ever_empty_) trace_.t_e = last_empty_;
    }

    while (progress_ && t >= next_heartbeat_) {
      progress_(next_heartbeat_);
      next_heartbeat_ += kHeartbeatPeriod;
    }
  }

  void complete_success(int i, double t) {
    Station& s = stations_[i];
    ++trace_.delivered_packets;
    bin_bits_ += cfg_.params.payload_bits;
    s.queue.pop_front();
    --total_packets_;
    s.stage = 0;
    if (s.queue.empty())
      ++count_empty_;
    else
      s.backoff = static_cast<int>(rng_.next_below(cfg_.params.min_cw));
    if (cfg_.mitigation_mean_delay)
      s.hold_until = t + rng_.next_exponential(1.0 / *cfg_.mitigation_mean_delay);
  }

  void process_arrivals(double t) {
    while (!arrival_heap_.empty() && arrival_heap_.top().first <= t) {
      const auto [when, i] = arrival_heap_.top();
      arrival_heap_.pop();
      Station& s = stations_[i];

      const int packets = cfg_.traffic == TrafficModel::Bursty ? cfg_.burst_size : 1;
      for (int k = 0; k < packets; ++k) {
        ++trace_.arrivals;
        if (static_cast<int>(s.queue.size()) == cfg_.max_queue) {
          ++trace_.drops;
          continue;
        }
        if (s.queue.empty()) {
          --count_empty_;
          // Fresh contention cycle: the stage is already 0 (it resets on
          // every delivery) and a new counter is drawn.
          s.backoff = static_cast<int>(rng_.next_below(cfg_.params.min_cw));
        }
        s.queue.push_back(when);
        ++total_packets_;
      }

      switch (cfg_.traffic) {
        case TrafficModel::Poisson:
          s.next_arrival = when + rng_.next_exponential(cfg_.lambda);
          break;
        case TrafficModel::Cbr:
          s.next_arrival = when + 1.0 / cfg_.lambda;
          break;
        case TrafficModel::Bursty:
          s.next_arrival = when + burst_gap();
          break;
      }
      arrival_heap_.emplace(s.next_arrival, i);
    }
  }

  void flush_bins(double t) {
    while ((bin_index_ + 1) * cfg_.throughput_bin <= t) {
      emit_bin();
      ++bin_index_;
      bin_bits_ = 0.0;
    }
  }

  void emit_bin() {
    const double start = bin_index_ * cfg_.throughput_bin;
    trace_.throughput_series.push_back({start, bin_bits_});
    int lo = cfg_.max_queue, hi = 0;
    for (const Station& s : stations_) {
      const int len = static_cast<int>(s.queue.size());
      lo = std::min(lo, len);
      hi = std::max(hi, len);
    }
    trace_.queue_series.push_back(
        {start + cfg_.throughput_bin, lo,
         static_cast<double>(total_packets_) / cfg_.n_stations, hi});
  }

  void finish() {
    if (bin_bits_ > 0.0 || trace_.throughput_series.empty()) emit_bin();
    trace_.collisions = collisions_;
    trace_.empty_slots = empty_slots_;
    trace_.end_time = now();

    std::int64_t queued = 0;
    for (const Station& s : stations_) queued += static_cast<std::int64_t>(s.queue.size());
    trace_.queued_at_end = static_cast<std::uint64_t>(queued);
    if (queued != total_packets_ ||
        trace_.arrivals + static_cast<std::uint64_t>(cfg_.n_stations) * cfg_.preload !=
            trace_.delivered_packets + trace_.drops + static_cast<std::uint64_t>(queued))
      throw std::logic_error("dcf sim: packet conservation violated");
  }

  const DcfSimConfig& cfg_;
  RunOptions opt_;
  const ProgressFn& progress_;
  FrameTimings timings_;
  Rng rng_;
  std::vector<Station> stations_;

  std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                      std::greater<>>
      arrival_heap_;
  std::uint64_t empty_slots_ = 0;
  std::uint64_t successes_ = 0;
  std::uint64_t collisions_ = 0;
  std::int64_t total_packets_ = 0;
  int count_empty_ = 0;
  bool ever_empty_ = false;
  double last_empty_ = 0.0;
  std::uint64_t bin_index_ = 0;
  double bin_bits_ = 0.0;
  double next_heartbeat_ = kHeartbeatPeriod;
  SimTrace trace_;
};

}  // namespace

std::string to_string(TrafficModel traffic) {
  switch (traffic) {
    case TrafficModel::Poisson: return "poisson";
    case TrafficModel::Cbr: return "cbr";
    case TrafficModel::Bursty: return "bursty";
  }
  return "?";
}

void DcfSimConfig::validate() const {
  if (params.protocol != Protocol::Dcf)
    throw InvalidProtocolError("dcf sim: params.protocol must be Dcf");
  params.validate();
  if (n_stations < 1) throw std::invalid_argument("dcf sim: N must be >= 1");
  if (max_queue < 1) throw std::invalid_argument("dcf sim: Q must be >= 1");
  if (lambda < 0) throw std::invalid_argument("dcf sim: lambda must be >= 0");
  if (lambda == 0 && preload == 0)
    throw std::invalid_argument("dcf sim: no arrivals and no preloaded packets");
  if (!(theta_packets() > 0) || theta_packets() > max_queue)
    throw std::invalid_argument("dcf sim: theta must be in (0, Q]");
  if (preload < 0 || preload > max_queue)
    throw std::invalid_argument("dcf sim: preload must be in [0, Q]");
  if (!(horizon > 0)) throw std::invalid_argument("dcf sim: horizon must be > 0");
  if (!(throughput_bin > 0))
    throw std::invalid_argument("dcf sim: throughput_bin must be > 0");
  if (mitigation_mean_delay && !(*mitigation_mean_delay > 0))
    throw std::invalid_argument("dcf sim: mitigation delay must be > 0");
  if (traffic == TrafficModel::Bursty && burst_size < 1)
    throw std::invalid_argument("dcf sim: burst_size must be >= 1");
}

SimTrace run(const DcfSimConfig& config, const ProgressFn& progress) {
  config.validate();
  return Simulator(config, {true, false}, progress).run();
}

SimTrace run_reference(const DcfSimConfig& config) {
  config.validate();
  ProgressFn none;
  return Simulator(config, {false, false}, none).run();
}

Metric2Samples metric2_samples_sim(const DcfSimConfig& config,
                                   std::size_t replications, RunPolicy policy,
                                   const ProgressFn& progress) {
  config.validate();
  if (replications < 1)
    throw std::invalid_argument("metric2_samples_sim: replications must be >= 1");

  struct Outcome {
    bool reached = false;
    std::optional<double> t_e;
  };
  std::vector<Outcome> outcomes(replications);
  for_each_index(replications, policy, [&](std::size_t i) {
    DcfSimConfig rep = config;
    rep.seed = seed_for(config.seed, i);
    const SimTrace trace = Simulator(rep, {true, true}, progress).run();
    outcomes[i] = {trace.t_theta.has_value(), trace.t_e};
  });

  Metric2Samples samples;
  for (const Outcome& o : outcomes) {
    if (!o.reached) {
      ++samples.censored;
      continue;
    }
    if (!o.t_e) {
      ++samples.undefined;
      continue;
    }
    samples.t_e.push_back(*o.t_e);
  }
  if (samples.t_e.empty()) {
    if (samples.censored == replications)
      throw AllCensoredError("metric2_samples_sim: no replication crossed theta");
    throw AllUndefinedError(
        "metric2_samples_sim: theta crossed but no queue was ever empty");
  }
  std::sort(samples.t_e.begin(), samples.t_e.end());
  return samples;
}

void write_throughput_csv(std::ostream& out, const SimTrace& trace) {
  CsvWriter csv(out);
  csv.header({"t_s", "bits"});
  for (const ThroughputBin& bin : trace.throughput_series) {
    csv.field(bin.t).field(bin.bits);
    csv.end_row();
  }
}

void write_queue_csv(std::ostream& out, const SimTrace& trace) {
  CsvWriter csv(out);
  csv.header({"t_s", "min", "mean", "max"});
  for (const QueueSample& sample : trace.queue_series) {
    csv.field(sample.t)
        .field(sample.min_queue)
        .field(sample.mean_queue)
        .field(sample.max_queue);
    csv.end_row();
  }
}

void write_summary_csv(std::ostream& out,
                       const std::vector<std::uint64_t>& seed_indices,
                       const std::vector<SimTrace>& traces) {
  CsvWriter csv(out);
  csv.header({"seed_index", "T_E_s", "T_theta_s", "delivered", "collisions",
              "drops"});
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const SimTrace& trace = traces[i];
    csv.field(seed_indices[i])
        .field(trace.t_e)
        .field(trace.t_theta)
        .field(trace.delivered_packets)
        .field(trace.collisions)
        .field(trace.drops);
    csv.end_row();
  }
}

}  // namespace ramat
