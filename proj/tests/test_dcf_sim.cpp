#include <doctest.h>

#include <cmath>
#include <vector>

#include "ramat/dcf_sim.hpp"
#include "ramat/errors.hpp"
#include "ramat/fixed_point.hpp"

using namespace ramat;

namespace {

DcfSimConfig base_config() {
  DcfSimConfig config;
  config.params = ProtocolParams::dot11b_dcf(32, 5);
  config.n_stations = 5;
  config.max_queue = 50;
  config.lambda = 40.0;
  config.horizon = 20.0;
  config.seed = 314159;
  return config;
}

bool traces_equal(const SimTrace& a, const SimTrace& b) {
  if (a.t_theta != b.t_theta || a.t_e != b.t_e) return false;
  if (a.arrivals != b.arrivals || a.delivered_packets != b.delivered_packets)
    return false;
  if (a.collisions != b.collisions || a.drops != b.drops) return false;
  if (a.empty_slots != b.empty_slots || a.queued_at_end != b.queued_at_end)
    return false;
  if (a.end_time != b.end_time) return false;
  if (a.throughput_series.size() != b.throughput_series.size()) return false;
  for (std::size_t i = 0; i < a.throughput_series.size(); ++i)
    if (a.throughput_series[i].t != b.throughput_series[i].t ||
        a.throughput_series[i].bits != b.throughput_series[i].bits)
      return false;
  if (a.queue_series.size() != b.queue_series.size()) return false;
  for (std::size_t i = 0; i < a.queue_series.size(); ++i) {
    const QueueSample &x = a.queue_series[i], &y = b.queue_series[i];
    if (x.t != y.t || x.min_queue != y.min_queue || x.mean_queue != y.mean_queue ||
        x.max_queue != y.max_queue)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("batched engine reproduces the slot-by-slot reference exactly") {
  std::vector<DcfSimConfig> configs;

  configs.push_back(base_config());

  DcfSimConfig mitigated = base_config();
  mitigated.lambda = 10.0;
  mitigated.mitigation_mean_delay = 0.01;
  configs.push_back(mitigated);

  DcfSimConfig cbr = base_config();
  cbr.traffic = TrafficModel::Cbr;
  cbr.lambda = 25.0;
  configs.push_back(cbr);

  DcfSimConfig bursty = base_config();
  bursty.traffic = TrafficModel::Bursty;
  bursty.lambda = 10.0;
  bursty.burst_size = 4;
  bursty.burst_gap = 0.2;
  configs.push_back(bursty);

  DcfSimConfig preloaded = base_config();
  preloaded.preload = 30;
  preloaded.lambda = 2.0;
  configs.push_back(preloaded);

  DcfSimConfig drained = base_config();
  drained.lambda = 0.0;
  drained.preload = 10;
  drained.horizon = 40.0;  // long enough for every queue to empty
  configs.push_back(drained);

  for (std::size_t i = 0; i < configs.size(); ++i) {
    CAPTURE(i);
    const SimTrace fast = run(configs[i]);
    const SimTrace reference = run_reference(configs[i]);
    CHECK(traces_equal(fast, reference));
  }
}

TEST_CASE("identical config and seed replay bit-for-bit") {
  const DcfSimConfig config = base_config();
  CHECK(traces_equal(run(config), run(config)));
}

TEST_CASE("slot accounting is exact") {
  const DcfSimConfig config = base_config();
  const SimTrace trace = run(config);
  const FrameTimings t = compute_timings(config.params);
  const double reconstructed =
      static_cast<double>(trace.empty_slots) * config.params.empty_slot +
      static_cast<double>(trace.delivered_packets) * t.success +
      static_cast<double>(trace.collisions) * t.collision;
  CHECK(trace.end_time == reconstructed);
  CHECK(trace.end_time >= config.horizon);
}

TEST_CASE("packet conservation including drops") {
  DcfSimConfig config = base_config();
  config.max_queue = 5;   // force overflow
  config.lambda = 200.0;  // well beyond what 5 stations can carry
  const SimTrace trace = run(config);
  CHECK(trace.drops > 0);
  CHECK(trace.arrivals ==
        trace.delivered_packets + trace.drops + trace.queued_at_end);
}

TEST_CASE("single saturated station transmits at the collision-free rate") {
  DcfSimConfig config;
  config.params = ProtocolParams::dot11b_dcf(32, 5);
  config.n_stations = 1;
  config.max_queue = 100000;
  config.lambda = 0.0;
  config.preload = 100000;
  config.horizon = 120.0;
  config.seed = 99;
  const SimTrace trace = run(config);

  const FrameTimings t = compute_timings(config.params);
  const double expected_rate = 1.0 / (15.5 * config.params.empty_slot + t.success);
  const double measured_rate = trace.delivered_packets / trace.end_time;
  CHECK(trace.collisions == 0);
  CHECK(measured_rate == doctest::Approx(expected_rate).epsilon(0.005));
}

TEST_CASE("saturated network matches the analytical model within 3%") {
  const ProtocolParams params = ProtocolParams::dot11b_dcf(32, 5);
  const int n = 10;
  const double mu = saturated_service_rate(params, n);

  DcfSimConfig config;
  config.params = params;
  config.n_stations = n;
  config.max_queue = 5000;
  config.lambda = 0.0;
  config.preload = 5000;
  config.horizon = 100.0;
  config.seed = 7;
  const SimTrace trace = run(config);
  CHECK(trace.queued_at_end > 0);  // nobody drained during the window

  const double measured = trace.delivered_packets * params.payload_bits / trace.end_time;
  const double model = n * mu * params.payload_bits;
  CHECK(measured == doctest::Approx(model).epsilon(0.03));
}

TEST_CASE("protocol must be dcf") {
  DcfSimConfig config = base_config();
  config.params = ProtocolParams::dot11b_aloha(32);
  CHECK_THROWS_AS(run(config), InvalidProtocolError);
}

TEST_CASE("preloaded-full network crosses theta immediately, T_E undefined") {
  DcfSimConfig config = base_config();
  config.preload = config.max_queue;
  config.lambda = 100.0;
  config.horizon = 5.0;
  const SimTrace trace = run(config);
  CHECK(trace.t_theta == 0.0);
  CHECK_FALSE(trace.t_e);

  CHECK_THROWS_AS(metric2_samples_sim(config, 4), AllUndefinedError);
}

TEST_CASE("stable network never crosses theta: metric 2 is censored") {
  DcfSimConfig config = base_config();
  config.lambda = 5.0;  // far below capacity for 5 stations
  config.horizon = 10.0;
  CHECK_THROWS_AS(metric2_samples_sim(config, 4), AllCensoredError);
}

TEST_CASE("metric 2 sampling: serial equals parallel and output is sorted") {
  DcfSimConfig config = base_config();
  config.lambda = 150.0;  // overload so theta is crossed quickly
  config.horizon = 60.0;
  const Metric2Samples serial = metric2_samples_sim(config, 8, RunPolicy::Serial);
  const Metric2Samples parallel =
      metric2_samples_sim(config, 8, RunPolicy::Parallel);
  CHECK(serial.t_e == parallel.t_e);
  CHECK(serial.censored == parallel.censored);
  CHECK(std::is_sorted(serial.t_e.begin(), serial.t_e.end()));
  for (double t_e : serial.t_e) CHECK(t_e >= 0.0);
}

TEST_CASE("post-success holds throttle delivery") {
  DcfSimConfig config = base_config();
  config.n_stations = 2;
  config.lambda = 5.0;
  config.horizon = 50.0;

  const SimTrace plain = run(config);
  DcfSimConfig held = config;
  held.mitigation_mean_delay = 1.0;  // enormous hold next to the ~2 ms exchange
  const SimTrace throttled = run(held);

  CHECK(throttled.delivered_packets < plain.delivered_packets / 2);
}

TEST_CASE("heartbeat fires every 600 simulated seconds") {
  DcfSimConfig config;
  config.params = ProtocolParams::dot11b_dcf(32, 5);
  config.n_stations = 1;
  config.max_queue = 10;
  config.lambda = 0.2;
  config.horizon = 1300.0;
  config.seed = 1;
  std::vector<double> beats;
  run(config, [&](double t) { beats.push_back(t); });
  REQUIRE(beats.size() == 2);
  CHECK(beats[0] == 600.0);
  CHECK(beats[1] == 1200.0);
}

TEST_CASE("throughput bins never exceed the channel's payload capacity") {
  DcfSimConfig config = base_config();
  config.lambda = 500.0;
  config.horizon = 10.0;
  const SimTrace trace = run(config);
  const FrameTimings t = compute_timings(config.params);
  const double cap_per_bin =
      config.params.payload_bits / t.success * config.throughput_bin;
  for (const ThroughputBin& bin : trace.throughput_series)
    CHECK(bin.bits <= cap_per_bin * (1.0 + 1e-9) + config.params.payload_bits);
}

TEST_CASE("two throughput phases bracketing the two fixed points") {
  const ProtocolParams params = ProtocolParams::dot11b_dcf(32, 5);
  DcfSimConfig config;
  config.params = params;
  config.n_stations = 50;
  config.max_queue = 1000;
  config.lambda = 7.75;
  config.horizon = 3600.0;
  config.seed = 90210;
  const SimTrace trace = run(config);
  REQUIRE(trace.t_e);
  REQUIRE(trace.t_theta);

  // High-throughput plateau: bins whose queues are still essentially empty.
  // After theta the network sits in saturation.
  double pre_bits = 0.0, post_bits = 0.0;
  int pre_bins = 0, post_bins = 0;
  for (std::size_t i = 0; i < trace.throughput_series.size(); ++i) {
    const ThroughputBin& bin = trace.throughput_series[i];
    if (trace.queue_series[i].mean_queue < 10.0 && bin.t < *trace.t_e) {
      pre_bits += bin.bits;
      ++pre_bins;
    } else if (bin.t >= *trace.t_theta) {
      post_bits += bin.bits;
      ++post_bins;
    }
  }
  REQUIRE(pre_bins > 30);
  REQUIRE(post_bins > 30);
  const double pre_rate = pre_bits / (pre_bins * config.throughput_bin);
  const double post_rate = post_bits / (post_bins * config.throughput_bin);
  CHECK(pre_rate > post_rate);

  // The two phases sit on the two fixed points of the decoupled model.
  const double light =
      50 *
      solve_fixed_point(params, 50, 7.75, SolverInit::LightStart).throughput;
  const double saturated =
      50 *
      solve_fixed_point(params, 50, 7.75, SolverInit::SaturatedStart).throughput;
  CHECK(pre_rate == doctest::Approx(light).epsilon(0.10));
  CHECK(post_rate == doctest::Approx(saturated).epsilon(0.10));
}

TEST_CASE("config validation") {
  DcfSimConfig config = base_config();
  config.n_stations = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = base_config();
  config.lambda = 0.0;  // no arrivals and nothing preloaded
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = base_config();
  config.theta = config.max_queue + 1.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = base_config();
  config.mitigation_mean_delay = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = base_config();
  config.preload = config.max_queue + 1;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}
