#include <doctest.h>

#include <cmath>
#include <sstream>

#include "ramat/coupled_sim.hpp"
#include "ramat/errors.hpp"
#include "ramat/rng.hpp"

using namespace ramat;

namespace {

ServiceRateCurve toy_curve(std::vector<double> mu) {
  return ServiceRateCurve{ProtocolParams::dot11b_dcf(), std::move(mu)};
}

CoupledConfig mm1_config() {
  CoupledConfig config;
  config.n_queues = 1;
  config.max_queue = 100000;
  config.lambda = 1.0;
  config.curve = toy_curve({2.0});
  config.max_events = 1'000'000;
  config.seed = 991;
  config.track_occupancy = true;
  return config;
}

bool records_equal(const TransientRecord& a, const TransientRecord& b) {
  if (a.hit_event_index != b.hit_event_index) return false;
  if (a.hit_time != b.hit_time) return false;
  if (a.t_theta != b.t_theta) return false;
  if (a.t_e != b.t_e) return false;
  if (a.total_events != b.total_events) return false;
  if (a.reached_theta != b.reached_theta) return false;
  if (a.dropped != b.dropped) return false;
  if (a.end_time != b.end_time) return false;
  if (a.trajectory.size() != b.trajectory.size()) return false;
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    if (a.trajectory[i].t != b.trajectory[i].t) return false;
    if (a.trajectory[i].min_queue != b.trajectory[i].min_queue) return false;
    if (a.trajectory[i].mean_queue != b.trajectory[i].mean_queue) return false;
    if (a.trajectory[i].max_queue != b.trajectory[i].max_queue) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("gillespie m/m/1: time-average queue length is rho/(1-rho)") {
  const TransientRecord record = run_replication(mm1_config());
  CHECK_FALSE(record.reached_theta);
  CHECK(record.total_events == 1'000'000);
  // rho = 0.5 -> mean queue length 1.0, within 5%.
  CHECK(record.time_average_queue == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("gillespie m/m/1: occupancy matches the geometric law") {
  const TransientRecord record = run_replication(mm1_config());
  REQUIRE_FALSE(record.occupancy_time.empty());
  double total = 0.0;
  for (double t : record.occupancy_time) total += t;
  REQUIRE(total > 0.0);

  // chi-squared style discrepancy over the first states plus a lumped tail.
  const double rho = 0.5;
  double chi2 = 0.0;
  double tail_expected = 1.0, tail_observed = 1.0;
  for (int k = 0; k <= 15; ++k) {
    const double expected = (1.0 - rho) * std::pow(rho, k);
    const double observed = record.occupancy_time[k] / total;
    chi2 += (observed - expected) * (observed - expected) / expected;
    tail_expected -= expected;
    tail_observed -= observed;
  }
  chi2 += (tail_observed - tail_expected) * (tail_observed - tail_expected) /
          tail_expected;
  CHECK(chi2 < 0.01);
}

TEST_CASE("identical config and seed replay bit-for-bit") {
  CoupledConfig config;
  config.n_queues = 5;
  config.max_queue = 50;
  config.lambda = 1.0;
  config.curve = toy_curve({3.0, 3.0, 3.0, 3.0, 0.8});
  config.max_events = 500'000;
  config.seed = 12345;
  const TransientRecord a = run_replication(config);
  const TransientRecord b = run_replication(config);
  CHECK(records_equal(a, b));
  CHECK(a.reached_theta);
}

TEST_CASE("two-queue toy: mean events to hit the limiting state") {
  // N = 2, mu(1) = 2, mu(2) = 0.5, lambda = 1. The reduced chain gives
  // h(0) = 5; the coupled system is slower because arrivals can also land on
  // the already-backlogged queue. Conditioning on the ladder state gives
  // E = 4 + (1 + sqrt(2)) (2 - sqrt(2))^k from (k, 0), so E(0,0) = 5 + sqrt(2).
  CoupledConfig config;
  config.n_queues = 2;
  config.max_queue = 1000;
  config.lambda = 1.0;
  config.curve = toy_curve({2.0, 0.5});
  config.seed = 777;

  const std::size_t runs = 100'000;
  const Metric1Summary summary = metric1_mean(config, runs);
  CHECK(summary.hits == runs);
  const double expected = 5.0 + std::sqrt(2.0);
  const double se = summary.ci_events_half / 1.96;
  CHECK(std::abs(summary.mean_events - expected) <= 3.0 * se);
  // Ordering against the reduced-chain value.
  CHECK(summary.mean_events >= 5.0);
}

TEST_CASE("metric 1 with an immediately limiting state") {
  // lambda >= mu(1): the first arrival already reaches N' = 1.
  CoupledConfig config;
  config.n_queues = 4;
  config.max_queue = 10;
  config.lambda = 1.0;
  config.curve = toy_curve({0.5, 0.4, 0.3, 0.2});
  config.seed = 5;
  const Metric1Summary summary = metric1_mean(config, 200);
  CHECK(summary.hits == 200);
  CHECK(summary.mean_events == 1.0);
  CHECK(summary.mean_time > 0.0);
}

TEST_CASE("queue bounds hold and overflow arrivals are dropped") {
  CoupledConfig config;
  config.n_queues = 3;
  config.max_queue = 5;
  config.theta = 5.0;  // only crossed when every queue is full
  config.lambda = 4.0;
  config.curve = toy_curve({1.0, 0.5, 0.25});
  config.max_events = 200'000;
  config.seed = 31;
  const TransientRecord record = run_replication(config);
  CHECK(record.dropped > 0);
  for (const TrajectoryPoint& point : record.trajectory) {
    CHECK(point.min_queue >= 0);
    CHECK(point.max_queue <= 5);
  }
}

TEST_CASE("hit, T_E and T_theta are ordered when present") {
  CoupledConfig config;
  config.n_queues = 5;
  config.max_queue = 50;
  config.lambda = 1.0;
  config.curve = toy_curve({3.0, 3.0, 3.0, 3.0, 0.8});
  config.max_events = 2'000'000;

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    config.seed = seed_for(424242, seed);
    const TransientRecord record = run_replication(config);
    REQUIRE(record.reached_theta);
    REQUIRE(record.hit_event_index);
    REQUIRE(record.t_e);
    CHECK(*record.hit_time <= *record.t_e);
    CHECK(*record.t_e <= *record.t_theta);
  }
}

TEST_CASE("just above the limit, many runs recover after first hitting N'") {
  // Hitting the limiting state does not commit the system to saturation: a
  // visible fraction of replications keeps going for a while before theta.
  CoupledConfig config;
  config.n_queues = 50;
  config.max_queue = 1000;
  config.lambda = 8.0;
  config.curve = service_rate_curve(ProtocolParams::dot11b_dcf(32, 5), 50);
  config.seed = 1848;

  int recovered = 0, finished = 0;
  for (std::uint64_t i = 0; i < 30; ++i) {
    CoupledConfig rep = config;
    rep.seed = seed_for(config.seed, i);
    const TransientRecord record = run_replication(rep);
    if (!record.reached_theta || !record.hit_time || !record.t_e) continue;
    ++finished;
    if (*record.t_e > 2.0 * *record.hit_time) ++recovered;
  }
  REQUIRE(finished == 30);
  CHECK(recovered >= 6);  // a non-negligible fraction
}

TEST_CASE("trajectory stays within its downsampling budget") {
  CoupledConfig config = mm1_config();
  config.track_occupancy = false;
  config.max_events = 2'000'000;
  const TransientRecord record = run_replication(config);
  CHECK(record.trajectory.size() <= 100'002);
  CHECK(record.trajectory.size() > 10);
}

TEST_CASE("preloaded-full system crosses theta at once with undefined T_E") {
  CoupledConfig config;
  config.n_queues = 4;
  config.max_queue = 20;
  config.lambda = 2.0;
  config.curve = toy_curve({1.0, 0.5, 0.4, 0.3});
  config.preload = 20;
  config.seed = 8;

  const TransientRecord record = run_replication(config);
  CHECK(record.reached_theta);
  CHECK(record.t_theta == 0.0);
  CHECK_FALSE(record.t_e);
  CHECK(record.hit_event_index == 0);

  CHECK_THROWS_AS(metric2_samples(config, 10), AllUndefinedError);
}

TEST_CASE("stable run ends censored at the event budget") {
  CoupledConfig config = mm1_config();
  config.track_occupancy = false;
  config.max_events = 1000;
  const TransientRecord record = run_replication(config);
  CHECK_FALSE(record.reached_theta);
  CHECK(record.total_events == 1000);

  CHECK_THROWS_AS(metric2_samples(config, 5), AllCensoredError);
}

TEST_CASE("degenerate service rates are rejected") {
  CoupledConfig config;
  config.n_queues = 2;
  config.max_queue = 10;
  config.lambda = 1.0;
  config.curve = toy_curve({0.1, 0.0});
  config.seed = 3;
  CHECK_THROWS_AS(run_replication(config), DegenerateRatesError);
}

TEST_CASE("metric 2 sampling: serial equals parallel and output is sorted") {
  CoupledConfig config;
  config.n_queues = 5;
  config.max_queue = 40;
  config.lambda = 1.0;
  config.curve = toy_curve({3.0, 3.0, 3.0, 3.0, 0.8});
  config.seed = 2026;

  const Metric2Samples serial = metric2_samples(config, 16, RunPolicy::Serial);
  const Metric2Samples parallel = metric2_samples(config, 16, RunPolicy::Parallel);
  CHECK(serial.t_e == parallel.t_e);
  CHECK(serial.censored == parallel.censored);
  CHECK(serial.undefined == parallel.undefined);
  CHECK(std::is_sorted(serial.t_e.begin(), serial.t_e.end()));
}

TEST_CASE("per-replication csv has the documented columns") {
  CoupledConfig config;
  config.n_queues = 2;
  config.max_queue = 10;
  config.lambda = 1.0;
  config.curve = toy_curve({2.0, 0.5});
  config.max_events = 10'000;
  config.seed = 55;
  std::vector<TransientRecord> records{run_replication(config)};
  std::ostringstream out;
  write_replication_csv(out, records);
  const std::string text = out.str();
  CHECK(text.substr(0, text.find('\n')) ==
        "seed_index,hit_events,hit_time_s,T_theta_s,T_E_s,total_events,censored");
}
