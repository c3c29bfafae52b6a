#include "ramat/scenario.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ramat/backlog_chain.hpp"
#include "ramat/coupled_sim.hpp"
#include "ramat/csv.hpp"
#include "ramat/errors.hpp"
#include "ramat/rng.hpp"
#include "ramat/stability.hpp"
#include "ramat/stats.hpp"

namespace ramat {

namespace {

namespace fs = std::filesystem;

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

struct KeyValue {
  std::string value;
  int line;
  mutable bool used = false;
};

// section -> key -> value with the source line, for precise diagnostics.
using ConfigMap = std::map<std::string, std::map<std::string, KeyValue>>;

ConfigMap parse_flat_config(const std::string& text, const std::string& path) {
  ConfigMap config;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": unterminated section header",
                          path, line_no);
      section = trim(line.substr(1, line.size() - 2));
      config[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path + ":" + std::to_string(line_no) +
                            ": expected 'key = value'",
                        path, line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(path + ":" + std::to_string(line_no) + ": empty key",
                        path, line_no);
    auto [it, inserted] = config[section].emplace(key, KeyValue{value, line_no});
    if (!inserted)
      throw ConfigError(path + ":" + std::to_string(line_no) +
                            ": duplicate key '" + key + "'",
                        path, line_no);
  }
  return config;
}

class ConfigReader {
 public:
  ConfigReader(ConfigMap config, std::string path)
      : config_(std::move(config)), path_(std::move(path)) {}

  bool has(const std::string& section, const std::string& key) const {
    const auto s = config_.find(section);
    if (s == config_.end()) return false;
    return s->second.count(key) > 0;
  }

  std::string get_string(const std::string& section, const std::string& key) {
    const KeyValue& kv = lookup(section, key);
    return kv.value;
  }

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) {
    return has(section, key) ? get_string(section, key) : fallback;
  }

  double get_double(const std::string& section, const std::string& key) {
    const KeyValue& kv = lookup(section, key);
    return parse_double(kv.value, kv.line, key);
  }

  double get_double(const std::string& section, const std::string& key,
                    double fallback) {
    return has(section, key) ? get_double(section, key) : fallback;
  }

  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) {
    if (!has(section, key)) return fallback;
    const KeyValue& kv = lookup(section, key);
    try {
      std::size_t pos = 0;
      const std::int64_t v = std::stoll(kv.value, &pos);
      if (pos != kv.value.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      fail(kv.line, "key '" + key + "': expected an integer, got '" + kv.value + "'");
    }
  }

  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) {
    if (!has(section, key)) return fallback;
    const KeyValue& kv = lookup(section, key);
    if (kv.value == "true" || kv.value == "1") return true;
    if (kv.value == "false" || kv.value == "0") return false;
    fail(kv.line, "key '" + key + "': expected true/false");
  }

  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key) {
    const KeyValue& kv = lookup(section, key);
    std::vector<double> values;
    std::istringstream in(kv.value);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      values.push_back(parse_double(item, kv.line, key));
    }
    if (values.empty()) fail(kv.line, "key '" + key + "': empty value list");
    return values;
  }

  // Any key the dispatcher never consumed is a typo worth rejecting.
  void reject_unused() const {
    for (const auto& [section, keys] : config_)
      for (const auto& [key, kv] : keys)
        if (!kv.used)
          throw ConfigError(path_ + ":" + std::to_string(kv.line) +
                                ": unknown key '" + key + "' in section [" +
                                section + "]",
                            path_, kv.line);
  }

  [[noreturn]] void fail(int line, const std::string& message) const {
    throw ConfigError(path_ + ":" + std::to_string(line) + ": " + message,
                      path_, line);
  }

 private:
  const KeyValue& lookup(const std::string& section, const std::string& key) {
    const auto s = config_.find(section);
    if (s == config_.end() || !s->second.count(key))
      throw ConfigError(path_ + ": missing required key '" + key +
                            "' in section [" + section + "]",
                        path_, 0);
    const KeyValue& kv = s->second.at(key);
    kv.used = true;
    return kv;
  }

  static double parse_double(const std::string& text, int line,
                             const std::string& key) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(text, &pos);
      if (pos != text.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("key '" + key + "': expected a number, got '" + text +
                            "' (line " + std::to_string(line) + ")",
                        "", line);
    }
  }

  ConfigMap config_;
  std::string path_;
};

Method parse_method(const std::string& text, ConfigReader& reader) {
  if (text == "fixed_point") return Method::FixedPoint;
  if (text == "method1") return Method::Method1;
  if (text == "method2") return Method::Method2;
  if (text == "method3") return Method::Method3;
  if (text == "mitigation") return Method::Mitigation;
  if (text == "stability") return Method::Stability;
  reader.fail(0, "unknown method '" + text +
                     "' (expected fixed_point, method1, method2, method3, "
                     "mitigation or stability)");
}

std::string point_label(const Scenario& scenario, double value) {
  if (scenario.sweep_variable.empty()) return "";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "_%s_%.12g", scenario.sweep_variable.c_str(),
                value);
  return buf;
}

struct SweepPoint {
  std::string label;
  double lambda;
  int n_stations;
};

std::vector<SweepPoint> sweep_points(const Scenario& scenario) {
  std::vector<SweepPoint> points;
  if (scenario.sweep_variable.empty()) {
    points.push_back({"", scenario.lambda, scenario.n_stations});
    return points;
  }
  for (double value : scenario.sweep_values) {
    SweepPoint point{point_label(scenario, value), scenario.lambda,
                     scenario.n_stations};
    if (scenario.sweep_variable == "lambda")
      point.lambda = value;
    else
      point.n_stations = static_cast<int>(value);
    points.push_back(point);
  }
  return points;
}

// Writes artifacts and remembers their names for the manifest.
class ArtifactSink {
 public:
  ArtifactSink(fs::path dir, std::ostream& log) : dir_(std::move(dir)), log_(log) {}

  template <typename Fn>
  void write(const std::string& name, Fn&& fn) {
    const fs::path path = dir_ / name;
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    fn(out);
    out.flush();
    if (!out) throw Error("failed while writing " + path.string());
    names_.push_back(name);
    log_ << "wrote " << path.string() << "\n";
  }

  const std::vector<std::string>& names() const { return names_; }

 private:
  fs::path dir_;
  std::ostream& log_;
  std::vector<std::string> names_;
};

// Half the mean packet interarrival time. Long enough to keep the contending
// set sparse, short enough that a station's service capacity stays well above
// its arrival rate.
double auto_mitigation_delay(double lambda) { return 0.5 / lambda; }

void run_fixed_point(const Scenario& scenario, ArtifactSink& sink) {
  sink.write("fixed_point.csv", [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"N", "lambda", "init", "S", "tau", "p", "converged"});
    for (const SweepPoint& point : sweep_points(scenario)) {
      for (SolverInit init :
           {SolverInit::SaturatedStart, SolverInit::LightStart}) {
        const FixedPointSolution s = solve_fixed_point(
            scenario.params, point.n_stations, point.lambda, init);
        csv.field(point.n_stations)
            .field(point.lambda)
            .field(to_string(init))
            .field(s.throughput)
            .field(s.tau)
            .field(s.p)
            .field(s.converged);
        csv.end_row();
      }
    }
  });
}

void run_stability(const Scenario& scenario, ArtifactSink& sink) {
  sink.write("stability.csv", [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"N", "lambda", "mu_sat", "stable", "N_prime", "margin"});
    for (const SweepPoint& point : sweep_points(scenario)) {
      const ServiceRateCurve curve =
          service_rate_curve(scenario.params, point.n_stations);
      const StabilityReport report = assess(point.lambda, curve);
      csv.field(point.n_stations).field(point.lambda).field(report.mu_sat);
      csv.field(report.stable);
      if (report.limiting_state)
        csv.field(*report.limiting_state);
      else
        csv.field(std::optional<double>{});
      csv.field(report.margin);
      csv.end_row();
    }
  });
}

void run_method2(const Scenario& scenario, ArtifactSink& sink) {
  const std::string config_label =
      to_string(scenario.params.protocol) + "_w" +
      std::to_string(scenario.params.min_cw) +
      (scenario.params.protocol == Protocol::Dcf
           ? "_m" + std::to_string(scenario.params.max_backoff_stage)
           : "");

  struct Row {
    double lambda;
    int n_prime;
    double h0;
    double h0_seconds;
  };
  std::vector<Row> rows;
  for (const SweepPoint& point : sweep_points(scenario)) {
    const ServiceRateCurve curve =
        service_rate_curve(scenario.params, point.n_stations);
    const BacklogChain chain =
        build_chain(point.n_stations, point.lambda, curve);
    const std::vector<double> h = hitting_times(chain);
    rows.push_back({point.lambda, chain.limiting_state, h[0],
                    expected_hitting_time_seconds(chain, h)});
    sink.write("chain" + point.label + ".csv", [&](std::ostream& out) {
      write_chain_csv(out, chain, h);
    });
  }
  sink.write("method2.csv", [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"config", "lambda", "N_prime", "h0", "h0_seconds"});
    for (const Row& row : rows) {
      csv.field(config_label)
          .field(row.lambda)
          .field(row.n_prime)
          .field(row.h0)
          .field(row.h0_seconds);
      csv.end_row();
    }
  });
}

void run_method1(const Scenario& scenario, ArtifactSink& sink, RunPolicy policy) {
  struct SummaryRow {
    double lambda;
    int n;
    Metric1Summary metric1;
    std::size_t te_samples = 0, te_censored = 0, te_undefined = 0;
    double mean_te = 0.0;
  };
  std::vector<SummaryRow> summary;

  for (const SweepPoint& point : sweep_points(scenario)) {
    const ServiceRateCurve curve =
        service_rate_curve(scenario.params, point.n_stations);
    CoupledConfig config;
    config.n_queues = point.n_stations;
    config.max_queue = scenario.max_queue;
    config.lambda = point.lambda;
    config.curve = curve;
    config.theta = scenario.theta;
    config.preload = scenario.preload;
    config.max_events = scenario.max_events;
    config.seed = scenario.master_seed;

    std::vector<TransientRecord> records(scenario.replications);
    for_each_index(scenario.replications, policy, [&](std::size_t i) {
      CoupledConfig rep = config;
      rep.seed = seed_for(config.seed, i);
      records[i] = run_replication(rep);
    });
    sink.write("replications" + point.label + ".csv", [&](std::ostream& out) {
      write_replication_csv(out, records);
    });
    if (scenario.write_traces) {
      for (std::size_t i = 0; i < records.size(); ++i)
        sink.write("trajectory" + point.label + "_rep" + std::to_string(i) + ".csv",
                   [&](std::ostream& out) { write_trajectory_csv(out, records[i]); });
    }

    SummaryRow row{point.lambda, point.n_stations,
                   metric1_mean(config, scenario.replications, policy)};
    std::vector<double> te;
    for (const TransientRecord& r : records) {
      if (!r.reached_theta)
        ++row.te_censored;
      else if (!r.t_e)
        ++row.te_undefined;
      else
        te.push_back(*r.t_e);
    }
    row.te_samples = te.size();
    if (!te.empty()) {
      for (double v : te) row.mean_te += v;
      row.mean_te /= static_cast<double>(te.size());
      std::sort(te.begin(), te.end());
      sink.write("te_ecdf" + point.label + ".csv", [&](std::ostream& out) {
        write_ecdf_csv(out, ecdf(te));
      });
    }
    summary.push_back(row);
  }

  sink.write("method1_summary.csv", [&](std::ostream& out) {
    CsvWriter csv(out);
    csv.header({"N", "lambda", "replications", "hits", "hit_censored",
                "mean_hit_events", "ci_hit_events", "mean_hit_time_s",
                "ci_hit_time_s", "te_samples", "te_censored", "te_undefined",
                "mean_te_s"});
    for (const SummaryRow& row : summary) {
      csv.field(row.n)
          .field(row.lambda)
          .field(static_cast<std::uint64_t>(scenario.replications))
          .field(static_cast<std::uint64_t>(row.metric1.hits))
          .field(static_cast<std::uint64_t>(row.metric1.censored))
          .field(row.metric1.mean_events)
          .field(row.metric1.ci_events_half)
          .field(row.metric1.mean_time)
          .field(row.metric1.ci_time_half)
          .field(static_cast<std::uint64_t>(row.te_samples))
          .field(static_cast<std::uint64_t>(row.te_censored))
          .field(static_cast<std::uint64_t>(row.te_undefined))
          .field(row.mean_te);
      csv.end_row();
    }
  });
}

DcfSimConfig method3_config(const Scenario& scenario, const SweepPoint& point) {
  DcfSimConfig config;
  config.params = scenario.params;
  config.n_stations = point.n_stations;
  config.max_queue = scenario.max_queue;
  config.lambda = point.lambda;
  config.theta = scenario.theta;
  config.preload = scenario.preload;
  config.horizon = scenario.horizon;
  config.throughput_bin = scenario.throughput_bin;
  config.traffic = scenario.traffic;
  config.burst_size = scenario.burst_size;
  config.burst_gap = scenario.burst_gap;
  config.seed = scenario.master_seed;
  if (scenario.mitigation == "auto")
    config.mitigation_mean_delay = auto_mitigation_delay(point.lambda);
  else if (scenario.mitigation != "none")
    config.mitigation_mean_delay = std::stod(scenario.mitigation);
  return config;
}

ProgressFn heartbeat_printer() {
  return [](double sim_time) {
    std::fprintf(stderr, "heartbeat: simulated %.0f s\n", sim_time);
  };
}

void run_method3_point(const Scenario& scenario, const SweepPoint& point,
                       const DcfSimConfig& config, const std::string& suffix,
                       ArtifactSink& sink, RunPolicy policy) {
  std::vector<SimTrace> traces(scenario.replications);
  std::vector<std::uint64_t> seed_indices(scenario.replications);
  const ProgressFn progress = heartbeat_printer();
  for_each_index(scenario.replications, policy, [&](std::size_t i) {
    DcfSimConfig rep = config;
    rep.seed = seed_for(config.seed, i);
    seed_indices[i] = i;
    traces[i] = run(rep, progress);
  });

  sink.write("summary" + point.label + suffix + ".csv", [&](std::ostream& out) {
    write_summary_csv(out, seed_indices, traces);
  });
  if (scenario.write_traces) {
    for (std::size_t i = 0; i < traces.size(); ++i) {
      const std::string rep = "_rep" + std::to_string(i);
      sink.write("throughput" + point.label + suffix + rep + ".csv",
                 [&](std::ostream& out) { write_throughput_csv(out, traces[i]); });
      sink.write("queue" + point.label + suffix + rep + ".csv",
                 [&](std::ostream& out) { write_queue_csv(out, traces[i]); });
    }
  }

  std::vector<double> te;
  for (const SimTrace& trace : traces)
    if (trace.t_e) te.push_back(*trace.t_e);
  if (te.size() >= 2) {
    std::sort(te.begin(), te.end());
    sink.write("te_ecdf" + point.label + suffix + ".csv",
               [&](std::ostream& out) { write_ecdf_csv(out, ecdf(te)); });
    sink.write("te_fits" + point.label + suffix + ".json",
               [&](std::ostream& out) {
                 nlohmann::json fits = nlohmann::json::array();
                 for (const FitResult& fit : compare_fits(te)) {
                   nlohmann::json entry;
                   entry["family"] = fit.family_name();
                   entry["nll"] = fit.nll;
                   entry["n"] = fit.n;
                   if (fit.is_inverse_gaussian()) {
                     const auto& ig = std::get<InverseGaussianParams>(fit.family);
                     entry["mu"] = ig.mu;
                     entry["lambda"] = ig.lambda_shape;
                   } else {
                     entry["rate"] =
                         std::get<ExponentialParams>(fit.family).rate;
                   }
                   fits.push_back(entry);
                 }
                 out << fits.dump(2) << "\n";
               });
  }
}

void run_method3(const Scenario& scenario, ArtifactSink& sink, RunPolicy policy) {
  for (const SweepPoint& point : sweep_points(scenario))
    run_method3_point(scenario, point, method3_config(scenario, point), "",
                      sink, policy);
}

void run_mitigation(const Scenario& scenario, ArtifactSink& sink,
                    RunPolicy policy) {
  for (const SweepPoint& point : sweep_points(scenario)) {
    Scenario with_hold = scenario;
    if (with_hold.mitigation == "none") with_hold.mitigation = "auto";
    run_method3_point(scenario, point, method3_config(with_hold, point),
                      "_with_hold", sink, policy);

    Scenario no_hold = scenario;
    no_hold.mitigation = "none";
    run_method3_point(scenario, point, method3_config(no_hold, point),
                      "_no_hold", sink, policy);
  }
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::FixedPoint: return "fixed_point";
    case Method::Method1: return "method1";
    case Method::Method2: return "method2";
    case Method::Method3: return "method3";
    case Method::Mitigation: return "mitigation";
    case Method::Stability: return "stability";
  }
  return "?";
}

std::string scenario_hash(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

Scenario parse_scenario_text(const std::string& text, const std::string& path) {
  ConfigReader reader(parse_flat_config(text, path), path);
  Scenario s;
  s.source_path = path;
  s.source_text = text;

  s.name = reader.get_string("scenario", "name");
  s.method = parse_method(reader.get_string("scenario", "method"), reader);
  s.replications =
      static_cast<std::size_t>(reader.get_int("scenario", "replications", 1));
  s.master_seed =
      static_cast<std::uint64_t>(reader.get_int("scenario", "master_seed", 1));
  s.output_dir = reader.get_string("scenario", "output_dir", "out/" + s.name);
  s.write_traces = reader.get_bool("scenario", "write_traces", false);

  const std::string protocol = reader.get_string("protocol", "protocol");
  if (protocol == "dcf")
    s.params.protocol = Protocol::Dcf;
  else if (protocol == "aloha")
    s.params.protocol = Protocol::Aloha;
  else
    reader.fail(0, "unknown protocol '" + protocol + "'");
  s.params.min_cw = static_cast<int>(reader.get_int("protocol", "W", 32));
  s.params.max_backoff_stage = static_cast<int>(reader.get_int(
      "protocol", "m", s.params.protocol == Protocol::Dcf ? 5 : 0));
  if (reader.has("protocol", "payload_bytes"))
    s.params.payload_bits = 8.0 * reader.get_double("protocol", "payload_bytes");
  s.params.payload_bits =
      reader.get_double("protocol", "payload_bits", s.params.payload_bits);
  s.params.data_rate = reader.get_double("protocol", "data_rate_bps", s.params.data_rate);
  s.params.basic_rate = reader.get_double("protocol", "basic_rate_bps", s.params.basic_rate);
  s.params.phy_rate = reader.get_double("protocol", "phy_rate_bps", s.params.phy_rate);
  s.params.mac_header_bits = reader.get_double("protocol", "mac_header_bits", s.params.mac_header_bits);
  s.params.plcp_preamble_bits = reader.get_double("protocol", "plcp_preamble_bits", s.params.plcp_preamble_bits);
  s.params.plcp_header_bits = reader.get_double("protocol", "plcp_header_bits", s.params.plcp_header_bits);
  s.params.ack_bits = reader.get_double("protocol", "ack_bits", s.params.ack_bits);
  if (reader.has("protocol", "sigma_us"))
    s.params.empty_slot = reader.get_double("protocol", "sigma_us") * 1e-6;
  if (reader.has("protocol", "difs_us"))
    s.params.difs = reader.get_double("protocol", "difs_us") * 1e-6;
  if (reader.has("protocol", "sifs_us"))
    s.params.sifs = reader.get_double("protocol", "sifs_us") * 1e-6;

  s.n_stations = static_cast<int>(reader.get_int("network", "N", 50));
  s.lambda = reader.get_double("network", "lambda", 0.0);
  s.max_queue = static_cast<int>(reader.get_int("network", "Q", 1000));
  s.theta = reader.get_double("network", "theta", 0.0);
  s.preload = static_cast<int>(reader.get_int("network", "preload", 0));

  if (reader.has("sweep", "variable")) {
    s.sweep_variable = reader.get_string("sweep", "variable");
    if (s.sweep_variable != "lambda" && s.sweep_variable != "N")
      reader.fail(0, "sweep variable must be 'lambda' or 'N'");
    s.sweep_values = reader.get_double_list("sweep", "values");
  }

  s.max_events = static_cast<std::uint64_t>(
      reader.get_int("method1", "max_events", static_cast<std::int64_t>(s.max_events)));

  s.horizon = reader.get_double("method3", "horizon_s", s.horizon);
  s.throughput_bin =
      reader.get_double("method3", "throughput_bin_s", s.throughput_bin);
  s.mitigation = reader.get_string("method3", "mitigation", s.mitigation);
  if (s.mitigation != "none" && s.mitigation != "auto") {
    try {
      std::size_t pos = 0;
      const double delay = std::stod(s.mitigation, &pos);
      if (pos != s.mitigation.size() || !(delay > 0))
        throw std::invalid_argument("");
    } catch (const std::exception&) {
      reader.fail(0, "mitigation must be 'none', 'auto' or a positive delay in seconds");
    }
  }
  const std::string traffic = reader.get_string("method3", "traffic", "poisson");
  if (traffic == "poisson")
    s.traffic = TrafficModel::Poisson;
  else if (traffic == "cbr")
    s.traffic = TrafficModel::Cbr;
  else if (traffic == "bursty")
    s.traffic = TrafficModel::Bursty;
  else
    reader.fail(0, "unknown traffic model '" + traffic + "'");
  s.burst_size = static_cast<int>(reader.get_int("method3", "burst_size", s.burst_size));
  s.burst_gap = reader.get_double("method3", "burst_gap_s", s.burst_gap);

  reader.reject_unused();

  if (s.replications < 1)
    throw ConfigError(path + ": replications must be >= 1", path, 0);
  if (!s.sweep_variable.empty() && s.sweep_values.empty())
    throw ConfigError(path + ": sweep values must be non-empty", path, 0);
  s.params.validate();
  return s;
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path, path, 0);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario_text(text.str(), path);
}

int run_scenario(const Scenario& scenario, std::ostream& log, RunPolicy policy) {
  fs::path dir(scenario.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    log << "error: cannot create output directory " << dir.string() << "\n";
    return kExitIoError;
  }

  ArtifactSink sink(dir, log);
  std::string failure;
  int exit_code = kExitOk;
  try {
    switch (scenario.method) {
      case Method::FixedPoint: run_fixed_point(scenario, sink); break;
      case Method::Stability: run_stability(scenario, sink); break;
      case Method::Method2: run_method2(scenario, sink); break;
      case Method::Method1: run_method1(scenario, sink, policy); break;
      case Method::Method3: run_method3(scenario, sink, policy); break;
      case Method::Mitigation: run_mitigation(scenario, sink, policy); break;
    }
  } catch (const std::exception& e) {
    failure = e.what();
    exit_code = kExitRuntimeError;
  }

  nlohmann::json manifest;
  manifest["scenario"] = scenario.name;
  manifest["method"] = to_string(scenario.method);
  manifest["scenario_hash"] = scenario_hash(scenario.source_text);
  manifest["master_seed"] = scenario.master_seed;
  manifest["files"] = sink.names();
  const auto now = std::chrono::system_clock::now();
  manifest["created_unix"] =
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
          .count();
  if (!failure.empty()) manifest["failed"] = failure;

  {
    std::ofstream out(dir / "manifest.json");
    out << manifest.dump(2) << "\n";
  }
  if (!failure.empty()) {
    std::ofstream out(dir / "FAILED");
    out << failure << "\n";
    log << "error: " << failure << "\n";
  }
  return exit_code;
}

}  // namespace ramat
