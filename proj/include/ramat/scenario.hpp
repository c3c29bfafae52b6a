#ifndef RAMAT_SCENARIO_HPP
#define RAMAT_SCENARIO_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ramat/dcf_sim.hpp"
#include "ramat/parallel.hpp"
#include "ramat/protocol.hpp"

namespace ramat {

enum class Method { FixedPoint, Method1, Method2, Method3, Mitigation, Stability };

std::string to_string(Method method);

// A named experiment parsed from a flat key = value config file.
struct Scenario {
  std::string name;
  Method method = Method::FixedPoint;
  ProtocolParams params;
  int n_stations = 50;
  double lambda = 0.0;
  int max_queue = 1000;
  double theta = 0.0;  // 0 = 0.75 * Q
  int preload = 0;
  std::size_t replications = 1;
  std::string output_dir;
  std::uint64_t master_seed = 1;

  std::string sweep_variable;  // "", "lambda" or "N"
  std::vector<double> sweep_values;

  std::uint64_t max_events = 2'000'000'000;  // Method 1 event budget

  double horizon = 86400.0;  // Method 3
  double throughput_bin = 1.0;
  std::string mitigation = "none";  // "none", "auto" or a delay in seconds
  TrafficModel traffic = TrafficModel::Poisson;
  int burst_size = 10;
  double burst_gap = 0.0;
  bool write_traces = false;

  std::string source_path;
  std::string source_text;  // hashed into the manifest
};

Scenario parse_scenario_file(const std::string& path);
Scenario parse_scenario_text(const std::string& text, const std::string& path);

// Runs the scenario, writing CSV artifacts plus a manifest into
// scenario.output_dir. Logs one line per artifact to `log`. Returns the
// process exit code (0 on success); on failure a FAILED marker with the
// error text is left in the output directory.
int run_scenario(const Scenario& scenario, std::ostream& log,
                 RunPolicy policy = RunPolicy::Parallel);

// FNV-1a 64-bit over the raw config text, printed as 16 hex digits.
std::string scenario_hash(const std::string& text);

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;
inline constexpr int kExitIoError = 4;

}  // namespace ramat

#endif  // RAMAT_SCENARIO_HPP
