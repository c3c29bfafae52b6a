#include "ramat/backlog_chain.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "ramat/csv.hpp"
#include "ramat/errors.hpp"
#include "ramat/stability.hpp"

namespace ramat {

namespace {

// Solves g(x) = cost(x) + up(x) g(x+1) + down(x) g(x-1) + stay(x) g(x) for
// x = 0..N'-1 with g(N') = 0. After dividing out the self-loop the system is
// tridiagonal; a forward elimination g(x) = a(x) + b(x) g(x+1) followed by a
// backward sweep solves it in O(N').
std::vector<double> solve_absorption_costs(const BacklogChain& chain,
                                           const std::vector<double>& cost) {
  const int n = chain.limiting_state;
  std::vector<double> a(n), b(n);
  for (int x = 0; x < n; ++x) {
    const double keep = 1.0 - chain.stay[x];
    if (!(keep > 0.0))
      throw SingularSystemError("backlog chain: self-loop probability is 1");
    const double c = cost[x] / keep;
    const double u = chain.up[x] / keep;
    const double d = chain.down[x] / keep;
    if (x == 0) {
      a[x] = c;
      b[x] = u;
      continue;
    }
    const double denom = 1.0 - d * b[x - 1];
    if (!(denom > 0.0))
      throw SingularSystemError("backlog chain: elimination pivot is not positive");
    a[x] = (c + d * a[x - 1]) / denom;
    b[x] = u / denom;
  }

  std::vector<double> g(static_cast<std::size_t>(n) + 1, 0.0);
  for (int x = n - 1; x >= 0; --x) g[x] = a[x] + b[x] * g[x + 1];
  return g;
}

}  // namespace

BacklogChain build_chain(int n_stations, double lambda,
                         const ServiceRateCurve& curve) {
  if (n_stations < 1) throw std::invalid_argument("build_chain: N must be >= 1");
  if (curve.max_contenders() < n_stations)
    throw std::invalid_argument("build_chain: curve shorter than N");

  const StabilityReport report = assess(lambda, curve);
  if (!report.limiting_state || *report.limiting_state > n_stations)
    throw StableRegimeError(
        "build_chain: lambda below mu(n) for all n <= N, no absorbing state");

  BacklogChain chain;
  chain.n_stations = n_stations;
  chain.limiting_state = *report.limiting_state;
  chain.lambda = lambda;
  const int n = chain.limiting_state;
  chain.mu.resize(n);
  for (int x = 1; x <= n; ++x) chain.mu[x - 1] = curve.at(x);
  chain.rho.resize(n > 0 ? n - 1 : 0);
  chain.up.resize(n);
  chain.down.resize(n);
  chain.stay.resize(n);

  for (int x = 0; x < n; ++x) {
    if (x == 0) {
      chain.up[0] = 1.0;
      chain.down[0] = 0.0;
      chain.stay[0] = 0.0;
      continue;
    }
    const double mu_x = chain.mu[x - 1];
    const double rho_x = lambda / mu_x;
    chain.rho[x - 1] = rho_x;
    const double denom = (n_stations - x) * lambda + x * mu_x;
    chain.up[x] = (n_stations - x) * lambda / denom;
    chain.down[x] = (1.0 - chain.up[x]) * (1.0 - rho_x);
    // Complement of the rounded partial sum: (up + down) + stay then rounds
    // to exactly 1, so the row sums are exact as evaluated.
    chain.stay[x] = 1.0 - (chain.up[x] + chain.down[x]);
  }
  return chain;
}

std::vector<double> hitting_times(const BacklogChain& chain) {
  const std::vector<double> unit_cost(chain.limiting_state, 1.0);
  return solve_absorption_costs(chain, unit_cost);
}

double expected_hitting_time_seconds(const BacklogChain& chain,
                                     const std::vector<double>& hitting) {
  if (hitting.size() != static_cast<std::size_t>(chain.limiting_state) + 1 ||
      hitting.back() != 0.0)
    throw std::invalid_argument(
        "expected_hitting_time_seconds: hitting vector does not match chain");
  std::vector<double> cost(chain.limiting_state);
  for (int x = 0; x < chain.limiting_state; ++x)
    cost[x] = 1.0 / chain.event_rate(x);
  return solve_absorption_costs(chain, cost)[0];
}

void write_chain_csv(std::ostream& out, const BacklogChain& chain,
                     const std::vector<double>& hitting) {
  CsvWriter csv(out);
  csv.header({"x", "up", "down", "stay", "h"});
  for (int x = 0; x <= chain.limiting_state; ++x) {
    const bool transient = x < chain.limiting_state;
    csv.field(x)
        .field(transient ? chain.up[x] : 0.0)
        .field(transient ? chain.down[x] : 0.0)
        .field(transient ? chain.stay[x] : 1.0)
        .field(hitting[x]);
    csv.end_row();
  }
}

}  // namespace ramat
