#ifndef RAMAT_FIXED_POINT_HPP
#define RAMAT_FIXED_POINT_HPP

#include <optional>
#include <vector>

#include "ramat/protocol.hpp"

namespace ramat {

// Initial conditions for the iterative solver. The unsaturated model can
// have two fixed points right above the stability limit; which one the
// iteration lands on depends on where it starts.
enum class SolverInit { SaturatedStart, LightStart };

std::string to_string(SolverInit init);

struct SolverOptions {
  double tolerance = 1e-10;  // max relative change per sweep
  int max_iterations = 10000;
  double damping = 0.5;  // new = (1 - damping) * old + damping * update
};

// Converged state of the decoupled renewal-reward model.
struct FixedPointSolution {
  double tau = 0.0;   // per-slot transmission attempt probability
  double p = 0.0;     // conditional collision probability
  double rho = 0.0;   // queue busy probability, min(lambda * D, 1)
  double n_t = 1.0;   // mean attempts per delivered packet, 1 / (1 - p)
  double service_time = 0.0;  // D, seconds
  double idle_slots = 0.0;    // I, mean idle slots between renewals
  std::optional<double> backoff_slots;    // E[w], DCF only
  std::optional<double> backoff_slot_len;  // alpha, seconds, DCF only
  double throughput = 0.0;  // S = rho * L / D, bits/s per node
  SolverInit init = SolverInit::SaturatedStart;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

// Iterates the coupled model equations for N homogeneous nodes offered
// lambda packets/s each, starting from the given initial conditions.
// Returns the last iterate with `converged` set accordingly.
FixedPointSolution solve_fixed_point(const ProtocolParams& params, int n_nodes,
                                     double lambda, SolverInit init,
                                     const SolverOptions& options = {});

// Service rate 1/D (packets/s) with n saturated contenders (rho pinned to 1,
// no idle slots). Throws NonConvergenceError if the iteration fails.
double saturated_service_rate(const ProtocolParams& params, int n,
                              const SolverOptions& options = {});

// mu(n) for n = 1..N, the per-station saturated service rate curve.
struct ServiceRateCurve {
  ProtocolParams params;
  std::vector<double> mu;  // mu[n - 1] is the rate with n contenders

  int max_contenders() const { return static_cast<int>(mu.size()); }
  double at(int n) const { return mu.at(static_cast<std::size_t>(n) - 1); }
};

ServiceRateCurve service_rate_curve(const ProtocolParams& params, int n_max,
                                    const SolverOptions& options = {});

}  // namespace ramat

#endif  // RAMAT_FIXED_POINT_HPP
