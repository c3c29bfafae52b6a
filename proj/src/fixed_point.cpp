#include "ramat/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ramat/errors.hpp"

namespace ramat {

namespace {

struct Model {
  const ProtocolParams& params;
  FrameTimings timings;
  int n_nodes;
  double lambda;    // unused when saturated
  bool saturated;

  double collision_probability(double tau) const {
    return 1.0 - std::pow(1.0 - tau, n_nodes - 1);
  }

  // Mean backoff slots per attempt. Aloha draws from a fixed window.
  double backoff_slots(double p) const {
    if (params.protocol == Protocol::Aloha) return 0.5 * params.min_cw;
    return expected_backoff_slots(p, params.min_cw, params.max_backoff_stage);
  }

  // Mean duration of one backoff slot as seen by a node counting down.
  // For DCF it mixes empty, successful and collided slots overheard from
  // the other n-1 nodes; for Aloha every slot spans a full frame exchange.
  double slot_length(double tau) const {
    if (params.protocol == Protocol::Aloha) return timings.slot_aloha;
    double p_success = 0.0;
    double p_empty = 1.0;
    if (n_nodes > 1) {
      p_success = (n_nodes - 1) * tau * std::pow(1.0 - tau, n_nodes - 2);
      p_empty = std::pow(1.0 - tau, n_nodes - 1);
    }
    const double p_collision = 1.0 - p_success - p_empty;
    return p_success * timings.success + p_collision * timings.collision +
           p_empty * params.empty_slot;
  }

  double service_time(double n_t, double backoff, double slot) const {
    const double per_attempt = backoff * slot;
    return (n_t - 1.0) * (per_attempt + timings.collision) + per_attempt +
           timings.success;
  }

  double idle_slots(double rho, double slot) const {
    return (1.0 - rho) / (-std::expm1(-lambda * slot));
  }

  double attempt_rate(double n_t, double backoff, double idle) const {
    return n_t / (n_t * (backoff + 1.0) + idle);
  }
};

double relative_change(double old_value, double new_value) {
  const double scale =
      std::max({std::abs(old_value), std::abs(new_value), 1e-300});
  return std::abs(new_value - old_value) / scale;
}

FixedPointSolution solve_core(const Model& model, SolverInit init,
                              const SolverOptions& options) {
  FixedPointSolution s;
  s.init = init;

  // Initial conditions; p and D follow from one plain evaluation pass.
  double tau, rho, idle;
  if (init == SolverInit::SaturatedStart) {
    tau = 0.5;
    rho = 1.0;
    idle = 0.0;
  } else {
    tau = 1e-5;
    rho = 0.0;
    idle = 1000.0;
  }
  if (model.saturated) {
    rho = 1.0;
    idle = 0.0;
  }
  double p = model.collision_probability(tau);
  double backoff = model.backoff_slots(p);
  double slot = model.slot_length(tau);
  double service = model.service_time(1.0 / (1.0 - p), backoff, slot);

  const double gamma = options.damping;
  auto damp = [gamma](double old_value, double update) {
    return (1.0 - gamma) * old_value + gamma * update;
  };

  double residual = 0.0;
  int iteration = 0;
  for (; iteration < options.max_iterations; ++iteration) {
    residual = 0.0;
    // The residual is the raw equation mismatch, not the damped step, so a
    // converged solution reproduces every defining equation within tolerance.
    auto step = [&](double& value, double update) {
      residual = std::max(residual, relative_change(value, update));
      value = damp(value, update);
    };

    step(p, model.collision_probability(tau));
    backoff = model.backoff_slots(p);
    slot = model.slot_length(tau);
    const double n_t = 1.0 / (1.0 - p);
    step(service, model.service_time(n_t, backoff, slot));
    if (!model.saturated) {
      step(rho, std::min(model.lambda * service, 1.0));
      step(idle, model.idle_slots(rho, slot));
    }
    step(tau, model.attempt_rate(n_t, backoff, idle));

    if (residual < options.tolerance) {
      ++iteration;
      break;
    }
  }

  s.converged = residual < options.tolerance;
  s.iterations = iteration;
  s.residual = residual;

  if (s.converged) {
    // One closing pass so the stored fields satisfy the defining equations
    // exactly given tau (only tau's own renewal equation keeps a residual
    // of order the tolerance).
    p = model.collision_probability(tau);
    backoff = model.backoff_slots(p);
    slot = model.slot_length(tau);
    const double n_t = 1.0 / (1.0 - p);
    service = model.service_time(n_t, backoff, slot);
    if (!model.saturated) {
      rho = std::min(model.lambda * service, 1.0);
      idle = model.idle_slots(rho, slot);
    }
  }

  s.tau = tau;
  s.p = p;
  s.rho = rho;
  s.n_t = 1.0 / (1.0 - p);
  s.service_time = service;
  s.idle_slots = idle;
  if (model.params.protocol == Protocol::Dcf) {
    s.backoff_slots = backoff;
    s.backoff_slot_len = slot;
  }
  s.throughput = rho * model.params.payload_bits / service;
  return s;
}

}  // namespace

std::string to_string(SolverInit init) {
  return init == SolverInit::SaturatedStart ? "saturated_start" : "light_start";
}

FixedPointSolution solve_fixed_point(const ProtocolParams& params, int n_nodes,
                                     double lambda, SolverInit init,
                                     const SolverOptions& options) {
  params.validate();
  if (n_nodes < 2) throw std::invalid_argument("solve_fixed_point: N must be >= 2");
  if (!(lambda > 0)) throw std::invalid_argument("solve_fixed_point: lambda must be > 0");
  Model model{params, compute_timings(params), n_nodes, lambda, false};
  return solve_core(model, init, options);
}

double saturated_service_rate(const ProtocolParams& params, int n,
                              const SolverOptions& options) {
  params.validate();
  if (n < 1) throw std::invalid_argument("saturated_service_rate: n must be >= 1");
  Model model{params, compute_timings(params), n, 0.0, true};
  const FixedPointSolution s = solve_core(model, SolverInit::SaturatedStart, options);
  if (!s.converged)
    throw NonConvergenceError(
        "saturated_service_rate: no convergence for n = " + std::to_string(n) +
            " (residual " + std::to_string(s.residual) + ")",
        s.residual, s.iterations);
  return 1.0 / s.service_time;
}

ServiceRateCurve service_rate_curve(const ProtocolParams& params, int n_max,
                                    const SolverOptions& options) {
  if (n_max < 1) throw std::invalid_argument("service_rate_curve: N_max must be >= 1");
  ServiceRateCurve curve{params, std::vector<double>(n_max, 0.0)};
  for (int n = 1; n <= n_max; ++n)
    curve.mu[n - 1] = saturated_service_rate(params, n, options);
  return curve;
}

}  // namespace ramat
