#ifndef RAMAT_ERRORS_HPP
#define RAMAT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ramat {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fixed-point iteration ran out of iterations before the residual dropped
// below tolerance. Carries the last residual so callers can report it.
struct NonConvergenceError : Error {
  NonConvergenceError(const std::string& what, double residual_, int iterations_)
      : Error(what), residual(residual_), iterations(iterations_) {}
  double residual;
  int iterations;
};

// lambda < mu(n) for every n: the reduced backlog chain has no absorbing state.
struct StableRegimeError : Error {
  using Error::Error;
};

struct SingularSystemError : Error {
  using Error::Error;
};

// A state with backlogged queues reports a non-positive service rate.
struct DegenerateRatesError : Error {
  using Error::Error;
};

// No replication crossed the occupancy threshold within its budget.
struct AllCensoredError : Error {
  using Error::Error;
};

// Replications crossed the threshold but no queue was ever empty, so the
// end-of-transitory instant is undefined (e.g. queues preloaded to the top).
struct AllUndefinedError : Error {
  using Error::Error;
};

struct EmptySampleError : Error {
  using Error::Error;
};

struct DegenerateSampleError : Error {
  using Error::Error;
};

struct InvalidProtocolError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  ConfigError(const std::string& what, std::string file_, int line_)
      : Error(what), file(std::move(file_)), line(line_) {}
  std::string file;
  int line;
};

}  // namespace ramat

#endif  // RAMAT_ERRORS_HPP
