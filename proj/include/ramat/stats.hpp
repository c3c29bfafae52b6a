#ifndef RAMAT_STATS_HPP
#define RAMAT_STATS_HPP

#include <cstddef>
#include <iosfwd>
#include <variant>
#include <vector>

namespace ramat {

// Empirical CDF over positive durations: F(x) = #{values <= x} / n.
struct EcdfSample {
  std::vector<double> values;  // sorted ascending
  std::size_t n = 0;

  double at(double x) const;
};

EcdfSample ecdf(const std::vector<double>& samples);
void write_ecdf_csv(std::ostream& out, const EcdfSample& sample);

struct InverseGaussianParams {
  double mu;           // mean
  double lambda_shape;  // shape
};

struct ExponentialParams {
  double rate;
};

using FitFamily = std::variant<InverseGaussianParams, ExponentialParams>;

struct FitResult {
  FitFamily family;
  double nll;     // negative log-likelihood, nats
  std::size_t n;  // sample count

  bool is_inverse_gaussian() const {
    return std::holds_alternative<InverseGaussianParams>(family);
  }
  const char* family_name() const {
    return is_inverse_gaussian() ? "inverse_gaussian" : "exponential";
  }
};

// Negative log-likelihoods in log space, usable for arbitrary parameters.
double inverse_gaussian_nll(const std::vector<double>& samples, double mu,
                            double lambda_shape);
double exponential_nll(const std::vector<double>& samples, double rate);

// Closed-form MLE: mu = sample mean, lambda = n / sum(1/x_i - 1/mu).
// Throws DegenerateSampleError when the dispersion term vanishes.
FitResult fit_inverse_gaussian(const std::vector<double>& samples);
// MLE rate = 1 / sample mean.
FitResult fit_exponential(const std::vector<double>& samples);

// Both fits ordered by ascending nll; ties keep the inverse Gaussian first.
std::vector<FitResult> compare_fits(const std::vector<double>& samples);

}  // namespace ramat

#endif  // RAMAT_STATS_HPP
