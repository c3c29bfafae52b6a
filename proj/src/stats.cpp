#include "ramat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "ramat/csv.hpp"
#include "ramat/errors.hpp"

namespace ramat {

namespace {

void require_positive(const std::vector<double>& samples, const char* who) {
  if (samples.empty()) throw EmptySampleError(std::string(who) + ": empty sample");
  for (double x : samples)
    if (!(x > 0)) throw std::invalid_argument(std::string(who) + ": values must be > 0");
}

}  // namespace

double EcdfSample::at(double x) const {
  const auto it = std::upper_bound(values.begin(), values.end(), x);
  return static_cast<double>(it - values.begin()) / static_cast<double>(n);
}

EcdfSample ecdf(const std::vector<double>& samples) {
  require_positive(samples, "ecdf");
  EcdfSample result{samples, samples.size()};
  std::sort(result.values.begin(), result.values.end());
  return result;
}

void write_ecdf_csv(std::ostream& out, const EcdfSample& sample) {
  CsvWriter csv(out);
  csv.header({"x", "F"});
  for (std::size_t i = 0; i < sample.values.size(); ++i) {
    csv.field(sample.values[i])
        .field(static_cast<double>(i + 1) / static_cast<double>(sample.n));
    csv.end_row();
  }
}

double inverse_gaussian_nll(const std::vector<double>& samples, double mu,
                            double lambda_shape) {
  // -log f(x) with f(x) = sqrt(lambda / (2 pi x^3)) exp(-lambda (x-mu)^2 / (2 mu^2 x))
  const auto n = static_cast<double>(samples.size());
  double nll = -0.5 * n * std::log(lambda_shape) +
               0.5 * n * std::log(2.0 * std::numbers::pi);
  for (double x : samples) {
    const double d = x - mu;
    nll += 1.5 * std::log(x) + lambda_shape * d * d / (2.0 * mu * mu * x);
  }
  return nll;
}

double exponential_nll(const std::vector<double>& samples, double rate) {
  double sum = 0.0;
  for (double x : samples) sum += x;
  return rate * sum - static_cast<double>(samples.size()) * std::log(rate);
}

FitResult fit_inverse_gaussian(const std::vector<double>& samples) {
  require_positive(samples, "fit_inverse_gaussian");
  if (samples.size() < 2)
    throw std::invalid_argument("fit_inverse_gaussian: need at least 2 samples");

  double sum = 0.0;
  for (double x : samples) sum += x;
  const double mu = sum / static_cast<double>(samples.size());

  double dispersion = 0.0;
  for (double x : samples) dispersion += 1.0 / x - 1.0 / mu;
  if (!(dispersion > 1e-300 * static_cast<double>(samples.size())))
    throw DegenerateSampleError("fit_inverse_gaussian: zero dispersion sample");

  const double lambda_shape = static_cast<double>(samples.size()) / dispersion;
  return FitResult{InverseGaussianParams{mu, lambda_shape},
                   inverse_gaussian_nll(samples, mu, lambda_shape),
                   samples.size()};
}

FitResult fit_exponential(const std::vector<double>& samples) {
  require_positive(samples, "fit_exponential");
  double sum = 0.0;
  for (double x : samples) sum += x;
  const double rate = static_cast<double>(samples.size()) / sum;
  return FitResult{ExponentialParams{rate}, exponential_nll(samples, rate),
                   samples.size()};
}

std::vector<FitResult> compare_fits(const std::vector<double>& samples) {
  std::vector<FitResult> fits{fit_inverse_gaussian(samples),
                              fit_exponential(samples)};
  std::stable_sort(fits.begin(), fits.end(),
                   [](const FitResult& a, const FitResult& b) { return a.nll < b.nll; });
  return fits;
}

}  // namespace ramat
