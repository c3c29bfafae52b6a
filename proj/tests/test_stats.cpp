#include <doctest.h>

#include <cmath>

#include "ramat/errors.hpp"
#include "ramat/rng.hpp"
#include "ramat/stats.hpp"
#include "test_util.hpp"

using namespace ramat;

TEST_CASE("ecdf counts ties and endpoints") {
  const EcdfSample single = ecdf({2.0});
  CHECK(single.at(2.0) == 1.0);
  CHECK(single.at(1.999) == 0.0);

  const EcdfSample three = ecdf({3.0, 1.0, 2.0});
  CHECK(three.at(2.0) == doctest::Approx(2.0 / 3.0));
  CHECK(three.at(0.5) == 0.0);
  CHECK(three.at(3.0) == 1.0);

  const EcdfSample ties = ecdf({1.0, 1.0, 1.0});
  CHECK(ties.at(1.0 - 1e-12) == 0.0);
  CHECK(ties.at(1.0) == 1.0);

  CHECK_THROWS_AS(ecdf({}), EmptySampleError);
  CHECK_THROWS_AS(ecdf({1.0, -2.0}), std::invalid_argument);
}

TEST_CASE("inverse gaussian closed-form mle") {
  const FitResult fit = fit_inverse_gaussian({1.0, 2.0, 3.0});
  const auto& params = std::get<InverseGaussianParams>(fit.family);
  CHECK(params.mu == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(params.lambda_shape == doctest::Approx(9.0).epsilon(1e-12));
  CHECK(std::isfinite(fit.nll));

  CHECK_THROWS_AS(fit_inverse_gaussian({2.0, 2.0, 2.0}), DegenerateSampleError);
  CHECK_THROWS_AS(fit_inverse_gaussian({1.0}), std::invalid_argument);
}

TEST_CASE("exponential mle is the reciprocal mean") {
  const FitResult even = fit_exponential({2.0, 2.0, 2.0});
  CHECK(std::get<ExponentialParams>(even.family).rate == doctest::Approx(0.5));
  const FitResult pair = fit_exponential({1.0, 3.0});
  CHECK(std::get<ExponentialParams>(pair.family).rate == doctest::Approx(0.5));
  // nll = n (1 - ln rate)
  CHECK(pair.nll == doctest::Approx(2.0 * (1.0 - std::log(0.5))).epsilon(1e-12));
  CHECK_THROWS_AS(fit_exponential({}), EmptySampleError);
}

TEST_CASE("fitted parameters are local nll minima (+/- 1%)") {
  Rng rng(606);
  std::vector<double> samples;
  for (int i = 0; i < 500; ++i)
    samples.push_back(testutil::sample_inverse_gaussian(rng, 2.0, 5.0));

  const FitResult ig = fit_inverse_gaussian(samples);
  const auto& params = std::get<InverseGaussianParams>(ig.family);
  for (double f_mu : {0.99, 1.0, 1.01})
    for (double f_lambda : {0.99, 1.0, 1.01})
      CHECK(inverse_gaussian_nll(samples, params.mu * f_mu,
                                 params.lambda_shape * f_lambda) >=
            ig.nll - 1e-9);

  const FitResult exp_fit = fit_exponential(samples);
  const double rate = std::get<ExponentialParams>(exp_fit.family).rate;
  CHECK(exponential_nll(samples, rate * 1.01) >= exp_fit.nll);
  CHECK(exponential_nll(samples, rate * 0.99) >= exp_fit.nll);
}

TEST_CASE("scale equivariance") {
  const std::vector<double> samples{0.5, 1.25, 2.0, 3.5, 0.75};
  std::vector<double> scaled;
  const double c = 37.0;
  for (double x : samples) scaled.push_back(c * x);

  const auto ig = std::get<InverseGaussianParams>(fit_inverse_gaussian(samples).family);
  const auto ig_scaled =
      std::get<InverseGaussianParams>(fit_inverse_gaussian(scaled).family);
  CHECK(ig_scaled.mu == doctest::Approx(c * ig.mu).epsilon(1e-12));
  CHECK(ig_scaled.lambda_shape == doctest::Approx(c * ig.lambda_shape).epsilon(1e-12));

  const double rate = std::get<ExponentialParams>(fit_exponential(samples).family).rate;
  const double rate_scaled =
      std::get<ExponentialParams>(fit_exponential(scaled).family).rate;
  CHECK(rate_scaled == doctest::Approx(rate / c).epsilon(1e-12));
}

TEST_CASE("each fitter wins on its own synthetic data") {
  Rng rng(2025);
  std::vector<double> exp_sample;
  for (int i = 0; i < 10000; ++i) exp_sample.push_back(rng.next_exponential(1.0));
  const std::vector<FitResult> exp_rank = compare_fits(exp_sample);
  CHECK_FALSE(exp_rank.front().is_inverse_gaussian());
  CHECK(std::get<ExponentialParams>(exp_rank.front().family).rate ==
        doctest::Approx(1.0).epsilon(0.05));

  std::vector<double> ig_sample;
  for (int i = 0; i < 10000; ++i)
    ig_sample.push_back(testutil::sample_inverse_gaussian(rng, 1.0, 3.0));
  const std::vector<FitResult> ig_rank = compare_fits(ig_sample);
  CHECK(ig_rank.front().is_inverse_gaussian());
  const auto& params = std::get<InverseGaussianParams>(ig_rank.front().family);
  CHECK(params.mu == doctest::Approx(1.0).epsilon(0.05));
  CHECK(params.lambda_shape == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("two-point sample still yields finite fits in deterministic order") {
  const std::vector<FitResult> fits = compare_fits({1.0, 2.0});
  REQUIRE(fits.size() == 2);
  CHECK(std::isfinite(fits[0].nll));
  CHECK(std::isfinite(fits[1].nll));
  CHECK(fits[0].nll <= fits[1].nll);
}
