#include "viraltrace/rng.hpp"

#include <cmath>

#include "viraltrace/error.hpp"

namespace viraltrace {

long long poisson_from_uniform(double mean, double u) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) fail(Errc::invalid_params, "poisson mean must be >= 0");
  if (mean == 0.0) return 0;
  double pmf = std::exp(-mean);
  double cdf = pmf;
  long long k = 0;
  // u < 1 guarantees termination; cap guards pathological means
  while (cdf <= u && k < 1000000) {
    ++k;
    pmf *= mean / static_cast<double>(k);
    cdf += pmf;
  }
  return k;
}

long long zero_truncated_poisson_from_uniform(double mean, double u) {
  if (!(mean > 0.0) || !std::isfinite(mean)) fail(Errc::invalid_params, "poisson mean must be > 0");
  double p0 = std::exp(-mean);
  // invert the CDF conditioned on k >= 1
  double target = p0 + u * (1.0 - p0);
  double pmf = p0;
  double cdf = p0;
  long long k = 0;
  while (cdf <= target && k < 1000000) {
    ++k;
    pmf *= mean / static_cast<double>(k);
    cdf += pmf;
  }
  return k < 1 ? 1 : k;
}

double gaussian(SplitMix64& rng) {
  double u1 = rng.uniform();
  double u2 = rng.uniform();
  while (u1 <= 0.0) u1 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

}  // namespace viraltrace
