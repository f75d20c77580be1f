#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace poseplace {

// Deterministic RNG facade; draws are identical for a given seed on every run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller; one draw per call for reproducibility.
  double normal();
  double normal(double mu, double sigma) { return mu + sigma * normal(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t step = 0);

double log_sum_exp(std::span<const double> logs);

// Samples an index proportionally to exp(logw - max(logw)).
// All-(-inf) input returns -1 so callers can apply their documented fallback.
int log_categorical_sample(Rng& rng, std::span<const double> logw);

// ln I0(kappa): power series below the crossover, scaled asymptotic expansion above.
double log_bessel_i0(double kappa);

// A(kappa) = I1(kappa) / I0(kappa) via a continued fraction; kappa >= 0.
double bessel_i1_i0_ratio(double kappa);

// Inverse of A by bisection on [0, kappa_max] to |A(k) - r| <= tol.
double solve_vonmises_kappa(double rbar, double tol = 1e-6, double kappa_max = 700.0);

// Content fingerprint helpers used to compare candidate sets across methods.
std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed = 14695981039346656037ull);
std::uint64_t fnv1a64_double(double v, std::uint64_t h);

}  // namespace poseplace
