#include "poseplace/numerics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "poseplace/errors.hpp"
#include "poseplace/geometry.hpp"

namespace poseplace {

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection sampling keeps the draw unbiased for any n.
  const std::uint64_t limit = n * (UINT64_MAX / n);
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

double Rng::normal() {
  // Box-Muller, discarding the second variate.
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t step) {
  // splitmix64 over a mixed key; decorrelates per-scene / per-iteration streams.
  std::uint64_t x = seed + 0x9E3779B97F4A7C15ull * (stream + 1) + 0xBF58476D1CE4E5B9ull * (step + 1);
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

double log_sum_exp(std::span<const double> logs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : logs) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : logs) s += std::exp(v - m);
  return m + std::log(s);
}

int log_categorical_sample(Rng& rng, std::span<const double> logw) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : logw) m = std::max(m, v);
  if (!std::isfinite(m)) return -1;

  double total = 0.0;
  for (double v : logw) total += std::exp(v - m);
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    u -= std::exp(logw[i] - m);
    if (u < 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(logw.size()) - 1;  // guards against rounding at the tail
}

double log_bessel_i0(double kappa) {
  if (kappa < 0.0) throw DomainError("log_bessel_i0: kappa must be >= 0");
  if (kappa < 15.0) {
    // I0(k) = sum_j ((k/2)^(2j) / (j!)^2); converges fast for small k.
    const double q = 0.25 * kappa * kappa;
    double term = 1.0, sum = 1.0;
    for (int j = 1; j < 200; ++j) {
      term *= q / (static_cast<double>(j) * j);
      sum += term;
      if (term < sum * 1e-18) break;
    }
    return std::log(sum);
  }
  // I0(k) ~ e^k / sqrt(2 pi k) * (1 + 1/(8k) + 9/(128 k^2) + 225/(3072 k^3) + ...)
  const double inv = 1.0 / kappa;
  const double corr = 1.0 + inv * (0.125 + inv * (0.0703125 + inv * (0.0732421875 + inv * 0.112152099609375)));
  return kappa - 0.5 * std::log(kTwoPi * kappa) + std::log(corr);
}

double bessel_i1_i0_ratio(double kappa) {
  if (kappa < 0.0) throw DomainError("bessel_i1_i0_ratio: kappa must be >= 0");
  if (kappa == 0.0) return 0.0;
  // Gauss continued fraction for I1/I0, evaluated with the modified Lentz scheme.
  const double tiny = 1e-300;
  double f = tiny, c = f, d = 0.0;
  for (int n = 1; n < 20000; ++n) {
    const double b = 2.0 * n / kappa;  // partial denominators; partial numerators are 1
    d = b + d;
    if (d == 0.0) d = tiny;
    c = b + 1.0 / c;
    if (c == 0.0) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return f;
}

double solve_vonmises_kappa(double rbar, double tol, double kappa_max) {
  if (rbar < 1e-3) return 0.0;
  if (rbar >= bessel_i1_i0_ratio(kappa_max)) return kappa_max;
  double lo = 0.0, hi = kappa_max;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double a = bessel_i1_i0_ratio(mid);
    if (std::abs(a - rbar) <= tol) return mid;
    (a < rbar ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t fnv1a64_double(double v, std::uint64_t h) {
  if (v == 0.0) v = 0.0;  // collapse -0.0 and +0.0
  const auto bits = std::bit_cast<std::uint64_t>(v);
  return fnv1a64(&bits, sizeof(bits), h);
}

}  // namespace poseplace
