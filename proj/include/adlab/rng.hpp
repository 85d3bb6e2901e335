#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace adlab {

/// Deterministic RNG with explicit samplers. mt19937_64 output is fixed by
/// the standard and every transform below is spelled out, so a seed pins the
/// whole stream independent of the standard library's distribution code.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  /// Uniform in [0, 1) with 53 usable bits.
  double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1]; safe as a log argument.
  double u01_open() { return 1.0 - u01(); }

  uint64_t below(uint64_t n) { return n == 0 ? 0 : gen_() % n; }

  bool chance(double p) { return u01() < p; }

  /// Exponential with the given mean (inter-arrival sampling).
  double exponential(double mean) { return -mean * std::log(u01_open()); }

  /// Standard normal via Box-Muller (no spare kept: two uniforms per draw).
  double normal() {
    double u1 = u01_open();
    double u2 = u01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  double lognormal(double mu_log, double sigma_log) {
    return std::exp(mu_log + sigma_log * normal());
  }

  /// Geometric on {1, 2, ...} with success probability p.
  uint64_t geometric1(double p) {
    if (p >= 1.0) return 1;
    double u = u01_open();
    return 1 + static_cast<uint64_t>(std::floor(std::log(u) / std::log(1.0 - p)));
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace adlab
