#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace rloc {

/// Deterministic random source. The engine is the standardized mt19937_64 and
/// every variate transform is implemented here, so identical seeds produce
/// bit-identical draws on every platform and standard library.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  /// Derives an independent stream, e.g. one per sensor.
  Rng fork(uint64_t stream) const {
    uint64_t z = seed_mix_ + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return Rng(z ^ (z >> 31));
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(uniform() * (hi - lo + 1));
  }

  /// Standard normal via the polar method.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 gen_;
  uint64_t seed_mix_ = gen_();  // consumed once so fork() differs from draws
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rloc
