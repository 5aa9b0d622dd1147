#ifndef SIGMA_RNG_HPP_
#define SIGMA_RNG_HPP_

// Counter-based portable generator.  The full algorithm, so that other
// implementations can reproduce the streams bit for bit:
//
//   mix(z):  z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9
//            z ^= z >> 27;  z *= 0x94D049BB133111EB
//            z ^= z >> 31               (the SplitMix64 finalizer)
//   output(i) = mix(key + i * 0x9E3779B97F4A7C15),  i = 1, 2, ...
//   stream derivation: key(seed, stream) = mix(seed ^ mix(stream + 1))
//
// uniform() maps the top 53 bits to [0,1); normals use Box-Muller on a
// uniform pair shifted into (0,1).

#include <cmath>
#include <cstdint>

namespace sigma {

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 1))) {}

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ull); }

  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in the open interval (0,1).
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform_open();
    double u2 = uniform_open();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_cached_ = false;
  double cached_ = 0;
};

}  // namespace sigma

#endif  // SIGMA_RNG_HPP_
