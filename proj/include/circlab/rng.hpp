#ifndef CIRCLAB_RNG_HPP
#define CIRCLAB_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>

namespace circlab {

// Counter-based substreams: the state of each stream is a pure function of
// (seed, trial, tag), so trials can be generated in any order or on any
// thread and still produce identical bits.
//
// The generator is splitmix64; normal variates come from Box-Muller on
// uniforms in (0,1].  Same-platform runs are bit-reproducible; a
// reimplementation from this description matches in distribution.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t trial,
                                       std::uint64_t tag) {
  std::uint64_t s = seed;
  std::uint64_t k = splitmix64_next(s);
  s ^= trial * 0xD1342543DE82EF95ULL;
  k ^= splitmix64_next(s);
  s ^= tag * 0xAF251AF3B0F025B5ULL;
  k ^= splitmix64_next(s);
  return k;
}

class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t trial, std::uint64_t tag)
      : state_(derive_stream_key(seed, trial, tag)) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform in (0,1]; never returns 0 so log() below is safe.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal, Box-Muller, second variate cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Complex Gaussian with total variance `var` (re and im each var/2).
  std::complex<double> complex_gaussian(double var) {
    double s = std::sqrt(var / 2.0);
    return {s * gaussian(), s * gaussian()};
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace circlab

#endif
