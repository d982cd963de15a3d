#ifndef WPRIOR_RNG_HPP
#define WPRIOR_RNG_HPP

#include <cstdint>
#include <random>

#include "wprior/special.hpp"

namespace wprior {

/// splitmix64 finalizer; used to derive independent substreams from a
/// master seed so that parallel replicates stay reproducible.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream_id,
                                    std::uint64_t replicate_id = 0) {
  return mix64(mix64(master ^ mix64(stream_id)) ^ mix64(replicate_id));
}

/// Deterministic generator. Normals are produced by inverse-cdf so the
/// output stream is fully specified by the seed, independent of the
/// standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    // 53-bit mantissa, strictly inside (0, 1).
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return norm_quantile(uniform()); }

  double exponential() { return -std::log(uniform()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wprior

#endif
