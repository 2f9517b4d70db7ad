#ifndef CKMC_RNG_HPP
#define CKMC_RNG_HPP

#include <cmath>
#include <cstdint>

namespace ckmc {

// splitmix64. Deterministic across platforms; replica streams are derived
// from the root seed by XOR with a mixed replica index, so any replica can
// be re-run in isolation.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  static Rng for_replica(uint64_t root_seed, uint64_t replica_index) {
    return Rng(root_seed ^ mix(replica_index + 1));
  }

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // uniform in [0,1)
  double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform integer in [0,n)
  uint64_t below(uint64_t n) { return next_u64() % n; }

  // exponential with the given rate; log1p keeps the argument in (0,1]
  double exponential(double rate) { return -std::log1p(-u01()) / rate; }

 private:
  uint64_t state_;
};

}  // namespace ckmc

#endif
