#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace trunclr {

/// 64-bit FNV-1a hash, used for labeled seed derivation and fixture pinning.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

/// Derives an independent stream seed from a master seed and a stage label.
/// Adding new labels never perturbs the seeds of existing ones.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

/// Seeded random stream. Uniform and normal variates are generated from raw
/// mt19937_64 output with fixed transforms so that streams are reproducible
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1).
  double uniform_open() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via the Marsaglia polar method.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace trunclr
