#pragma once

#include <cstdint>
#include <random>

namespace flipit {

// Seeded 64-bit stream. Uniform variates are built from raw engine bits so
// the sequence is identical across standard library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  // Uniform on (0, 1]; never returns 0 so -log(u) is always finite.
  double uniform_open0() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Named sub-streams of one trial seed.
enum class StreamId : std::uint64_t {
  kParameters = 1,
  kAttacks = 2,
  kTest = 99,
};

inline RandomStream make_stream(std::uint64_t seed, StreamId id) {
  return RandomStream(seed, static_cast<std::uint64_t>(id));
}

}  // namespace flipit
