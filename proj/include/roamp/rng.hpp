#pragma once

#include <cstdint>
#include <random>

namespace roamp {

// Independent substreams of one experiment seed. Each component of an
// instance draws from its own stream so that, e.g., changing the noise model
// leaves the signals and side information bit-identical.
enum class Stream : std::uint32_t {
  SignalU = 1,
  SignalV = 2,
  SideInfoU = 3,
  SideInfoV = 4,
  Noise = 5,
  Auxiliary = 6,
};

class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed, std::uint32_t stream = 0);
  Rng(std::uint64_t seed, Stream stream) : Rng(seed, static_cast<std::uint32_t>(stream)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  // +1 or -1 with equal probability.
  double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }
  engine_type& engine() { return engine_; }

 private:
  engine_type engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace roamp
