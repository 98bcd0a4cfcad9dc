#include "roamp/rng.hpp"

namespace roamp {

Rng::Rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                    static_cast<std::uint32_t>(seed >> 32), stream, 0x0a3dd5u};
  engine_.seed(seq);
}

}  // namespace roamp
