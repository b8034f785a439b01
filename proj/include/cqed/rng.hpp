// Counter-based random number generation for reproducible trajectory noise.
//
// Every Wiener increment in a simulation is addressable as
//   gaussian(seed, trajectory, channel, index)
// so records can be regenerated or replayed bit-exactly, and ensembles can
// be split across threads without any shared generator state.

#pragma once

#include <array>
#include <cstdint>

namespace cqed {

// Philox4x32-10 block cipher (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

std::uint64_t splitmix64(std::uint64_t x);

// Stream of standard normal deviates, one per integration step.
// Key is derived from (seed ^ trajectory); the channel selects an
// independent stream (two detection channels in I/Q mode).
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t trajectory,
                 std::uint32_t channel);

  // i-th deviate of the stream; random access, no state dependence.
  double at(std::uint64_t i) const;

  // Sequential draw (counter kept internally).
  double next() { return at(pos_++); }

  void reset() { pos_ = 0; }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint32_t channel_;
  std::uint64_t pos_ = 0;
};

}  // namespace cqed
