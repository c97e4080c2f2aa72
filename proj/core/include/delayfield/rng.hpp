#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace delayfield {

// Philox4x32-10 counter-based generator. Every 128-bit block is a pure
// function of (seed, stream, counter), so any neuron/trial substream can be
// regenerated independently of how many draws other streams consumed. That is
// what keeps simulations reproducible when N or the thread count changes.
namespace philox {

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline std::array<std::uint32_t, 4> block(std::uint64_t key, std::uint64_t stream,
                                          std::uint64_t counter) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;

  std::uint32_t c0 = static_cast<std::uint32_t>(counter);
  std::uint32_t c1 = static_cast<std::uint32_t>(counter >> 32);
  std::uint32_t c2 = static_cast<std::uint32_t>(stream);
  std::uint32_t c3 = static_cast<std::uint32_t>(stream >> 32);
  std::uint32_t k0 = static_cast<std::uint32_t>(key);
  std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);

  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c0, hi0, lo0);
    mulhilo(kM1, c2, hi1, lo1);
    const std::uint32_t n0 = hi1 ^ c1 ^ k0;
    const std::uint32_t n1 = lo1;
    const std::uint32_t n2 = hi0 ^ c3 ^ k1;
    const std::uint32_t n3 = lo0;
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    k0 += kW0;
    k1 += kW1;
  }
  return {c0, c1, c2, c3};
}

}  // namespace philox

/// Substream identifiers, composed into the 64-bit stream word.
enum class NoiseKind : std::uint64_t {
  Intrinsic = 1,   // W^i
  Synaptic = 2,    // B^{i gamma}
  InitState = 3,   // chaotic initial condition
  DelayDraw = 4,   // quenched delay row i
  Position = 5,    // interval-topology positions
  Trial = 6,       // per-trial master streams in experiments
  Generic = 7,
};

/// kind | index | gamma packed into one stream word (index < 2^48, gamma < 256).
inline std::uint64_t substream(NoiseKind kind, std::uint64_t index, std::uint64_t gamma = 0) {
  return (static_cast<std::uint64_t>(kind) << 56) | (index << 8) | (gamma & 0xFF);
}

inline double u64_to_unit(std::uint64_t x) {
  // (0, 1]; never 0 so log() is safe
  return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

/// Two independent uniforms in (0,1] from one Philox block.
inline std::array<double, 2> uniforms_at(std::uint64_t seed, std::uint64_t stream,
                                         std::uint64_t counter) {
  const auto b = philox::block(seed, stream, counter);
  const std::uint64_t a = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
  const std::uint64_t c = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
  return {u64_to_unit(a), u64_to_unit(c)};
}

/// Standard normal at an explicit (stream, counter) address (Box-Muller, first deviate).
inline double normal_at(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const auto u = uniforms_at(seed, stream, counter);
  return std::sqrt(-2.0 * std::log(u[0])) * std::cos(6.283185307179586476925286766559 * u[1]);
}

/// Sequential view over one substream, for sampling code that wants draw-by-draw access.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  double uniform() { return uniforms_at(seed_, stream_, counter_++)[0]; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const auto u = uniforms_at(seed_, stream_, counter_++);
    const double r = std::sqrt(-2.0 * std::log(u[0]));
    const double phi = 6.283185307179586476925286766559 * u[1];
    spare_ = r * std::sin(phi);
    have_spare_ = true;
    return r * std::cos(phi);
  }

  std::uint64_t next_u64() {
    const auto b = philox::block(seed_, stream_, counter_++);
    return (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace delayfield
