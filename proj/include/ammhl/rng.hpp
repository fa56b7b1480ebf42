#pragma once

#include <array>
#include <cstdint>

namespace ammhl {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
// The output block is a pure function of (key, counter), so a path's draws
// never depend on which thread simulated it or in which order.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept;
};

// Independent sub-streams used by the simulator.
enum class Stream : std::uint32_t {
  price = 0,
  arrivals = 1,
  valuations = 2,
  perturbation = 3,
  oracle = 4,
};

// Sequential view over the counter space of one (seed, path, stream) triple.
class PathRng {
 public:
  PathRng(std::uint64_t seed, std::uint64_t path, Stream stream) noexcept;

  std::uint64_t next_u64() noexcept;
  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;
  // Standard normal via Box-Muller; pairs are consumed in order.
  double normal() noexcept;

 private:
  void refill() noexcept;

  Philox4x32::Key key_;
  Philox4x32::Counter ctr_;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ammhl
