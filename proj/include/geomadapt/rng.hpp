#pragma once

#include <array>
#include <cstdint>

namespace geomadapt {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// A stream is identified by (seed, stream id); draws are addressed by a
/// 64-bit block counter, so the sequence is a pure function of those three
/// values and does not depend on platform or standard-library version.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Block generate(Block counter, Key key);

  Philox4x32(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();
  /// Uniform in (0, 1); never returns exactly 0 or 1.
  double uniform();
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_index_{0};
  Block buffer_{};
  int used_{4};
  bool has_spare_normal_{false};
  double spare_normal_{0.0};
};

}  // namespace geomadapt
