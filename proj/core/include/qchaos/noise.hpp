#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace qchaos {

/// Philox4x32-10 block: maps (counter, key) to four independent 32-bit words.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Replayable stream of Wiener increments dW ~ Normal(0, dt).
///
/// Increment i is a pure function of (seed, stream, i), so a path holds no
/// generator state beyond its cursor; rewinding or replaying from any index
/// is free, and ensemble member i derives its path from (base_seed, i)
/// without coordination. Optional audit storage keeps every drawn value.
class NoisePath {
 public:
  NoisePath(std::uint64_t seed, double dt, std::uint64_t stream = 0);

  /// Path for ensemble member `index` of a run seeded with base_seed.
  static NoisePath for_member(std::uint64_t base_seed, std::uint64_t index, double dt) {
    return NoisePath(base_seed, dt, index);
  }

  double next_dw();
  /// Increment at absolute index i; does not move the cursor.
  double dw_at(std::uint64_t i) const;
  /// Standard normal variate at absolute index i.
  double normal_at(std::uint64_t i) const;

  void rewind() { cursor_ = 0; }
  void seek(std::uint64_t i) { cursor_ = i; }

  std::uint64_t cursor() const { return cursor_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  double dt() const { return dt_; }

  void set_audit(bool enabled) { audit_ = enabled; }
  bool audit_enabled() const { return audit_; }
  /// (index, dW) pairs drawn through next_dw while auditing was enabled.
  const std::vector<std::pair<std::uint64_t, double>>& audit_log() const { return log_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  double dt_;
  double sqrt_dt_;
  std::uint64_t cursor_ = 0;
  bool audit_ = false;
  std::vector<std::pair<std::uint64_t, double>> log_;
};

/// One {"i": int, "dw": float} object per line.
void write_noise_ndjson(std::ostream& out,
                        std::span<const std::pair<std::uint64_t, double>> increments);

}  // namespace qchaos
