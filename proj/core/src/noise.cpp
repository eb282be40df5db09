#include "qchaos/noise.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace qchaos {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(prod >> 32);
  lo = static_cast<std::uint32_t>(prod);
}

// 53-bit uniform in (0, 1].
inline double to_unit_open_left(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

inline double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

NoisePath::NoisePath(std::uint64_t seed, double dt, std::uint64_t stream)
    : seed_(seed), stream_(stream), dt_(dt), sqrt_dt_(std::sqrt(dt)) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("NoisePath: dt must be > 0");
}

double NoisePath::normal_at(std::uint64_t i) const {
  // One Philox block yields two 64-bit words -> one Box-Muller pair, used for
  // increments 2b and 2b+1.
  const std::uint64_t block = i >> 1;
  const auto out = philox4x32(
      {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
       static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
      {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
  const std::uint64_t w0 = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  const std::uint64_t w1 = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
  const double radius = std::sqrt(-2.0 * std::log(to_unit_open_left(w0)));
  const double angle = 2.0 * std::numbers::pi * to_unit(w1);
  return (i & 1u) ? radius * std::sin(angle) : radius * std::cos(angle);
}

double NoisePath::dw_at(std::uint64_t i) const { return sqrt_dt_ * normal_at(i); }

double NoisePath::next_dw() {
  const double dw = dw_at(cursor_);
  if (audit_) log_.emplace_back(cursor_, dw);
  ++cursor_;
  return dw;
}

void write_noise_ndjson(std::ostream& out,
                        std::span<const std::pair<std::uint64_t, double>> increments) {
  for (const auto& [i, dw] : increments) {
    out << nlohmann::json{{"i", i}, {"dw", dw}}.dump() << '\n';
  }
}

}  // namespace qchaos
