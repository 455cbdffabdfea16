#pragma once

// Counter-based random streams addressed by (master seed, path index, substream).
//
// Philox4x32-10 maps a 128-bit counter and a 64-bit key to four 32-bit words.
// The key is the master seed; the counter packs the block index, the path index
// and the substream tag, so every (path, substream) pair owns a disjoint
// counter range and draws never depend on scheduling order.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string_view>

namespace jumpsde {

namespace philox {

using Block = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline constexpr std::uint32_t kMul0 = 0xD2511F53u;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

constexpr Block round(const Block& ctr, const Key& key) {
  const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
  const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
  return {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
          static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
}

/// Ten-round Philox4x32 bijection.
constexpr Block generate(Block ctr, Key key) {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    ctr = round(ctr, key);
  }
  return ctr;
}

}  // namespace philox

enum class Substream : std::uint8_t {
  brownian = 1,
  substitute = 2,
  jump_times = 3,
  jump_sizes = 4,
  thinning = 5,
};

constexpr std::string_view to_string(Substream s) {
  switch (s) {
    case Substream::brownian: return "brownian";
    case Substream::substitute: return "substitute";
    case Substream::jump_times: return "jump_times";
    case Substream::jump_sizes: return "jump_sizes";
    case Substream::thinning: return "thinning";
  }
  return "unknown";
}

struct SeedStream {
  std::uint64_t master_seed = 0;
  std::uint64_t path_index = 0;  // only the low 56 bits address the counter
  Substream tag = Substream::brownian;
};

/// Sequential reader over one (path, substream) counter range.
class RandomStream {
 public:
  explicit RandomStream(const SeedStream& seed)
      : key_{static_cast<std::uint32_t>(seed.master_seed),
             static_cast<std::uint32_t>(seed.master_seed >> 32)},
        path_lo_(static_cast<std::uint32_t>(seed.path_index)),
        path_hi_tag_((static_cast<std::uint32_t>(seed.tag) << 24) |
                     (static_cast<std::uint32_t>(seed.path_index >> 32) & 0x00FFFFFFu)) {}

  std::uint64_t next_u64() {
    if (cursor_ == 2) refill();
    return words_[cursor_++];
  }

  /// Uniform on (0, 1] with 53 random bits; never returns 0 so log(u) is finite.
  double uniform() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  void fill_normal(std::span<double> out, double scale = 1.0) {
    for (double& v : out) v = scale * normal();
  }

  double exponential() { return -std::log(uniform()); }

  std::uint64_t blocks_consumed() const { return block_; }

 private:
  void refill() {
    const philox::Block ctr{static_cast<std::uint32_t>(block_),
                            static_cast<std::uint32_t>(block_ >> 32), path_lo_, path_hi_tag_};
    const auto out = philox::generate(ctr, key_);
    words_[0] = (std::uint64_t{out[1]} << 32) | out[0];
    words_[1] = (std::uint64_t{out[3]} << 32) | out[2];
    cursor_ = 0;
    ++block_;
  }

  philox::Key key_;
  std::uint32_t path_lo_;
  std::uint32_t path_hi_tag_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> words_{};
  int cursor_ = 2;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace jumpsde
