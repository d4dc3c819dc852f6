#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace vacant {

// Deterministic 64-bit stream keyed by (seed, stream) and an optional
// substream path. Distinct keys give independently seeded Mersenne Twisters.
class RandomSource {
 public:
  RandomSource(std::uint64_t seed, std::uint64_t stream) : key_{seed, stream} { reseed(); }

  std::uint64_t next() { return engine_(); }

  bool next_bit() {
    if (bits_left_ == 0) {
      bit_buffer_ = engine_();
      bits_left_ = 64;
    }
    const bool b = bit_buffer_ & 1u;
    bit_buffer_ >>= 1;
    --bits_left_;
    return b;
  }

  // Uniform in [0, bound) by multiply-shift with rejection.
  std::uint64_t below(std::uint64_t bound) {
    unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(engine_()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  RandomSource substream(std::uint64_t i) const {
    RandomSource child(*this, i);
    return child;
  }

 private:
  RandomSource(const RandomSource& parent, std::uint64_t i) : key_(parent.key_) {
    key_.push_back(i);
    reseed();
  }

  void reseed() {
    std::vector<std::uint32_t> words;
    words.reserve(2 * key_.size() + 1);
    words.push_back(static_cast<std::uint32_t>(key_.size()));
    for (std::uint64_t k : key_) {
      words.push_back(static_cast<std::uint32_t>(k));
      words.push_back(static_cast<std::uint32_t>(k >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
    bits_left_ = 0;
  }

  std::vector<std::uint64_t> key_;
  std::mt19937_64 engine_;
  std::uint64_t bit_buffer_ = 0;
  int bits_left_ = 0;
};

}  // namespace vacant
