#pragma once

#include <cstdint>
#include <span>

namespace ilr {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for an independent sub-stream, e.g. (master_seed, trial_index).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Counter-based generator: the i-th draw depends only on (seed, i), so any
/// position of the stream can be computed without replaying the prefix.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) noexcept : key_(mix64(seed)) {}

  std::uint64_t at(std::uint64_t counter) const noexcept {
    return mix64(key_ ^ mix64(counter));
  }

  std::uint64_t next_u64() noexcept { return at(counter_++); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return to_unit(next_u64()); }
  double uniform_at(std::uint64_t counter) const noexcept { return to_unit(at(counter)); }

  /// Uniform integer in [0, n). Uses Lemire's multiply-shift; the residual bias
  /// is below 2^-40 for every n this library uses.
  std::uint64_t below(std::uint64_t n) noexcept {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  std::uint64_t counter() const noexcept { return counter_; }
  void seek(std::uint64_t counter) noexcept { counter_ = counter; }

  static constexpr double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Inverse-CDF draw from a probability vector. Falls back to the last index
/// with positive mass when rounding leaves u above the cumulative sum.
inline std::size_t sample_index(std::span<const double> probs, double u) noexcept {
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

}  // namespace ilr
