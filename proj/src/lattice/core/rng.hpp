#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace lattice {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// A reproducible random stream identified by a 64-bit key.
///
/// Streams are never reseeded sequentially. Child streams come from `split`,
/// which hashes the parent key with a tag, so a stream's draws depend only on
/// the path of keys that produced it and never on how many other streams
/// exist or which thread consumes them.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key);

  std::uint64_t key() const noexcept { return key_; }

  /// Independent child stream. Depends on (key, tag) only, not on how much of
  /// this stream has been consumed.
  RandomStream split(std::uint64_t tag) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  double normal() { return normal_(engine_); }
  double exponential() { return exponential_(engine_); }
  /// Uniform integer in [0, n). n must be positive.
  std::size_t index(std::size_t n);

  std::mt19937_64& engine() noexcept { return engine_; }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::exponential_distribution<double> exponential_{1.0};
};

/// Per-chain stream from a master seed. Same (seed, index) gives the same
/// stream in every run; distinct indices give distinct streams.
RandomStream derive_chain_stream(std::uint64_t master_seed, std::uint64_t chain_index);

}  // namespace lattice
