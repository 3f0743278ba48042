#include "lattice/core/rng.hpp"

#include <array>

#include "lattice/core/error.hpp"

namespace lattice {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

namespace {

std::mt19937_64 seeded_engine(std::uint64_t key) {
  const std::uint64_t a = mix64(key);
  const std::uint64_t b = mix64(a ^ 0xD1B54A32D192ED03ULL);
  std::array<std::uint32_t, 4> words{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                                     static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t key) : key_(key), engine_(seeded_engine(key)) {}

RandomStream RandomStream::split(std::uint64_t tag) const {
  return RandomStream(mix64(key_ ^ mix64(tag + 0x632BE59BD9B4E019ULL)));
}

double RandomStream::uniform_open() {
  double u = 0.0;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

std::size_t RandomStream::index(std::size_t n) {
  if (n == 0) throw InvalidArgument("RandomStream::index: n must be positive");
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

RandomStream derive_chain_stream(std::uint64_t master_seed, std::uint64_t chain_index) {
  return RandomStream(mix64(mix64(master_seed) + mix64(chain_index ^ 0xA0761D6478BD642FULL)));
}

}  // namespace lattice
