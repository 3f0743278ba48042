#pragma once

#include <cstddef>
#include <cstdint>

namespace lattice {

enum class RetainPolicy { all_post_burnin, final_only };

struct ChainConfig {
  std::size_t n_chains = 1;
  std::size_t n_iters = 1000;
  std::size_t burn_in = 0;
  std::uint64_t master_seed = 0;
  RetainPolicy retain = RetainPolicy::final_only;
  /// Worker threads for parallel chains; 0 picks the hardware concurrency.
  /// Results never depend on this value.
  std::size_t threads = 0;

  void validate() const;
  std::size_t retained_per_chain() const noexcept {
    return retain == RetainPolicy::final_only ? 1 : n_iters - burn_in;
  }
};

}  // namespace lattice
