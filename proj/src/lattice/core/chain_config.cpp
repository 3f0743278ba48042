#include "lattice/core/chain_config.hpp"

#include "lattice/core/error.hpp"

namespace lattice {

void ChainConfig::validate() const {
  if (n_chains == 0) throw InvalidArgument("chain config: n_chains must be positive");
  if (n_iters == 0) throw InvalidArgument("chain config: n_iters must be positive");
  if (burn_in >= n_iters) throw InvalidArgument("chain config: burn_in must be smaller than n_iters");
}

}  // namespace lattice
