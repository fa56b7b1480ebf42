#pragma once

#include <cstddef>
#include <vector>

#include "ammhl/hedging.hpp"
#include "ammhl/market_dynamics.hpp"

namespace ammhl {

struct GateauxStats {
  std::vector<std::size_t> index;  // grid index of each checkpoint
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> se;

  // largest |mean| / se over checkpoints (se = 0 counts as exact zero)
  double max_abs_z() const;
};

// Directional derivative of the stage-two objective at the given strategy,
// evaluated pathwise. Conditional expectations of functions of F use closed
// forms; terms in nu, I, Q use the realised future of each path, so only the
// cross-path average is meaningful. Zero or constant signals only.
GateauxStats gateaux_residual(const HedgePath& hedge, const PathBundle& paths, double kappa,
                              const HedgeParams& hp, const MarketModel& model,
                              std::size_t n_checkpoints);

}  // namespace ammhl
