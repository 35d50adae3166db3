#ifndef PACSIM_OPTIM_HPP
#define PACSIM_OPTIM_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "pacsim/rng.hpp"

namespace pacsim {

/// Point on a product of probability simplices, one block per factor.
using SimplexPoint = std::vector<Eigen::VectorXd>;

/// Objective evaluated at a simplex product point; minimized.
using SimplexObjective = std::function<double(const SimplexPoint&)>;

struct PatternSearchOptions {
  double step_init = 0.25;
  double step_min = 1e-10;
  int max_iters = 4000;
  int starts = 32;          // corners + barycenter + seeded random fills
  int patience = 10;        // stop multistart after this many stale starts
  double improve_tol = 1e-9;
  std::uint64_t seed = 0;
  std::vector<SimplexPoint> extra_starts;  // e.g. warm starts from a sweep
};

struct SimplexResult {
  SimplexPoint point;
  double value = 1e308;
  int evaluations = 0;
};

/// Deterministic multistart pattern search. Moves transfer mass between
/// two coordinates of one block, so every iterate stays exactly on the
/// simplex; the step halves when no move improves.
SimplexResult minimize_on_simplices(const SimplexObjective& f,
                                    const std::vector<int>& block_dims,
                                    const PatternSearchOptions& opts = {});

/// Golden-section minimization of a unimodal scalar function on [lo, hi].
double golden_minimize(const std::function<double(double)>& f, double lo,
                       double hi, double tol = 1e-10, double* arg = nullptr);

}  // namespace pacsim

#endif  // PACSIM_OPTIM_HPP
