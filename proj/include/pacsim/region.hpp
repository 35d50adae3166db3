#ifndef PACSIM_REGION_HPP
#define PACSIM_REGION_HPP

#include <vector>

#include "pacsim/exponents.hpp"

namespace pacsim {

struct RegionPoint {
  double r_a, r;               // (I(Z;U), H(K|U)) of the witness
  Eigen::MatrixXd u_given_z;   // |Z| x |U| witness rows
};

/// Lower-left frontier of the union region: points sorted by r_a with r
/// non-increasing, each reproducing its coordinates from its witness.
struct RegionBoundary {
  std::vector<RegionPoint> points;
  double h_k, h_z, h_k_given_z;
};

/// (I(Z;U), H(K|U)) for an explicit p_{U|Z} witness.
std::pair<double, double> region_point(const KeyChannelModel& model,
                                       const Eigen::MatrixXd& u_given_z);

struct RegionOptions {
  int sweep = 33;  // constraint levels across [0, H(Z)]
  double witness_tol = 1e-8;
  PatternSearchOptions inner = ExponentOptions::default_inner_options();
};

/// Constrained sweep: minimize H(K|U) subject to I(Z;U) <= r with
/// |U| = |Z|+1; the (0, H(K)) and (H(Z), H(K|Z)) corners are always
/// included.
RegionBoundary region_boundary(const KeyChannelModel& model,
                               const RegionOptions& opts = {});

enum class RegionSide { Inside, Outside, Boundary };

/// Minimum achievable R at abscissa R_A (convex interpolation of the
/// frontier; flat beyond the last point).
double frontier_r(const RegionBoundary& b, double R_A);

/// Decision with a tolerance band (default 1e-3 nats) around the
/// frontier.
RegionSide membership(double R_A, double R, const RegionBoundary& b,
                      double tol = 1e-3);

struct Property1Report {
  double min_sum;      // min over frontier of R_A + R
  double h_k;          // target value
  double argmin_r_a;   // abscissa of the minimizer
  double worst_convexity;  // max chord violation over frontier triples
  bool pass;
};

Property1Report property1_check(const KeyChannelModel& model,
                                const RegionBoundary& b, double tol = 1e-3);

/// Achievable inner bound: R >= H(X) intersected with the closure of the
/// complement of the union region.
struct InnerBoundRegion {
  double h_x;
  const RegionBoundary* boundary;
  double tol;

  bool contains(double R_A, double R) const;
};

InnerBoundRegion inner_bound_region(const Distribution& p_X,
                                    const RegionBoundary& b,
                                    double tol = 1e-3);

struct DRegionPoint {
  double r_a, r, E, F;
};

/// Exponent-augmented tuples over a grid of inner-bound members.
std::vector<DRegionPoint> d_region_points(
    const Distribution& p_X, const FSolver& f_solver,
    const InnerBoundRegion& region,
    const std::vector<std::pair<double, double>>& grid);

}  // namespace pacsim

#endif  // PACSIM_REGION_HPP
