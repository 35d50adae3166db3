#include "pacsim/region.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pacsim {

namespace {

Eigen::MatrixXd u_given_z_from_point(const SimplexPoint& pt, int zs,
                                     int us) {
  Eigen::MatrixXd m(zs, us);
  for (int z = 0; z < zs; ++z) m.row(z) = pt[z];
  return m;
}

/// (I(Z;U), H(K|U)) from the factored auxiliary joint.
std::pair<double, double> coords(const AuxJoint& p) {
  double i_zu = 0.0;
  const Eigen::VectorXd p_z = p.marginal_z();
  for (int u = 0; u < p.u_size(); ++u) {
    if (p.q_u[u] == 0.0) continue;
    for (int z = 0; z < p.z_size(); ++z) {
      const double m = p.q_u[u] * p.q_z_given_u(u, z);
      if (m > 0.0) i_zu += m * std::log(p.q_z_given_u(u, z) / p_z[z]);
    }
  }
  double h_ku = 0.0;
  const Eigen::MatrixXd k_u = p.k_given_u();
  for (int u = 0; u < p.u_size(); ++u)
    for (int k = 0; k < p.k_size(); ++k)
      h_ku -= p.q_u[u] * xlogx(k_u(u, k));
  return {std::max(0.0, i_zu), h_ku};
}

}  // namespace

std::pair<double, double> region_point(const KeyChannelModel& model,
                                       const Eigen::MatrixXd& u_given_z) {
  if (u_given_z.cols() > model.z_size() + 1)
    throw std::invalid_argument("witness needs |U| <= |Z|+1");
  return coords(aux_from_u_given_z(model, u_given_z));
}

RegionBoundary region_boundary(const KeyChannelModel& model,
                               const RegionOptions& opts) {
  const int zs = model.z_size(), ks = model.k_size();
  const int us = zs + 1;
  RegionBoundary b;
  b.h_z = 0.0;
  for (int z = 0; z < zs; ++z) b.h_z -= xlogx(model.p_z[z]);
  b.h_k = entropy(model.p_K);
  b.h_k_given_z = 0.0;
  for (int z = 0; z < zs; ++z)
    for (int k = 0; k < ks; ++k)
      b.h_k_given_z -= model.p_z[z] * xlogx(model.p_k_given_z(z, k));

  // Guaranteed corners: U constant and U = Z.
  Eigen::MatrixXd constant = Eigen::MatrixXd::Zero(zs, us);
  constant.col(0).setOnes();
  Eigen::MatrixXd identity = Eigen::MatrixXd::Zero(zs, us);
  for (int z = 0; z < zs; ++z) identity(z, z) = 1.0;
  std::vector<RegionPoint> raw;
  for (const Eigen::MatrixXd& w : {constant, identity}) {
    const auto [ra, r] = region_point(model, w);
    raw.push_back({ra, r, w});
  }

  const std::vector<int> dims(zs, us);
  // Descend from the U = Z corner, warm-starting each level with the
  // previous solution so the trace follows the frontier.
  SimplexPoint warm;
  for (int z = 0; z < zs; ++z) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(us);
    e[z] = 1.0;
    warm.push_back(std::move(e));
  }
  const auto solve = [&](double target, PatternSearchOptions popts) {
    const auto obj = [&, target](const SimplexPoint& pt) {
      const AuxJoint p =
          aux_from_u_given_z(model, u_given_z_from_point(pt, zs, us));
      const auto [i_zu, h_ku] = coords(p);
      // Smooth quadratic penalty: the minimizer sits at a slightly
      // shifted constraint level, but the recorded point is its own
      // achieved (I, H) pair, so it still lies on the frontier. A kinked
      // exact penalty stalls the coordinate moves in the valley.
      const double excess = std::max(0.0, i_zu - target);
      return h_ku + 200.0 * excess * excess;
    };
    return minimize_on_simplices(obj, dims, popts);
  };

  std::vector<SimplexResult> sols(opts.sweep);
  for (int s = opts.sweep - 1; s >= 0; --s) {
    const double target = b.h_z * s / (opts.sweep - 1.0);
    PatternSearchOptions popts = opts.inner;
    popts.extra_starts.push_back(warm);
    sols[s] = solve(target, popts);
    warm = sols[s].point;
  }
  // Polish passes: re-solve each level seeded with its neighbors, which
  // irons out levels that fell into a worse basin than either neighbor.
  for (int round = 0; round < 2; ++round)
    for (int s = 0; s < opts.sweep; ++s) {
      const double target = b.h_z * s / (opts.sweep - 1.0);
      PatternSearchOptions popts = opts.inner;
      popts.starts = 0;
      popts.extra_starts.push_back(sols[s].point);
      if (s > 0) popts.extra_starts.push_back(sols[s - 1].point);
      if (s + 1 < opts.sweep)
        popts.extra_starts.push_back(sols[s + 1].point);
      const SimplexResult res = solve(target, popts);
      if (res.value < sols[s].value) sols[s] = res;
    }
  for (const SimplexResult& res : sols) {
    const Eigen::MatrixXd w = u_given_z_from_point(res.point, zs, us);
    const auto [ra, r] = region_point(model, w);
    raw.push_back({ra, r, w});
  }

  // Lower-left Pareto filter.
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& c) {
    return a.r_a < c.r_a || (a.r_a == c.r_a && a.r < c.r);
  });
  for (const RegionPoint& p : raw) {
    if (!b.points.empty() && p.r >= b.points.back().r - 1e-12) continue;
    b.points.push_back(p);
  }
  // Witness consistency.
  for (const RegionPoint& p : b.points) {
    const auto [ra, r] = region_point(model, p.u_given_z);
    if (std::abs(ra - p.r_a) > opts.witness_tol ||
        std::abs(r - p.r) > opts.witness_tol)
      throw std::logic_error("frontier witness fails to reproduce");
  }
  return b;
}

double frontier_r(const RegionBoundary& b, double R_A) {
  if (b.points.empty()) throw std::invalid_argument("empty boundary");
  if (R_A < 0.0) return kInfNats;
  // Lower convex hull of the frontier points in (r_a, r).
  std::vector<std::pair<double, double>> hull;
  for (const RegionPoint& p : b.points) {
    while (hull.size() >= 2) {
      const auto& [x1, y1] = hull[hull.size() - 2];
      const auto& [x2, y2] = hull.back();
      // drop the middle point when it lies above the chord
      if ((y2 - y1) * (p.r_a - x1) >= (p.r - y1) * (x2 - x1) - 1e-15)
        hull.pop_back();
      else
        break;
    }
    hull.emplace_back(p.r_a, p.r);
  }
  if (R_A >= hull.back().first) return hull.back().second;
  if (R_A <= hull.front().first) return hull.front().second;
  for (std::size_t i = 1; i < hull.size(); ++i) {
    if (R_A > hull[i].first) continue;
    const auto& [x1, y1] = hull[i - 1];
    const auto& [x2, y2] = hull[i];
    return y1 + (y2 - y1) * (R_A - x1) / (x2 - x1);
  }
  return hull.back().second;
}

RegionSide membership(double R_A, double R, const RegionBoundary& b,
                      double tol) {
  if (R_A < 0.0 || R < 0.0) return RegionSide::Outside;
  const double f = frontier_r(b, R_A);
  if (R >= f + tol) return RegionSide::Inside;
  if (R <= f - tol) return RegionSide::Outside;
  return RegionSide::Boundary;
}

Property1Report property1_check(const KeyChannelModel& model,
                                const RegionBoundary& b, double tol) {
  Property1Report rep{};
  rep.h_k = b.h_k;
  rep.min_sum = kInfNats;
  for (const RegionPoint& p : b.points) {
    if (p.r_a + p.r < rep.min_sum) {
      rep.min_sum = p.r_a + p.r;
      rep.argmin_r_a = p.r_a;
    }
  }
  rep.worst_convexity = 0.0;
  for (std::size_t i = 1; i + 1 < b.points.size(); ++i) {
    const RegionPoint& a = b.points[i - 1];
    const RegionPoint& m = b.points[i];
    const RegionPoint& c = b.points[i + 1];
    const double chord =
        a.r + (c.r - a.r) * (m.r_a - a.r_a) / (c.r_a - a.r_a);
    rep.worst_convexity = std::max(rep.worst_convexity, m.r - chord);
  }
  rep.pass = std::abs(rep.min_sum - rep.h_k) <= tol &&
             rep.worst_convexity <= tol;
  (void)model;
  return rep;
}

bool InnerBoundRegion::contains(double R_A, double R) const {
  if (R < h_x - tol) return false;
  return membership(R_A, R, *boundary, tol) != RegionSide::Inside;
}

InnerBoundRegion inner_bound_region(const Distribution& p_X,
                                    const RegionBoundary& b, double tol) {
  return {entropy(p_X), &b, tol};
}

std::vector<DRegionPoint> d_region_points(
    const Distribution& p_X, const FSolver& f_solver,
    const InnerBoundRegion& region,
    const std::vector<std::pair<double, double>>& grid) {
  std::vector<DRegionPoint> out;
  for (const auto& [r_a, r] : grid) {
    if (!region.contains(r_a, r)) continue;
    const double e = error_exponent_E(r, p_X);
    const double f = f_solver.evaluate(r_a, r).value;
    out.push_back({r_a, r, e, f});
  }
  return out;
}

}  // namespace pacsim
