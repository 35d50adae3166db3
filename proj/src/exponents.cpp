#include "pacsim/exponents.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pacsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPenalty = 1e100;

/// ln(a/b) with the 0-mass conventions used by the weight tables.
double log_ratio(double a, double b) {
  if (a == 0.0) return b == 0.0 ? 0.0 : -kInf;
  if (b == 0.0) return kInf;
  return std::log(a / b);
}

Eigen::MatrixXd u_given_z_from_point(const SimplexPoint& pt, int z_size,
                                     int u_size) {
  Eigen::MatrixXd m(z_size, u_size);
  for (int z = 0; z < z_size; ++z) m.row(z) = pt[z];
  return m;
}

}  // namespace

KeyChannelModel::KeyChannelModel(Distribution key, Channel w)
    : p_K(std::move(key)), W(std::move(w)) {
  if (W.input_size() != p_K.size())
    throw std::invalid_argument("channel input must match key alphabet");
  const int zs = W.output_size(), ks = p_K.size();
  p_z = Eigen::VectorXd::Zero(zs);
  for (int k = 0; k < ks; ++k)
    for (int z = 0; z < zs; ++z) p_z[z] += p_K(k) * W(z, k);
  p_k_given_z = Eigen::MatrixXd::Constant(zs, ks, 1.0 / ks);
  for (int z = 0; z < zs; ++z) {
    if (p_z[z] == 0.0) continue;
    for (int k = 0; k < ks; ++k)
      p_k_given_z(z, k) = p_K(k) * W(z, k) / p_z[z];
  }
}

AuxJoint::AuxJoint(Eigen::VectorXd u, Eigen::MatrixXd zu, Eigen::MatrixXd kz)
    : q_u(std::move(u)),
      q_z_given_u(std::move(zu)),
      q_k_given_z(std::move(kz)) {
  if (q_z_given_u.rows() != q_u.size() ||
      q_k_given_z.rows() != q_z_given_u.cols())
    throw std::invalid_argument("aux joint factor shape mismatch");
  Distribution{q_u};  // validation only
  for (int u2 = 0; u2 < q_z_given_u.rows(); ++u2)
    Distribution{q_z_given_u.row(u2)};
  for (int z = 0; z < q_k_given_z.rows(); ++z)
    Distribution{q_k_given_z.row(z)};
}

Eigen::VectorXd AuxJoint::marginal_z() const {
  return q_z_given_u.transpose() * q_u;
}

Eigen::MatrixXd AuxJoint::k_given_u() const {
  return q_z_given_u * q_k_given_z;
}

JointDistribution AuxJoint::joint() const {
  const int us = u_size(), zs = z_size(), ks = k_size();
  Eigen::VectorXd table(us * zs * ks);
  for (int u = 0; u < us; ++u)
    for (int z = 0; z < zs; ++z)
      for (int k = 0; k < ks; ++k)
        table[(u * zs + z) * ks + k] = mass(u, z, k);
  return JointDistribution({us, zs, ks}, std::move(table));
}

AuxJoint aux_from_joint(const JointDistribution& j, double tol) {
  if (j.axes() != 3) throw std::invalid_argument("need a (U,Z,K) joint");
  const int us = j.shape()[0], zs = j.shape()[1], ks = j.shape()[2];
  Eigen::VectorXd q_u = Eigen::VectorXd::Zero(us);
  Eigen::MatrixXd uz = Eigen::MatrixXd::Zero(us, zs);
  Eigen::MatrixXd zk = Eigen::MatrixXd::Zero(zs, ks);
  Eigen::VectorXd q_z = Eigen::VectorXd::Zero(zs);
  for (int u = 0; u < us; ++u)
    for (int z = 0; z < zs; ++z)
      for (int k = 0; k < ks; ++k) {
        const double m = j.at_flat((u * zs + z) * ks + k);
        q_u[u] += m;
        uz(u, z) += m;
        zk(z, k) += m;
        q_z[z] += m;
      }
  // Markov check: q_{K|ZU} must not depend on u.
  for (int u = 0; u < us; ++u)
    for (int z = 0; z < zs; ++z) {
      if (uz(u, z) == 0.0) continue;
      for (int k = 0; k < ks; ++k) {
        const double cond_uz = j.at_flat((u * zs + z) * ks + k) / uz(u, z);
        const double cond_z = q_z[z] > 0.0 ? zk(z, k) / q_z[z] : 0.0;
        if (std::abs(cond_uz - cond_z) > tol)
          throw std::invalid_argument("joint violates U <-> Z <-> K");
      }
    }
  Eigen::MatrixXd z_given_u = Eigen::MatrixXd::Constant(us, zs, 1.0 / zs);
  for (int u = 0; u < us; ++u)
    if (q_u[u] > 0.0) z_given_u.row(u) = uz.row(u) / q_u[u];
  Eigen::MatrixXd k_given_z = Eigen::MatrixXd::Constant(zs, ks, 1.0 / ks);
  for (int z = 0; z < zs; ++z)
    if (q_z[z] > 0.0) k_given_z.row(z) = zk.row(z) / q_z[z];
  return AuxJoint(std::move(q_u), std::move(z_given_u),
                  std::move(k_given_z));
}

AuxJoint aux_from_u_given_z(const KeyChannelModel& model,
                            const Eigen::MatrixXd& u_given_z) {
  const int zs = model.z_size();
  if (u_given_z.rows() != zs)
    throw std::invalid_argument("p_{U|Z} must have one row per z");
  const int us = static_cast<int>(u_given_z.cols());
  Eigen::VectorXd q_u = Eigen::VectorXd::Zero(us);
  for (int z = 0; z < zs; ++z) q_u += model.p_z[z] * u_given_z.row(z);
  Eigen::MatrixXd z_given_u = Eigen::MatrixXd::Constant(us, zs, 1.0 / zs);
  for (int u = 0; u < us; ++u) {
    if (q_u[u] == 0.0) continue;
    for (int z = 0; z < zs; ++z)
      z_given_u(u, z) = model.p_z[z] * u_given_z(z, u) / q_u[u];
    // guard against rounding in the row sum
    z_given_u.row(u) /= z_given_u.row(u).sum();
  }
  return AuxJoint(std::move(q_u), std::move(z_given_u), model.p_k_given_z);
}

double error_exponent_E(double R, const Distribution& p_X,
                        const PatternSearchOptions& opts) {
  if (R < 0.0) throw std::invalid_argument("rate must be nonnegative");
  const auto obj = [&](const SimplexPoint& pt) {
    const Eigen::VectorXd& p = pt[0];
    double h = 0.0, d = 0.0;
    for (int i = 0; i < p.size(); ++i) {
      h -= xlogx(p[i]);
      if (p[i] > 0.0) {
        if (p_X(i) == 0.0) return kPenalty;
        d += p[i] * std::log(p[i] / p_X(i));
      }
    }
    return std::max(0.0, R - h) + d;
  };
  const SimplexResult r = minimize_on_simplices(obj, {p_X.size()}, opts);
  return std::max(0.0, r.value);
}

Eigen::VectorXd omega_weight(double mu, double alpha, const AuxJoint& q,
                             const Eigen::VectorXd& p_z) {
  const int us = q.u_size(), zs = q.z_size(), ks = q.k_size();
  if (p_z.size() != zs)
    throw std::invalid_argument("p_Z alphabet mismatch");
  const Eigen::VectorXd q_z = q.marginal_z();
  const Eigen::MatrixXd k_u = q.k_given_u();
  Eigen::VectorXd w(us * zs * ks);
  const double abar = 1.0 - alpha, mbar = 1.0 - mu;
  for (int u = 0; u < us; ++u)
    for (int z = 0; z < zs; ++z)
      for (int k = 0; k < ks; ++k) {
        double val = 0.0;
        if (abar != 0.0) val += abar * log_ratio(q_z[z], p_z[z]);
        if (alpha != 0.0) {
          double inner = 0.0;
          if (mu != 0.0)
            inner += mu * log_ratio(q.q_z_given_u(u, z), p_z[z]);
          if (mbar != 0.0) inner += mbar * log_ratio(1.0, k_u(u, k));
          val += alpha * inner;
        }
        w[(u * zs + z) * ks + k] = val;
      }
  return w;
}

double omega_capital(double mu, double alpha, const AuxJoint& q,
                     const Eigen::VectorXd& p_z) {
  const Eigen::VectorXd w = omega_weight(mu, alpha, q, p_z);
  const int zs = q.z_size(), ks = q.k_size();
  double e = 0.0;
  for (int u = 0; u < q.u_size(); ++u)
    for (int z = 0; z < zs; ++z)
      for (int k = 0; k < ks; ++k) {
        const double m = q.mass(u, z, k);
        if (m == 0.0) continue;
        if (p_z[z] == 0.0)
          throw std::invalid_argument("q charges a p_Z-null symbol");
        e += m * std::exp(-w[(u * zs + z) * ks + k]);
      }
  const double v = -std::log(e);
  return v == 0.0 ? 0.0 : v;  // avoid -0 from e == 1
}

ExponentResult omega_min(double mu, double alpha,
                         const KeyChannelModel& model,
                         const PatternSearchOptions& opts) {
  const int zs = model.z_size();
  const int us = zs;  // |U| <= |Z| suffices for the Q-family
  std::vector<int> dims{us};
  for (int u = 0; u < us; ++u) dims.push_back(zs);
  const auto obj = [&](const SimplexPoint& pt) {
    Eigen::MatrixXd z_given_u(us, zs);
    for (int u = 0; u < us; ++u) z_given_u.row(u) = pt[1 + u];
    for (int z = 0; z < zs; ++z)
      if (model.p_z[z] == 0.0)
        for (int u = 0; u < us; ++u)
          if (pt[0][u] * z_given_u(u, z) > 0.0) return kPenalty;
    const AuxJoint q(pt[0], std::move(z_given_u), model.p_k_given_z);
    return omega_capital(mu, alpha, q, model.p_z);
  };
  const SimplexResult r = minimize_on_simplices(obj, dims, opts);
  return {r.value, mu, alpha, r.point, r.evaluations};
}

Eigen::VectorXd omega_tilde_weight(double mu, const AuxJoint& p) {
  const int us = p.u_size(), zs = p.z_size(), ks = p.k_size();
  const Eigen::VectorXd p_z = p.marginal_z();
  const Eigen::MatrixXd k_u = p.k_given_u();
  Eigen::VectorXd w(us * zs * ks);
  const double mbar = 1.0 - mu;
  for (int u = 0; u < us; ++u)
    for (int z = 0; z < zs; ++z)
      for (int k = 0; k < ks; ++k) {
        double val = 0.0;
        if (mu != 0.0) val += mu * log_ratio(p.q_z_given_u(u, z), p_z[z]);
        if (mbar != 0.0) val += mbar * log_ratio(1.0, k_u(u, k));
        w[(u * zs + z) * ks + k] = val;
      }
  return w;
}

double omega_tilde_capital(double mu, double lambda, const AuxJoint& p) {
  if (lambda == 0.0) return 0.0;  // -ln E[1], exactly
  const Eigen::VectorXd w = omega_tilde_weight(mu, p);
  const int zs = p.z_size(), ks = p.k_size();
  double e = 0.0;
  for (int u = 0; u < p.u_size(); ++u)
    for (int z = 0; z < zs; ++z)
      for (int k = 0; k < ks; ++k) {
        const double m = p.mass(u, z, k);
        if (m == 0.0) continue;
        e += m * std::exp(-lambda * w[(u * zs + z) * ks + k]);
      }
  const double v = -std::log(e);
  return v == 0.0 ? 0.0 : v;
}

JointDistribution tilted_law(double mu, double lambda, const AuxJoint& p) {
  const Eigen::VectorXd w = omega_tilde_weight(mu, p);
  const int us = p.u_size(), zs = p.z_size(), ks = p.k_size();
  Eigen::VectorXd table(us * zs * ks);
  for (int u = 0; u < us; ++u)
    for (int z = 0; z < zs; ++z)
      for (int k = 0; k < ks; ++k) {
        const int i = (u * zs + z) * ks + k;
        const double m = p.mass(u, z, k);
        table[i] = m == 0.0 ? 0.0 : m * std::exp(-lambda * w[i]);
      }
  return JointDistribution::from_unnormalized({us, zs, ks},
                                              std::move(table));
}

TildeFamily tilde_family(double mu, double lambda, const AuxJoint& p) {
  return {omega_tilde_weight(mu, p), omega_tilde_capital(mu, lambda, p),
          tilted_law(mu, lambda, p)};
}

ExponentResult omega_tilde_min(double mu, double lambda,
                               const KeyChannelModel& model,
                               const PatternSearchOptions& opts) {
  const int zs = model.z_size();
  const int us = zs;
  std::vector<int> dims(zs, us);  // one p_{U|Z}(.|z) simplex per z
  const auto obj = [&](const SimplexPoint& pt) {
    const AuxJoint p =
        aux_from_u_given_z(model, u_given_z_from_point(pt, zs, us));
    return omega_tilde_capital(mu, lambda, p);
  };
  const SimplexResult r = minimize_on_simplices(obj, dims, opts);
  return {r.value, mu, lambda, r.point, r.evaluations};
}

PatternSearchOptions ExponentOptions::default_inner_options() {
  PatternSearchOptions o;
  o.starts = 32;
  o.patience = 8;
  o.max_iters = 300;
  o.step_min = 1e-9;
  o.seed = 12345;
  return o;
}

namespace {

double f_formula(double omega, double mu, double alpha, double R_A,
                 double R) {
  return (omega - alpha * (mu * R_A + (1.0 - mu) * R)) /
         (2.0 + alpha * (1.0 - mu));
}

double f_tilde_formula(double omega, double mu, double lambda, double R_A,
                       double R) {
  return (omega - lambda * (mu * R_A + R)) / (2.0 + lambda * (5.0 - mu));
}

}  // namespace

FSolver::FSolver(KeyChannelModel model, ExponentOptions opts)
    : model_(std::move(model)), opts_(std::move(opts)) {
  const int g = opts_.outer_grid;
  grid_.resize(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      grid_(i, j) = omega_at(i / (g - 1.0), j / (g - 1.0));
}

double FSolver::omega_at(double mu, double alpha) const {
  return omega_min(mu, alpha, model_, opts_.inner).value;
}

ExponentResult FSolver::evaluate(double R_A, double R) const {
  const int g = opts_.outer_grid;
  double best = -kInf;
  int bi = 0, bj = 0;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      const double v =
          f_formula(grid_(i, j), i / (g - 1.0), j / (g - 1.0), R_A, R);
      if (v > best) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  double mu = bi / (g - 1.0), alpha = bj / (g - 1.0);
  if (opts_.refine) {
    const double h = 1.0 / (g - 1.0);
    double arg = alpha;
    const double va = -golden_minimize(
        [&](double a) {
          return -f_formula(omega_at(mu, a), mu, a, R_A, R);
        },
        std::max(0.0, alpha - h), std::min(1.0, alpha + h),
        opts_.refine_tol, &arg);
    if (va > best) {
      best = va;
      alpha = arg;
    }
    const double vm = -golden_minimize(
        [&](double m) {
          return -f_formula(omega_at(m, alpha), m, alpha, R_A, R);
        },
        std::max(0.0, mu - h), std::min(1.0, mu + h), opts_.refine_tol,
        &arg);
    if (vm > best) {
      best = vm;
      mu = arg;
    }
  }
  ExponentResult r = omega_min(mu, alpha, model_, opts_.inner);
  r.value = f_formula(r.value, mu, alpha, R_A, R);
  if (r.value < best) r.value = best;  // grid witness dominates
  return r;
}

FTildeSolver::FTildeSolver(KeyChannelModel model, ExponentOptions opts)
    : model_(std::move(model)), opts_(std::move(opts)) {
  const int g = opts_.outer_grid;
  lambdas_.resize(g);
  for (int j = 0; j < g; ++j) {
    const double t = j / (g - 1.0);
    lambdas_[j] = opts_.lambda_cap * t * t;  // small optima sit near 0
  }
  grid_.resize(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j)
      grid_(i, j) = omega_at(i / (g - 1.0), lambdas_[j]);
}

double FTildeSolver::omega_at(double mu, double lambda) const {
  return omega_tilde_min(mu, lambda, model_, opts_.inner).value;
}

ExponentResult FTildeSolver::evaluate(double R_A, double R) const {
  const int g = opts_.outer_grid;
  double best = -kInf;
  int bi = 0, bj = 0;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      const double v =
          f_tilde_formula(grid_(i, j), i / (g - 1.0), lambdas_[j], R_A, R);
      if (v > best) {
        best = v;
        bi = i;
        bj = j;
      }
    }
  double mu = bi / (g - 1.0);
  double lambda = lambdas_[bj];
  if (opts_.refine) {
    const double lo = bj > 0 ? lambdas_[bj - 1] : 0.0;
    const double hi = bj + 1 < g ? lambdas_[bj + 1] : opts_.lambda_cap;
    double arg = lambda;
    const double vl = -golden_minimize(
        [&](double l) {
          return -f_tilde_formula(omega_at(mu, l), mu, l, R_A, R);
        },
        lo, hi, opts_.refine_tol, &arg);
    if (vl > best) {
      best = vl;
      lambda = arg;
    }
    const double hm = 1.0 / (g - 1.0);
    const double vm = -golden_minimize(
        [&](double m) {
          return -f_tilde_formula(omega_at(m, lambda), m, lambda, R_A, R);
        },
        std::max(0.0, mu - hm), std::min(1.0, mu + hm), opts_.refine_tol,
        &arg);
    if (vm > best) {
      best = vm;
      mu = arg;
    }
  }
  ExponentResult r = omega_tilde_min(mu, lambda, model_, opts_.inner);
  r.value = f_tilde_formula(r.value, mu, lambda, R_A, R);
  if (r.value < best) r.value = best;
  return r;
}

namespace {

/// Mean and variance of omega~ under a tilted version of p.
std::pair<double, double> tilted_moments(double mu, double nu,
                                         const AuxJoint& p) {
  const Eigen::VectorXd w = omega_tilde_weight(mu, p);
  const JointDistribution t = tilted_law(mu, nu, p);
  double mean = 0.0, sq = 0.0;
  for (std::int64_t i = 0; i < t.atoms(); ++i) {
    const double m = t.at_flat(i);
    if (m == 0.0) continue;
    mean += m * w[i];
    sq += m * w[i] * w[i];
  }
  return {mean, std::max(0.0, sq - mean * mean)};
}

AuxJoint aux_from_result(const KeyChannelModel& model,
                         const ExponentResult& r) {
  const int zs = model.z_size();
  return aux_from_u_given_z(model,
                            u_given_z_from_point(r.inner, zs, zs));
}

}  // namespace

double rho_variance(const KeyChannelModel& model, int grid,
                    const PatternSearchOptions& inner) {
  double rho = 0.0;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double mu = i / (grid - 1.0);
      const double lambda = 0.5 * j / (grid - 1.0);
      const ExponentResult r = omega_tilde_min(mu, lambda, model, inner);
      const AuxJoint p = aux_from_result(model, r);
      for (int v = 0; v < 5; ++v) {
        const double nu = lambda * v / 4.0;
        rho = std::max(rho, tilted_moments(mu, nu, p).second);
      }
    }
  return rho;
}

double g_inverse(double v) {
  if (v < 0.0) throw std::invalid_argument("g_inverse needs v >= 0");
  return (-2.0 + 2.0 * std::sqrt(1.0 + 5.0 * v)) / 5.0;
}

DeltaTerms delta_terms(int n, int alphabet_size, double R) {
  if (n < 1 || R <= 0.0) throw std::invalid_argument("need n >= 1, R > 0");
  const double q = alphabet_size;
  const double types = std::pow(n + 1.0, q);
  const double d1 =
      (1.0 + 2.0 * q * std::log(n + 1.0) + std::log(types + 1.0)) / n;
  const double d2 = std::log(5.0 * n * R * (types + 1.0)) / n;
  return {d1, d2};
}

std::vector<Theorem2Point> theorem2_curves(double E, double F, double R,
                                           int alphabet_size,
                                           const std::vector<int>& ns) {
  std::vector<Theorem2Point> out;
  for (int n : ns) {
    const DeltaTerms d = delta_terms(n, alphabet_size, R);
    out.push_back({n, std::exp(-n * (E - d.delta1)),
                   std::exp(-n * (F - d.delta2))});
  }
  return out;
}

Property2Report property2_suite(const KeyChannelModel& model,
                                std::uint64_t seed) {
  Property2Report rep{};
  rep.worst_c_low = kInf;
  rep.worst_c_high = -kInf;
  rep.worst_e_margin = kInf;
  const int zs = model.z_size(), ks = model.k_size();
  const double cap_coeff_z = std::log(double(zs)),
               cap_coeff_k = std::log(double(ks));
  StreamRng rng(seed, 11);

  const auto random_aux = [&]() {
    Eigen::MatrixXd u_given_z(zs, zs);
    for (int z = 0; z < zs; ++z) {
      double s = 0.0;
      for (int u = 0; u < zs; ++u) {
        u_given_z(z, u) = -std::log(1.0 - rng.next_double());
        s += u_given_z(z, u);
      }
      u_given_z.row(z) /= s;
    }
    return aux_from_u_given_z(model, u_given_z);
  };

  // c) range bounds on random members and parameters.
  for (int t = 0; t < 200; ++t) {
    const AuxJoint p = random_aux();
    const double mu = rng.next_double(), lambda = rng.next_double();
    const double om = omega_tilde_capital(mu, lambda, p);
    const double cap = mu * cap_coeff_z + (1.0 - mu) * cap_coeff_k;
    rep.worst_c_low = std::min(rep.worst_c_low, om);
    rep.worst_c_high = std::max(rep.worst_c_high, om - cap);
  }

  // d) derivative identities against central differences.
  const double h = 1e-4;
  for (double mu : {0.0, 0.3, 0.7, 1.0}) {
    const AuxJoint p = random_aux();
    for (double lambda : {0.1, 0.25, 0.4}) {
      const double f0 = omega_tilde_capital(mu, lambda, p);
      const double fp = omega_tilde_capital(mu, lambda + h, p);
      const double fm = omega_tilde_capital(mu, lambda - h, p);
      const auto [mean, var] = tilted_moments(mu, lambda, p);
      rep.worst_d_first = std::max(
          rep.worst_d_first, std::abs((fp - fm) / (2 * h) - mean));
      rep.worst_d_second = std::max(
          rep.worst_d_second,
          std::abs((fp - 2 * f0 + fm) / (h * h) + var));
    }
    // concavity of lambda -> Omega~ on [0, 1/2]
    for (double lambda = 0.01; lambda <= 0.49; lambda += 0.01) {
      const double sd = omega_tilde_capital(mu, lambda + 0.01, p) -
                        2 * omega_tilde_capital(mu, lambda, p) +
                        omega_tilde_capital(mu, lambda - 0.01, p);
      rep.worst_concavity = std::max(rep.worst_concavity, sd);
    }
  }

  // e) quadratic lower bound with rho.
  const PatternSearchOptions inner =
      ExponentOptions::default_inner_options();
  rep.rho = rho_variance(model, 9, inner);
  for (int i = 0; i < 9; ++i) {
    const double mu = i / 8.0;
    // R^(mu): derivative of the minimized Omega~ at lambda = 0.
    const auto rmu_obj = [&](const SimplexPoint& pt) {
      const AuxJoint p =
          aux_from_u_given_z(model, u_given_z_from_point(pt, zs, zs));
      return tilted_moments(mu, 0.0, p).first;
    };
    const double rmu =
        minimize_on_simplices(rmu_obj, std::vector<int>(zs, zs), inner)
            .value;
    for (int j = 1; j < 9; ++j) {
      const double lambda = 0.5 * j / 8.0;
      const double om = omega_tilde_min(mu, lambda, model, inner).value;
      rep.worst_e_margin =
          std::min(rep.worst_e_margin,
                   om - (lambda * rmu - lambda * lambda / 2.0 * rep.rho));
    }
  }

  rep.pass = rep.worst_c_low >= -1e-9 && rep.worst_c_high <= 1e-9 &&
             rep.worst_d_first <= 1e-4 && rep.worst_d_second <= 1e-4 &&
             rep.worst_concavity <= 1e-8 && rep.worst_e_margin >= -1e-6;
  return rep;
}

}  // namespace pacsim
