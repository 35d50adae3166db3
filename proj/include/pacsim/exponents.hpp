#ifndef PACSIM_EXPONENTS_HPP
#define PACSIM_EXPONENTS_HPP

#include <Eigen/Dense>
#include <vector>

#include "pacsim/optim.hpp"
#include "pacsim/prob.hpp"

namespace pacsim {

/// Single-letter key/side-channel pair: p(z,k) = p_K(k) W(z|k).
struct KeyChannelModel {
  Distribution p_K;
  Channel W;
  Eigen::VectorXd p_z;          // |Z|
  Eigen::MatrixXd p_k_given_z;  // |Z| x |K|; uniform filler on null z

  KeyChannelModel(Distribution key, Channel w);
  int z_size() const { return static_cast<int>(p_z.size()); }
  int k_size() const { return p_K.size(); }
};

/// Auxiliary joint q_{UZK} = q_U q_{Z|U} q_{K|Z}; the factored form makes
/// U <-> Z <-> K hold by construction.
struct AuxJoint {
  Eigen::VectorXd q_u;          // |U|
  Eigen::MatrixXd q_z_given_u;  // |U| x |Z|
  Eigen::MatrixXd q_k_given_z;  // |Z| x |K|

  AuxJoint(Eigen::VectorXd u, Eigen::MatrixXd zu, Eigen::MatrixXd kz);

  int u_size() const { return static_cast<int>(q_u.size()); }
  int z_size() const { return static_cast<int>(q_z_given_u.cols()); }
  int k_size() const { return static_cast<int>(q_k_given_z.cols()); }

  double mass(int u, int z, int k) const {
    return q_u[u] * q_z_given_u(u, z) * q_k_given_z(z, k);
  }
  Eigen::VectorXd marginal_z() const;
  Eigen::MatrixXd k_given_u() const;  // |U| x |K|
  JointDistribution joint() const;    // axes (U, Z, K)
};

/// Markov-checked import of an arbitrary (U,Z,K) law (q_{K|ZU} must not
/// depend on u, within tol).
AuxJoint aux_from_joint(const JointDistribution& j, double tol = 1e-9);

/// Member of the model-consistent family: p_{ZK} pinned to the model,
/// parameterized by p_{U|Z} (|Z| x |U| rows).
AuxJoint aux_from_u_given_z(const KeyChannelModel& model,
                            const Eigen::MatrixXd& u_given_z);

/// E(R|p_X) = min over p on the simplex of [R - H(p)]^+ + D(p||p_X).
double error_exponent_E(double R, const Distribution& p_X,
                        const PatternSearchOptions& opts = {});

/// omega^{(mu,alpha)}_{q|p_Z}(z,k|u), flat over (u,z,k), last axis
/// fastest. Entries may be +/-infinity; zero-mass atoms are skipped by
/// the expectations below.
Eigen::VectorXd omega_weight(double mu, double alpha, const AuxJoint& q,
                             const Eigen::VectorXd& p_z);

/// Omega^{(mu,alpha)}(q|p_Z) = -ln E_q[exp(-omega)]. Throws when q puts
/// mass on a p_Z-null symbol.
double omega_capital(double mu, double alpha, const AuxJoint& q,
                     const Eigen::VectorXd& p_z);

struct ExponentResult {
  double value;
  double mu;
  double second;      // alpha for F, lambda for F~
  SimplexPoint inner; // blocks of the inner minimizer
  int evaluations;
};

/// min over q in Q(p_{K|Z}) (free q_U, q_{Z|U}; q_{K|Z} pinned,
/// |U| = |Z|) of Omega^{(mu,alpha)}.
ExponentResult omega_min(double mu, double alpha,
                         const KeyChannelModel& model,
                         const PatternSearchOptions& opts = {});

/// omega~^{(mu)}_p(z,k|u) for p in the model-consistent family, flat
/// over (u,z,k).
Eigen::VectorXd omega_tilde_weight(double mu, const AuxJoint& p);

/// Omega~^{(mu,lambda)}(p) = -ln E_p[exp(-lambda omega~)].
double omega_tilde_capital(double mu, double lambda, const AuxJoint& p);

/// Tilted law p^(lambda) over (U,Z,K).
JointDistribution tilted_law(double mu, double lambda, const AuxJoint& p);

struct TildeFamily {
  Eigen::VectorXd omega;   // omega~ table
  double capital;          // Omega~ value
  JointDistribution tilted;
};

TildeFamily tilde_family(double mu, double lambda, const AuxJoint& p);

/// min over the model-consistent family (p_{U|Z} free, |U| = |Z|) of
/// Omega~^{(mu,lambda)}.
ExponentResult omega_tilde_min(double mu, double lambda,
                               const KeyChannelModel& model,
                               const PatternSearchOptions& opts = {});

struct ExponentOptions {
  int outer_grid = 33;     // grid per outer axis
  double lambda_cap = 4.0; // search window for the tilde sup
  bool refine = true;      // golden refinement around the best cell
  double refine_tol = 1e-3;
  PatternSearchOptions inner = default_inner_options();

  static PatternSearchOptions default_inner_options();
};

/// F(R_A, R | p_K, W) = sup over (mu,alpha) in [0,1]^2 of
/// [Omega^{(mu,alpha)} - alpha(mu R_A + (1-mu) R)] / (2 + alpha(1-mu)).
/// The Omega grid is independent of the rates, so one solver serves many
/// (R_A, R) queries.
class FSolver {
 public:
  FSolver(KeyChannelModel model, ExponentOptions opts = {});
  ExponentResult evaluate(double R_A, double R) const;
  const KeyChannelModel& model() const { return model_; }

 private:
  double omega_at(double mu, double alpha) const;
  KeyChannelModel model_;
  ExponentOptions opts_;
  Eigen::MatrixXd grid_;  // cached Omega values, mu x alpha
};

/// F~(R_A, R | p_K, W) = sup over mu in [0,1], lambda >= 0 (capped) of
/// [Omega~^{(mu,lambda)} - lambda(mu R_A + R)] / (2 + lambda(5 - mu)).
class FTildeSolver {
 public:
  FTildeSolver(KeyChannelModel model, ExponentOptions opts = {});
  ExponentResult evaluate(double R_A, double R) const;
  const KeyChannelModel& model() const { return model_; }

 private:
  double omega_at(double mu, double lambda) const;
  KeyChannelModel model_;
  ExponentOptions opts_;
  std::vector<double> lambdas_;  // quadratically spaced: dense near 0
  Eigen::MatrixXd grid_;         // cached Omega~ values, mu x lambda
};

/// rho(p_K, W): max over (mu,lambda) in [0,1] x [0,1/2] and nu in
/// [0,lambda] of Var_{p^(nu)}[omega~] at the Omega~ minimizer.
double rho_variance(const KeyChannelModel& model, int grid = 9,
                    const PatternSearchOptions& inner =
                        ExponentOptions::default_inner_options());

/// Inverse of theta(a) = a + (5/4) a^2 on a >= 0.
double g_inverse(double v);

struct DeltaTerms {
  double delta1, delta2;
};

DeltaTerms delta_terms(int n, int alphabet_size, double R);

struct Theorem2Point {
  int n;
  double error_bound;    // e^{-n[E - delta1]}
  double leakage_bound;  // e^{-n[F - delta2]}
};

std::vector<Theorem2Point> theorem2_curves(double E, double F, double R,
                                           int alphabet_size,
                                           const std::vector<int>& ns);

struct Property2Report {
  double worst_c_low;      // min Omega~ over samples (should be >= 0)
  double worst_c_high;     // max (Omega~ - cap) over samples (<= 0)
  double worst_d_first;    // max |dOmega~/dlambda - E_{p^(lambda)}[omega~]|
  double worst_d_second;   // max |d2 + Var|
  double worst_concavity;  // max positive second difference
  double worst_e_margin;   // min of Omega~_min - (lambda R_mu - lambda^2 rho/2)
  double rho;
  bool pass;
};

/// Numeric verification of the tilde functional's range, derivative,
/// concavity, and quadratic lower-bound properties on the given model.
Property2Report property2_suite(const KeyChannelModel& model,
                                std::uint64_t seed = 0);

}  // namespace pacsim

#endif  // PACSIM_EXPONENTS_HPP
