#ifndef PACSIM_CIPHER_HPP
#define PACSIM_CIPHER_HPP

#include <string>
#include <vector>

#include "pacsim/affine.hpp"
#include "pacsim/field.hpp"
#include "pacsim/prob.hpp"

namespace pacsim {

/// Eavesdropper side-information encoder: explicit table over Z^n block
/// indices. rate = (1/n) ln(message count).
struct AdversaryEncoder {
  std::string name;
  int n;
  int z_alphabet;
  std::vector<int> map;  // size z_alphabet^n, values in [0, messages)
  int messages;

  double rate() const;
};

AdversaryEncoder adversary_constant(int n, int z_alphabet);
AdversaryEncoder adversary_identity(int n, int z_alphabet);
/// Keeps the first floor(n R_A / ln|Z|) coordinates of z^n.
AdversaryEncoder adversary_truncation(int n, int z_alphabet, double R_A);
/// Reports only the empirical type of z^n.
AdversaryEncoder adversary_type_quantizer(int n, int z_alphabet);

AdversaryEncoder make_adversary(const std::string& strategy, int n,
                                int z_alphabet, double R_A);

/// Throws unless rate <= R_A + eps.
void check_rate_class(const AdversaryEncoder& adv, double R_A,
                      double eps = 1e-9);

/// One fully specified system: i.i.d. source p_X over GF(p), uniform key,
/// memoryless side channel W on the key, affine privacy amplifier,
/// table-driven adversary.
struct SystemInstance {
  FieldSpec spec;
  int n;
  Distribution p_X;
  Channel W;
  AffineEncoder encoder;
  AdversaryEncoder adversary;
  TieRule tie = TieRule::DeclareError;

  SystemInstance(FieldSpec s, int block, Distribution px, Channel w,
                 AffineEncoder enc, AdversaryEncoder adv,
                 TieRule rule = TieRule::DeclareError);
  int m() const { return encoder.m(); }
};

/// Exact joint law over (X^n, K^n, Z^n, M_A, C~^m); the last two axes
/// are deterministic given the first three.
JointDistribution build_joint(const SystemInstance& sys,
                              std::uint64_t cap = kDefaultEnumCap);

/// Delta^(n) = I(X^n ; C~^m, M_A). Exact, via a reduced marginalization
/// (the leakage depends on x only through its linear image).
double leakage_exact(const SystemInstance& sys,
                     std::uint64_t cap = kDefaultEnumCap);

/// D(p_{K~|M_A} || uniform | p_{M_A}) = m ln|X| - H(K~|M_A); checked
/// against leakage_exact.
double leakage_divergence_bound(const SystemInstance& sys,
                                std::uint64_t cap = kDefaultEnumCap);

struct LeakageReport {
  double delta_exact;
  double divergence_bound;
  double theta_bound;
  int n, m;
  double R, R_A;
  std::string adversary;
};

LeakageReport leakage_report(const SystemInstance& sys, double R,
                             std::uint64_t cap = kDefaultEnumCap);

/// Theta(R, phi_A | p_K^n, W^n) =
///   E[ ln(1 + (e^{nR}-1) p_{K^n|M_A}(K^n|M_A)) ].
double theta(const SystemInstance& sys, double R,
             std::uint64_t cap = kDefaultEnumCap);

struct ThetaTail {
  double wp;     // Pr[R >= (1/n) ln(1/p_{K|M}) - eta]
  double bound;  // nR * wp + e^{-n eta}
  double theta_value;
};

ThetaTail theta_tail_bound(const SystemInstance& sys, double R, double eta,
                           std::uint64_t cap = kDefaultEnumCap);

struct EventReport {
  double pr_b, pr_c, pr_d, pr_e;  // event probabilities
  double pr_b_c, pr_c_c, pr_d_c;  // complements, each <= e^{-n eta}
  double wp;                      // = pr_e
  double wp_tilde;                // four-condition mass + 3 e^{-n eta}
};

/// Typicality-event machinery over the joint of (M_A, Z^n, K^n). qhat is
/// any law over that product (axes M_A, Z^n, K^n), q_zn any law over
/// Z^n block indices; both may be arbitrary.
EventReport event_decomposition(const SystemInstance& sys, double R,
                                double R_A, double eta,
                                const JointDistribution& qhat,
                                const Distribution& q_zn,
                                std::uint64_t cap = kDefaultEnumCap);

struct SimResult {
  std::uint64_t trials;
  std::uint64_t errors;
  double p_hat;
  double wilson_lo, wilson_hi;  // 95% Wilson interval
};

/// Monte Carlo rounds of the full pipeline; deterministic under seed.
SimResult simulate(const SystemInstance& sys, std::uint64_t trials,
                   std::uint64_t seed, std::uint64_t cap = kDefaultEnumCap);

}  // namespace pacsim

#endif  // PACSIM_CIPHER_HPP
