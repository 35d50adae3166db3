#include <doctest.h>

#include <array>
#include <cmath>

#include "pacsim/cipher.hpp"

using namespace pacsim;

namespace {

AffineEncoder parity(int n) {
  const FieldSpec spec(2);
  return AffineEncoder(FieldMatrix(spec, Eigen::MatrixXi::Ones(n, 1)),
                       FieldVector::zero(spec, 1));
}

AffineEncoder identity_encoder(int n) {
  const FieldSpec spec(2);
  return AffineEncoder(FieldMatrix(spec, Eigen::MatrixXi::Identity(n, n)),
                       FieldVector::zero(spec, n));
}

Distribution biased(double p0) {
  Eigen::VectorXd v(2);
  v << p0, 1.0 - p0;
  return Distribution(v);
}

}  // namespace

TEST_CASE("adversary encoder factories") {
  const AdversaryEncoder c = adversary_constant(3, 2);
  CHECK(c.messages == 1);
  CHECK(c.rate() == doctest::Approx(0.0));

  const AdversaryEncoder id = adversary_identity(3, 2);
  CHECK(id.messages == 8);
  CHECK(id.rate() == doctest::Approx(std::log(2.0)));
  for (int i = 0; i < 8; ++i) CHECK(id.map[i] == i);

  // R_A = 0.5 keeps floor(3 * 0.5 / ln 2) = 2 leading symbols
  const AdversaryEncoder tr = adversary_truncation(3, 2, 0.5);
  CHECK(tr.messages == 4);
  CHECK(tr.rate() <= 0.5 + 1e-12);
  for (int i = 0; i < 8; ++i) CHECK(tr.map[i] == i / 2);
  CHECK(adversary_truncation(3, 2, 0.1).messages == 1);

  const AdversaryEncoder ty = adversary_type_quantizer(3, 2);
  CHECK(ty.messages == 4);  // one message per weight 0..3
  CHECK(ty.map[0b000] == ty.map[0b000]);
  CHECK(ty.map[0b001] == ty.map[0b100]);
  CHECK(ty.map[0b011] == ty.map[0b110]);
  CHECK(ty.map[0b001] != ty.map[0b011]);
  CHECK(ty.map[0b000] != ty.map[0b111]);

  CHECK(make_adversary("constant", 2, 2, 0.0).messages == 1);
  CHECK(make_adversary("identity", 2, 2, 1.0).messages == 4);
  CHECK_THROWS(make_adversary("nonsense", 2, 2, 0.0));

  CHECK_NOTHROW(check_rate_class(id, std::log(2.0)));
  CHECK_THROWS(check_rate_class(id, 0.3));
}

TEST_CASE("invertible amplification leaks nothing to a blind adversary") {
  const FieldSpec spec(2);
  SystemInstance sys(spec, 2, biased(0.7), Channel::binary_symmetric(0.1),
                     identity_encoder(2), adversary_constant(2, 2));
  CHECK(leakage_exact(sys) <= 1e-12);
}

TEST_CASE("reduced leakage path equals mutual information on the full joint") {
  const FieldSpec spec(2);
  SystemInstance sys(spec, 2, biased(0.6), Channel::binary_symmetric(0.2),
                     parity(2), adversary_identity(2, 2));
  const JointDistribution j = build_joint(sys);
  CHECK(j.shape() == std::vector<int>{4, 4, 4, 4, 2});
  const double via_joint =
      mutual_information(j, std::array<int, 1>{0}, std::array<int, 2>{4, 3});
  CHECK(leakage_exact(sys) == doctest::Approx(via_joint).epsilon(1e-10));
}

TEST_CASE("leakage never exceeds the divergence form") {
  StreamRng rng(55, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint32_t p = (rng.next_below(2) == 0) ? 2 : 3;
    const FieldSpec spec(p);
    const int n = 1 + static_cast<int>(rng.next_below(3));
    const int m = 1 + static_cast<int>(rng.next_below(n));
    auto [A, b] = random_affine(n, m, spec, rng);
    Eigen::MatrixXd rows(p, 2);
    for (std::uint32_t r = 0; r < p; ++r) {
      const double a = 0.1 + 0.8 * rng.next_double();
      rows(r, 0) = a;
      rows(r, 1) = 1.0 - a;
    }
    Eigen::VectorXd px(p);
    double s = 0.0;
    for (std::uint32_t i = 0; i < p; ++i) {
      px[i] = 0.05 + rng.next_double();
      s += px[i];
    }
    SystemInstance sys(spec, n, Distribution(px / s), Channel(rows),
                       AffineEncoder(A, b), adversary_identity(n, 2));
    const double leak = leakage_exact(sys);
    const double bound = leakage_divergence_bound(sys);
    CHECK(bound - leak >= -1e-10);
  }
}

TEST_CASE("theta closed forms") {
  const FieldSpec spec(2);
  // blind adversary, n = 1, uniform key: theta(ln 2) = ln(3/2)
  SystemInstance blind(spec, 1, Distribution::uniform(2),
                       Channel::binary_symmetric(0.3), identity_encoder(1),
                       adversary_constant(1, 2));
  CHECK(theta(blind, std::log(2.0)) == doctest::Approx(std::log(1.5)).epsilon(1e-12));

  // noiseless side channel + identity adversary pins the key: theta = nR
  SystemInstance pinned(spec, 2, Distribution::uniform(2), Channel::identity(2),
                        identity_encoder(2), adversary_identity(2, 2));
  CHECK(theta(pinned, 0.4) == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("theta tail bound dominates theta") {
  const FieldSpec spec(2);
  SystemInstance sys(spec, 2, Distribution::uniform(2),
                     Channel::binary_symmetric(0.2), parity(2),
                     adversary_identity(2, 2));
  for (const double eta : {0.05, 0.1, 0.2, 0.5}) {
    const ThetaTail t = theta_tail_bound(sys, 0.4, eta);
    CHECK(t.theta_value <= t.bound + 1e-12);
    CHECK(t.wp >= 0.0);
    CHECK(t.wp <= 1.0);
  }
}

TEST_CASE("event decomposition under the true reference laws") {
  const FieldSpec spec(2);
  SystemInstance sys(spec, 2, Distribution::uniform(2),
                     Channel::binary_symmetric(0.2), parity(2),
                     adversary_identity(2, 2));
  const JointDistribution joint = build_joint(sys);
  const JointDistribution qhat = joint.marginal(std::array<int, 3>{3, 2, 1});
  const Distribution q_zn(joint.marginal(std::array<int, 1>{2}).table());
  const double R = 0.4, R_A = std::log(2.0);
  for (const double eta : {0.05, 0.2}) {
    const EventReport rep = event_decomposition(sys, R, R_A, eta, qhat, q_zn);
    // matching reference measures make the change-of-measure events sure
    CHECK(rep.pr_b == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.pr_c == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rep.pr_b_c <= std::exp(-sys.n * eta) + 1e-12);
    CHECK(rep.pr_c_c <= std::exp(-sys.n * eta) + 1e-12);
    CHECK(rep.pr_d_c <= std::exp(-sys.n * eta) + 1e-12);
    CHECK(rep.wp == doctest::Approx(rep.pr_e).epsilon(1e-12));
    CHECK(rep.wp <= rep.wp_tilde + 1e-10);
  }
  // an off-model reference still satisfies the complement bounds
  const Distribution unif_zn = Distribution::uniform(4);
  const EventReport rep = event_decomposition(sys, R, R_A, 0.1, qhat, unif_zn);
  CHECK(rep.pr_c_c <= std::exp(-0.2) + 1e-12);
  CHECK(rep.wp <= rep.wp_tilde + 1e-10);
}

TEST_CASE("leakage report fields are mutually consistent") {
  const FieldSpec spec(2);
  SystemInstance sys(spec, 3, biased(0.8), Channel::binary_symmetric(0.1),
                     parity(3), adversary_truncation(3, 2, 0.5));
  const LeakageReport rep = leakage_report(sys, std::log(2.0) / 3);
  CHECK(rep.n == 3);
  CHECK(rep.m == 1);
  CHECK(rep.delta_exact <= rep.divergence_bound + 1e-10);
  CHECK(rep.delta_exact >= -1e-12);
  CHECK(rep.adversary == sys.adversary.name);
}

TEST_CASE("simulation reproduces the exact error rate") {
  const FieldSpec spec(2);
  SystemInstance sys(spec, 3, Distribution::uniform(2),
                     Channel::binary_symmetric(0.2), parity(3),
                     adversary_constant(3, 2));
  const SimResult a = simulate(sys, 20000, 2024);
  const SimResult b = simulate(sys, 20000, 2024);
  CHECK(a.errors == b.errors);  // deterministic replay
  CHECK(a.trials == 20000);
  CHECK(a.p_hat == doctest::Approx(static_cast<double>(a.errors) / 20000.0));
  // exact p_e is 0.75; the 95% interval should cover it
  CHECK(a.wilson_lo <= 0.75);
  CHECK(a.wilson_hi >= 0.75);
  CHECK(a.wilson_lo <= a.p_hat);
  CHECK(a.p_hat <= a.wilson_hi);

  // a lossless system never errs and the interval collapses at zero
  SystemInstance lossless(spec, 2, Distribution::uniform(2),
                          Channel::binary_symmetric(0.2), identity_encoder(2),
                          adversary_constant(2, 2));
  const SimResult z = simulate(lossless, 5000, 1);
  CHECK(z.errors == 0);
  CHECK(z.wilson_lo == 0.0);
  CHECK(z.wilson_hi < 0.01);
}

TEST_CASE("system construction validates alphabet consistency") {
  const FieldSpec spec(2);
  // source distribution over the wrong alphabet size
  CHECK_THROWS(SystemInstance(spec, 2, Distribution::uniform(3),
                              Channel::binary_symmetric(0.1), parity(2),
                              adversary_constant(2, 2)));
  // adversary built for a different block length
  CHECK_THROWS(SystemInstance(spec, 2, Distribution::uniform(2),
                              Channel::binary_symmetric(0.1), parity(2),
                              adversary_constant(3, 2)));
}
