#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "pacsim/exponents.hpp"

using namespace pacsim;

namespace {

KeyChannelModel bsc_model(double eps) {
  return KeyChannelModel(Distribution::uniform(2),
                         Channel::binary_symmetric(eps));
}

Eigen::MatrixXd random_rows(int r, int c, StreamRng& rng) {
  Eigen::MatrixXd m(r, c);
  for (int i = 0; i < r; ++i) {
    double s = 0.0;
    for (int j = 0; j < c; ++j) {
      m(i, j) = 0.05 + rng.next_double();
      s += m(i, j);
    }
    m.row(i) /= s;
  }
  return m;
}

Eigen::VectorXd random_simplex(int d, StreamRng& rng) {
  Eigen::VectorXd v(d);
  double s = 0.0;
  for (int i = 0; i < d; ++i) {
    v[i] = 0.05 + rng.next_double();
    s += v[i];
  }
  return v / s;
}

}  // namespace

TEST_CASE("key channel model marginals") {
  const KeyChannelModel m = bsc_model(0.1);
  CHECK(m.z_size() == 2);
  CHECK(m.k_size() == 2);
  CHECK(m.p_z[0] == doctest::Approx(0.5));
  CHECK(m.p_k_given_z(0, 0) == doctest::Approx(0.9));
  CHECK(m.p_k_given_z(1, 0) == doctest::Approx(0.1));
}

TEST_CASE("auxiliary joint bookkeeping") {
  StreamRng rng(3, 0);
  const AuxJoint q(random_simplex(2, rng), random_rows(2, 2, rng),
                   random_rows(2, 2, rng));
  double total = 0.0;
  for (int u = 0; u < 2; ++u)
    for (int z = 0; z < 2; ++z)
      for (int k = 0; k < 2; ++k) total += q.mass(u, z, k);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(q.marginal_z().sum() == doctest::Approx(1.0).epsilon(1e-12));
  const Eigen::MatrixXd ku = q.k_given_u();
  for (int u = 0; u < 2; ++u) CHECK(ku.row(u).sum() == doctest::Approx(1.0));
  const JointDistribution j = q.joint();
  CHECK(j.shape() == std::vector<int>{2, 2, 2});
  CHECK(j.at_flat(0) == doctest::Approx(q.mass(0, 0, 0)));

  // invalid kernel rows are rejected
  Eigen::MatrixXd bad = random_rows(2, 2, rng);
  bad(0, 0) += 0.2;
  CHECK_THROWS(AuxJoint(q.q_u, bad, q.q_k_given_z));
}

TEST_CASE("markov import accepts chains and rejects others") {
  StreamRng rng(4, 1);
  const AuxJoint q(random_simplex(3, rng), random_rows(3, 2, rng),
                   random_rows(2, 2, rng));
  const AuxJoint back = aux_from_joint(q.joint());
  for (int u = 0; u < 3; ++u)
    for (int z = 0; z < 2; ++z)
      for (int k = 0; k < 2; ++k)
        CHECK(back.mass(u, z, k) == doctest::Approx(q.mass(u, z, k)).epsilon(1e-9));

  // make the key kernel depend on u: not a Markov chain anymore
  Eigen::VectorXd t(8);
  t << 0.20, 0.05, 0.05, 0.20, 0.05, 0.20, 0.20, 0.05;
  CHECK_THROWS(aux_from_joint(JointDistribution({2, 2, 2}, t)));
}

TEST_CASE("model-consistent members preserve the (Z, K) law") {
  const KeyChannelModel m = bsc_model(0.2);
  StreamRng rng(5, 2);
  const AuxJoint p = aux_from_u_given_z(m, random_rows(2, 3, rng));
  Eigen::MatrixXd zk = Eigen::MatrixXd::Zero(2, 2);
  for (int u = 0; u < 3; ++u)
    for (int z = 0; z < 2; ++z)
      for (int k = 0; k < 2; ++k) zk(z, k) += p.mass(u, z, k);
  for (int z = 0; z < 2; ++z)
    for (int k = 0; k < 2; ++k)
      CHECK(zk(z, k) ==
            doctest::Approx(m.p_z[z] * m.p_k_given_z(z, k)).epsilon(1e-10));
}

TEST_CASE("error exponent matches the uniform-source closed form") {
  const Distribution u2 = Distribution::uniform(2);
  CHECK(error_exponent_E(0.3, u2) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(error_exponent_E(1.0, u2) ==
        doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-6));
  CHECK(error_exponent_E(2.0, u2) ==
        doctest::Approx(2.0 - std::log(2.0)).epsilon(1e-6));
  Eigen::VectorXd pv(2);
  pv << 0.85, 0.15;
  const Distribution p(pv);
  CHECK(error_exponent_E(entropy(p), p) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(error_exponent_E(0.5, p) > 0.0);
  CHECK(error_exponent_E(0.9, p) > error_exponent_E(0.5, p));
}

TEST_CASE("omega closed forms") {
  const KeyChannelModel m = bsc_model(0.1);
  // U independent of (Z, K), marginals on the model
  Eigen::MatrixXd zu(2, 2);
  zu << m.p_z[0], m.p_z[1], m.p_z[0], m.p_z[1];
  const AuxJoint indep(Eigen::VectorXd::Constant(2, 0.5), zu, m.p_k_given_z);

  // alpha = 0 leaves only ln(q_Z / p_Z), which vanishes on the model
  CHECK(omega_capital(0.7, 0.0, indep, m.p_z) == doctest::Approx(0.0));
  CHECK(std::signbit(omega_capital(0.7, 0.0, indep, m.p_z)) == false);
  // mu = 0, alpha = 1: the weight collapses to ln(1 / q_{K|U}) = ln 2
  CHECK(omega_capital(0.0, 1.0, indep, m.p_z) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // charging a null symbol of the reference is rejected
  Eigen::VectorXd null_pz(2);
  null_pz << 1.0, 0.0;
  CHECK_THROWS_AS(omega_capital(0.5, 0.5, indep, null_pz),
                  std::invalid_argument);
}

TEST_CASE("omega_min lower-bounds explicit family members") {
  const KeyChannelModel m = bsc_model(0.1);
  StreamRng rng(6, 3);
  const std::vector<std::pair<double, double>> grid{
      {0.0, 1.0}, {0.5, 0.5}, {1.0, 0.3}};
  for (const auto& [mu, alpha] : grid) {
    const ExponentResult res = omega_min(mu, alpha, m);
    for (int trial = 0; trial < 5; ++trial) {
      const AuxJoint q(random_simplex(2, rng), random_rows(2, 2, rng),
                       m.p_k_given_z);
      CHECK(res.value <= omega_capital(mu, alpha, q, m.p_z) + 1e-7);
    }
  }
}

TEST_CASE("tilde functional closed forms and tilted laws") {
  const KeyChannelModel m = bsc_model(0.1);
  StreamRng rng(8, 4);
  const AuxJoint p = aux_from_u_given_z(m, random_rows(2, 2, rng));
  CHECK(omega_tilde_capital(0.4, 0.0, p) == doctest::Approx(0.0));
  CHECK(std::signbit(omega_tilde_capital(0.4, 0.0, p)) == false);

  // mu = 0 with U independent and a uniform key: weight is ln|K|
  Eigen::MatrixXd zu(2, 2);
  zu << m.p_z[0], m.p_z[1], m.p_z[0], m.p_z[1];
  const AuxJoint indep(Eigen::VectorXd::Constant(2, 0.5), zu, m.p_k_given_z);
  for (const double lambda : {0.2, 0.7, 1.3})
    CHECK(omega_tilde_capital(0.0, lambda, indep) ==
          doctest::Approx(lambda * std::log(2.0)).epsilon(1e-12));

  // lambda = 0 tilts nothing
  const JointDistribution t0 = tilted_law(0.4, 0.0, p);
  const JointDistribution base = p.joint();
  for (std::int64_t i = 0; i < base.atoms(); ++i)
    CHECK(t0.at_flat(i) == doctest::Approx(base.at_flat(i)).epsilon(1e-12));

  const TildeFamily fam = tilde_family(0.3, 0.6, p);
  CHECK(fam.capital == doctest::Approx(omega_tilde_capital(0.3, 0.6, p)));
  CHECK(fam.tilted.table().sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fam.omega.size() == base.atoms());
}

TEST_CASE("tilde minimum lower-bounds explicit members and stays in range") {
  const KeyChannelModel m = bsc_model(0.1);
  StreamRng rng(9, 5);
  const std::vector<std::pair<double, double>> grid{
      {0.0, 0.5}, {0.5, 0.25}, {1.0, 0.4}};
  for (const auto& [mu, lambda] : grid) {
    const ExponentResult res = omega_tilde_min(mu, lambda, m);
    CHECK(res.value >= -1e-9);
    CHECK(res.value <=
          mu * std::log(2.0) + (1.0 - mu) * std::log(2.0) + 1e-9);
    for (int trial = 0; trial < 5; ++trial) {
      const AuxJoint p = aux_from_u_given_z(m, random_rows(2, 2, rng));
      CHECK(res.value <= omega_tilde_capital(mu, lambda, p) + 1e-7);
    }
  }
}

TEST_CASE("tilde functional bounds on random members") {
  StreamRng rng(10, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const int zs = 2 + static_cast<int>(rng.next_below(2));
    const int ks = 2 + static_cast<int>(rng.next_below(2));
    const KeyChannelModel m(Distribution(random_simplex(ks, rng)),
                            Channel(random_rows(ks, zs, rng)));
    const AuxJoint p = aux_from_u_given_z(m, random_rows(zs, zs, rng));
    const double mu = rng.next_double();
    // the range bound relies on Jensen, so it needs lambda <= 1
    const double lambda = rng.next_double();
    const double v = omega_tilde_capital(mu, lambda, p);
    CHECK(v >= -1e-9);
    CHECK(v <= mu * std::log(static_cast<double>(zs)) +
                   (1.0 - mu) * std::log(static_cast<double>(ks)) + 1e-9);
  }
}

TEST_CASE("secrecy exponent solvers on a binary symmetric side channel") {
  ExponentOptions opts;
  opts.outer_grid = 9;
  const KeyChannelModel m = bsc_model(0.1);
  const FSolver f(m, opts);
  const FTildeSolver ft(m, opts);

  // deep inside the one-helper region the exponent vanishes
  const ExponentResult inside = f.evaluate(0.8, 0.8);
  CHECK(inside.value >= 0.0);
  CHECK(inside.value <= 1e-3);
  // outside it is strictly positive
  const ExponentResult outside = f.evaluate(0.2, 0.3);
  CHECK(outside.value > 1e-3);
  CHECK(outside.mu >= 0.0);
  CHECK(outside.mu <= 1.0);

  const ExponentResult ft_out = ft.evaluate(0.2, 0.3);
  CHECK(ft_out.value >= 0.0);
  // the direct exponent dominates its lower proxy
  CHECK(outside.value >= ft_out.value - 1e-3);
  CHECK(f.evaluate(0.8, 0.8).value == inside.value);  // deterministic
}

TEST_CASE("curvature constant, inverse map, and block penalties") {
  const KeyChannelModel m = bsc_model(0.1);
  const double rho = rho_variance(m, 5);
  CHECK(rho > 0.0);
  CHECK(rho < 10.0);

  CHECK(g_inverse(0.0) == doctest::Approx(0.0));
  CHECK(g_inverse(2.25) == doctest::Approx(1.0).epsilon(1e-12));
  for (double v : {0.1, 0.5, 1.0, 3.0, 8.0}) {
    const double a = g_inverse(v);
    CHECK(a + 1.25 * a * a == doctest::Approx(v).epsilon(1e-10));
  }

  const DeltaTerms d = delta_terms(10, 2, std::log(2.0));
  CHECK(d.delta1 == doctest::Approx(1.5395603).epsilon(1e-5));
  CHECK(d.delta2 == doctest::Approx(0.8349544).epsilon(1e-5));

  const auto curves = theorem2_curves(0.2, 0.1, std::log(2.0), 2, {4, 8});
  REQUIRE(curves.size() == 2);
  CHECK(curves[0].n == 4);
  const DeltaTerms d4 = delta_terms(4, 2, std::log(2.0));
  CHECK(curves[0].error_bound ==
        doctest::Approx(std::exp(-4.0 * (0.2 - d4.delta1))).epsilon(1e-10));
  CHECK(curves[0].leakage_bound ==
        doctest::Approx(std::exp(-4.0 * (0.1 - d4.delta2))).epsilon(1e-10));
}

TEST_CASE("tilde family derivative and concavity report") {
  const Property2Report rep = property2_suite(bsc_model(0.1), 1234);
  CHECK(rep.pass);
  CHECK(rep.worst_c_low >= -1e-9);
  CHECK(rep.worst_c_high <= 1e-9);
  CHECK(rep.worst_d_first <= 1e-4);
  CHECK(rep.worst_d_second <= 1e-4);
  CHECK(rep.worst_concavity <= 1e-8);
  CHECK(rep.worst_e_margin >= -1e-6);
  CHECK(rep.rho > 0.0);
}
