#include <doctest.h>

#include <map>
#include <set>

#include "pacsim/field.hpp"

using namespace pacsim;

TEST_CASE("field spec accepts primes only") {
  for (std::uint32_t p : {2u, 3u, 5u, 7u, 11u, 13u}) CHECK(FieldSpec(p).modulus == p);
  for (std::uint32_t p : {0u, 1u, 4u, 6u, 8u, 9u, 12u})
    CHECK_THROWS_AS(FieldSpec{p}, std::invalid_argument);
}

TEST_CASE("pow_u64 small values and overflow") {
  CHECK(pow_u64(2, 0) == 1);
  CHECK(pow_u64(2, 10) == 1024);
  CHECK(pow_u64(3, 4) == 81);
  CHECK(pow_u64(2, 63) == (std::uint64_t{1} << 63));
  CHECK_THROWS(pow_u64(2, 64));
  CHECK_THROWS(pow_u64(3, 50));
}

TEST_CASE("index codec is a bijection with the last coordinate fastest") {
  for (std::uint32_t p : {2u, 3u, 5u}) {
    const FieldSpec spec(p);
    const int n = 3;
    const std::uint64_t total = pow_u64(p, n);
    std::set<std::string> seen;
    for (std::uint64_t i = 0; i < total; ++i) {
      const FieldVector v = vector_from_index(i, n, spec);
      CHECK(index_of_vector(v) == i);
      for (int j = 0; j < n; ++j) CHECK(v.entries[j] < static_cast<int>(p));
    }
    // index 0 is the zero vector; index 1 bumps the last coordinate.
    CHECK(vector_from_index(0, n, spec) == FieldVector::zero(spec, n));
    const FieldVector one = vector_from_index(1, n, spec);
    CHECK(one.entries[n - 1] == 1);
    CHECK(one.entries[0] == 0);
    // index p flips the middle coordinate.
    const FieldVector vp = vector_from_index(p, n, spec);
    CHECK(vp.entries[n - 2] == 1);
    CHECK(vp.entries[n - 1] == 0);
  }
}

TEST_CASE("add/sub round trip and mat_apply linearity over GF(5)") {
  const FieldSpec spec(5);
  StreamRng rng(99, 1);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXi ae(4), be(4);
    for (int i = 0; i < 4; ++i) {
      ae[i] = static_cast<int>(rng.next_below(5));
      be[i] = static_cast<int>(rng.next_below(5));
    }
    const FieldVector a(spec, ae), b(spec, be);
    CHECK(field_sub(field_add(a, b), b) == a);
    CHECK(field_add(field_sub(a, b), b) == a);

    auto [A, off] = random_affine(4, 3, spec, rng);
    const FieldVector lhs = mat_apply(field_add(a, b), A);
    const FieldVector rhs = field_add(mat_apply(a, A), mat_apply(b, A));
    CHECK(lhs == rhs);
  }
}

TEST_CASE("mat_apply against a hand-multiplied GF(3) product") {
  const FieldSpec spec(3);
  Eigen::MatrixXi Ae(3, 2);
  Ae << 1, 2, 0, 1, 2, 2;
  Eigen::VectorXi xe(3);
  xe << 2, 1, 2;
  const FieldVector y = mat_apply(FieldVector(spec, xe), FieldMatrix(spec, Ae));
  // (2*1 + 1*0 + 2*2, 2*2 + 1*1 + 2*2) = (6, 9) = (0, 0) mod 3
  CHECK(y.entries[0] == 0);
  CHECK(y.entries[1] == 0);
}

TEST_CASE("affine ensemble enumerates every pair exactly once") {
  const FieldSpec spec(2);
  const AffineEnsemble ens(2, 1, spec);
  CHECK(ens.size() == 8);  // 2^(2*1 + 1)
  std::set<std::pair<std::uint64_t, std::uint64_t>> seen;
  for (std::uint64_t i = 0; i < ens.size(); ++i) {
    auto [A, b] = ens.at(i);
    std::uint64_t akey = 0;
    for (int r = 0; r < A.rows(); ++r)
      for (int c = 0; c < A.cols(); ++c) akey = akey * 2 + A.entries(r, c);
    seen.insert({akey, index_of_vector(b)});
  }
  CHECK(seen.size() == 8);
  CHECK_THROWS_AS(AffineEnsemble(5, 5, spec, 1 << 10), EnumCapExceeded);
}

TEST_CASE("coset preimages partition the source space") {
  const FieldSpec spec(2);
  Eigen::MatrixXi Ae(3, 2);
  Ae << 1, 0, 1, 1, 0, 1;
  const FieldMatrix A(spec, Ae);
  std::set<std::uint64_t> covered;
  for (std::uint64_t t = 0; t < 4; ++t) {
    const FieldVector target = vector_from_index(t, 2, spec);
    for (const FieldVector& x : coset_preimages(A, target)) {
      CHECK(mat_apply(x, A) == target);
      CHECK(covered.insert(index_of_vector(x)).second);
    }
  }
  CHECK(covered.size() == 8);

  // A zero map misses every nonzero target.
  const FieldMatrix Z(spec, Eigen::MatrixXi::Zero(3, 2));
  CHECK(coset_preimages(Z, vector_from_index(1, 2, spec)).empty());
  CHECK(coset_preimages(Z, vector_from_index(0, 2, spec)).size() == 8);
}

TEST_CASE("uniform offset collisions: exhaustive counts over a small ensemble") {
  // Over all (A, b): a fixed source hits each target with count size/p^m,
  // and a fixed ordered pair of distinct sources hits each target pair
  // with count size/p^{2m}.
  for (std::uint32_t p : {2u, 3u}) {
    const FieldSpec spec(p);
    const int n = 2, m = 1;
    const AffineEnsemble ens(n, m, spec);
    const std::uint64_t sources = pow_u64(p, n), targets = pow_u64(p, m);
    std::map<std::pair<std::uint64_t, std::uint64_t>, std::uint64_t> single;
    std::map<std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t>,
             std::uint64_t>
        paired;
    for (std::uint64_t i = 0; i < ens.size(); ++i) {
      auto [A, b] = ens.at(i);
      for (std::uint64_t s = 0; s < sources; ++s) {
        const FieldVector xs = vector_from_index(s, n, spec);
        const std::uint64_t ts = index_of_vector(field_add(mat_apply(xs, A), b));
        ++single[{s, ts}];
        for (std::uint64_t v = 0; v < sources; ++v) {
          if (v == s) continue;
          const FieldVector xv = vector_from_index(v, n, spec);
          const std::uint64_t tv =
              index_of_vector(field_add(mat_apply(xv, A), b));
          ++paired[{s, v, ts, tv}];
        }
      }
    }
    for (std::uint64_t s = 0; s < sources; ++s)
      for (std::uint64_t t = 0; t < targets; ++t)
        CHECK(single[{s, t}] == ens.size() / targets);
    for (std::uint64_t s = 0; s < sources; ++s)
      for (std::uint64_t v = 0; v < sources; ++v) {
        if (v == s) continue;
        for (std::uint64_t ts = 0; ts < targets; ++ts)
          for (std::uint64_t tv = 0; tv < targets; ++tv)
            CHECK(paired[{s, v, ts, tv}] == ens.size() / (targets * targets));
      }
  }
}

TEST_CASE("random_affine is deterministic per seed and in range") {
  const FieldSpec spec(3);
  StreamRng r1(42, 5), r2(42, 5), r3(43, 5);
  auto [A1, b1] = random_affine(3, 2, spec, r1);
  auto [A2, b2] = random_affine(3, 2, spec, r2);
  auto [A3, b3] = random_affine(3, 2, spec, r3);
  CHECK(A1.entries == A2.entries);
  CHECK(b1 == b2);
  CHECK((A1.entries.array() >= 0).all());
  CHECK((A1.entries.array() < 3).all());
  CHECK((A1.entries != A3.entries || !(b1 == b3)));
}
