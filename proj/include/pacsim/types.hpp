#ifndef PACSIM_TYPES_HPP
#define PACSIM_TYPES_HPP

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <vector>

#include "pacsim/field.hpp"
#include "pacsim/prob.hpp"

namespace pacsim {

using BigInt = boost::multiprecision::cpp_int;

/// Empirical type of a block of length n: per-symbol counts summing to n.
struct TypeClass {
  Eigen::VectorXi counts;
  int n;

  TypeClass(Eigen::VectorXi c, int block_len);
  int alphabet_size() const { return static_cast<int>(counts.size()); }
  Distribution distribution() const;
};

TypeClass type_of(const FieldVector& x);
TypeClass type_of_sequence(const Eigen::VectorXi& seq, int alphabet_size);

/// H of the empirical distribution, in nats.
double type_entropy(const TypeClass& t);

/// Strict entropy order on types of a common (n, alphabet), decided
/// exactly: H(a) < H(b) iff prod c_i^{c_i} is larger for a. Returns
/// -1 / 0 / +1 for H(a) < / = / > H(b).
int compare_type_entropy(const TypeClass& a, const TypeClass& b);

/// All compositions of n into alphabet_size parts.
std::vector<TypeClass> enumerate_types(int n, int alphabet_size,
                                       std::uint64_t cap = kDefaultEnumCap);

/// Exact multinomial |T^n_t|. Verifies the entropy sandwich
/// (n+1)^-|X| e^{nH} <= |T| <= e^{nH} as a self-check.
BigInt type_class_size(const TypeClass& t);

struct TypeProbBound {
  double exact;  // p^n(T^n_t)
  double bound;  // e^{-n D(t || p)}
};

/// Exact probability of the whole type class under p^n, and its
/// divergence upper bound; checks exact <= bound.
TypeProbBound typeclass_prob_bound(const TypeClass& t, const Distribution& p);

}  // namespace pacsim

#endif  // PACSIM_TYPES_HPP
