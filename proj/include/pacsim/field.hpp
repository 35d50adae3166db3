#ifndef PACSIM_FIELD_HPP
#define PACSIM_FIELD_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pacsim/rng.hpp"

namespace pacsim {

/// Default ceiling for exhaustive enumerations (ensemble sweeps, coset
/// listings). Oracles that would exceed it throw instead of hanging.
inline constexpr std::uint64_t kDefaultEnumCap = std::uint64_t{1} << 24;

class EnumCapExceeded : public std::runtime_error {
 public:
  EnumCapExceeded(std::uint64_t required, std::uint64_t cap);
  std::uint64_t required() const { return required_; }

 private:
  std::uint64_t required_;
};

/// Prime field GF(p). Primality is checked at construction.
struct FieldSpec {
  std::uint32_t modulus;

  explicit FieldSpec(std::uint32_t p);
  bool operator==(const FieldSpec& o) const { return modulus == o.modulus; }
};

/// Row vector with entries in [0, p).
struct FieldVector {
  FieldSpec spec;
  Eigen::VectorXi entries;

  FieldVector(FieldSpec s, Eigen::VectorXi e);
  static FieldVector zero(FieldSpec s, int len);
  int length() const { return static_cast<int>(entries.size()); }
  bool operator==(const FieldVector& o) const {
    return spec == o.spec && entries == o.entries;
  }
};

struct FieldMatrix {
  FieldSpec spec;
  Eigen::MatrixXi entries;  // n rows, m cols

  FieldMatrix(FieldSpec s, Eigen::MatrixXi e);
  int rows() const { return static_cast<int>(entries.rows()); }
  int cols() const { return static_cast<int>(entries.cols()); }
};

FieldVector field_add(const FieldVector& a, const FieldVector& b);
FieldVector field_sub(const FieldVector& a, const FieldVector& b);

/// Row-vector times matrix over GF(p): x (1xn) * A (nxm) -> 1xm.
FieldVector mat_apply(const FieldVector& x, const FieldMatrix& A);

/// Uniform i.i.d. entries for the pair (A, b).
std::pair<FieldMatrix, FieldVector> random_affine(int n, int m, FieldSpec spec,
                                                  StreamRng& rng);

/// p^len, throwing if it would not fit a u64.
std::uint64_t pow_u64(std::uint32_t base, int exponent);

/// Mixed-radix codec between sequence indices and field vectors.
/// Index 0 is the all-zero vector; the last coordinate varies fastest.
FieldVector vector_from_index(std::uint64_t index, int len, FieldSpec spec);
std::uint64_t index_of_vector(const FieldVector& v);

/// All (A, b) pairs, materialized. Throws EnumCapExceeded when
/// p^(nm+m) > cap.
class AffineEnsemble {
 public:
  AffineEnsemble(int n, int m, FieldSpec spec,
                 std::uint64_t cap = kDefaultEnumCap);
  std::uint64_t size() const { return size_; }
  std::pair<FieldMatrix, FieldVector> at(std::uint64_t index) const;

 private:
  int n_, m_;
  FieldSpec spec_;
  std::uint64_t size_;
};

inline AffineEnsemble exhaust_affine(int n, int m, FieldSpec spec,
                                     std::uint64_t cap = kDefaultEnumCap) {
  return AffineEnsemble(n, m, spec, cap);
}

/// The solution set {x : xA = target}; empty when target is outside the
/// image of A. Enumerates all p^n candidates.
std::vector<FieldVector> coset_preimages(const FieldMatrix& A,
                                         const FieldVector& target,
                                         std::uint64_t cap = kDefaultEnumCap);

}  // namespace pacsim

#endif  // PACSIM_FIELD_HPP
