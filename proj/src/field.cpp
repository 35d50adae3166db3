#include "pacsim/field.hpp"

#include <string>

namespace pacsim {

EnumCapExceeded::EnumCapExceeded(std::uint64_t required, std::uint64_t cap)
    : std::runtime_error("enumeration would require " +
                         std::to_string(required) + " states, cap is " +
                         std::to_string(cap)),
      required_(required) {}

namespace {

bool is_prime(std::uint32_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

void require_same_shape(const FieldVector& a, const FieldVector& b) {
  if (!(a.spec == b.spec))
    throw std::invalid_argument("field vectors have different moduli");
  if (a.length() != b.length())
    throw std::invalid_argument("field vectors have different lengths");
}

}  // namespace

FieldSpec::FieldSpec(std::uint32_t p) : modulus(p) {
  if (!is_prime(p))
    throw std::invalid_argument("field modulus " + std::to_string(p) +
                                " is not prime");
}

FieldVector::FieldVector(FieldSpec s, Eigen::VectorXi e)
    : spec(s), entries(std::move(e)) {
  const int p = static_cast<int>(spec.modulus);
  for (int i = 0; i < entries.size(); ++i)
    if (entries[i] < 0 || entries[i] >= p)
      throw std::invalid_argument("field vector entry out of range");
}

FieldVector FieldVector::zero(FieldSpec s, int len) {
  return FieldVector(s, Eigen::VectorXi::Zero(len));
}

FieldMatrix::FieldMatrix(FieldSpec s, Eigen::MatrixXi e)
    : spec(s), entries(std::move(e)) {
  if (entries.rows() < 1 || entries.cols() < 1)
    throw std::invalid_argument("field matrix dimensions must be positive");
  const int p = static_cast<int>(spec.modulus);
  for (int r = 0; r < entries.rows(); ++r)
    for (int c = 0; c < entries.cols(); ++c)
      if (entries(r, c) < 0 || entries(r, c) >= p)
        throw std::invalid_argument("field matrix entry out of range");
}

FieldVector field_add(const FieldVector& a, const FieldVector& b) {
  require_same_shape(a, b);
  const int p = static_cast<int>(a.spec.modulus);
  Eigen::VectorXi out = a.entries + b.entries;
  for (int i = 0; i < out.size(); ++i) out[i] %= p;
  return FieldVector(a.spec, std::move(out));
}

FieldVector field_sub(const FieldVector& a, const FieldVector& b) {
  require_same_shape(a, b);
  const int p = static_cast<int>(a.spec.modulus);
  Eigen::VectorXi out = a.entries - b.entries;
  for (int i = 0; i < out.size(); ++i) out[i] = ((out[i] % p) + p) % p;
  return FieldVector(a.spec, std::move(out));
}

FieldVector mat_apply(const FieldVector& x, const FieldMatrix& A) {
  if (!(x.spec == A.spec))
    throw std::invalid_argument("vector/matrix modulus mismatch");
  if (x.length() != A.rows())
    throw std::invalid_argument("vector length does not match matrix rows");
  const std::int64_t p = A.spec.modulus;
  Eigen::VectorXi out(A.cols());
  for (int c = 0; c < A.cols(); ++c) {
    std::int64_t acc = 0;
    for (int r = 0; r < A.rows(); ++r) {
      acc += static_cast<std::int64_t>(x.entries[r]) * A.entries(r, c);
    }
    out[c] = static_cast<int>(acc % p);
  }
  return FieldVector(A.spec, std::move(out));
}

std::pair<FieldMatrix, FieldVector> random_affine(int n, int m, FieldSpec spec,
                                                  StreamRng& rng) {
  if (n < 1 || m < 1) throw std::invalid_argument("n, m must be >= 1");
  Eigen::MatrixXi A(n, m);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c)
      A(r, c) = static_cast<int>(rng.next_below(spec.modulus));
  Eigen::VectorXi b(m);
  for (int c = 0; c < m; ++c)
    b[c] = static_cast<int>(rng.next_below(spec.modulus));
  return {FieldMatrix(spec, std::move(A)), FieldVector(spec, std::move(b))};
}

std::uint64_t pow_u64(std::uint32_t base, int exponent) {
  std::uint64_t out = 1;
  for (int i = 0; i < exponent; ++i) {
    if (out > UINT64_MAX / base) throw std::overflow_error("pow_u64 overflow");
    out *= base;
  }
  return out;
}

FieldVector vector_from_index(std::uint64_t index, int len, FieldSpec spec) {
  Eigen::VectorXi e(len);
  for (int i = len - 1; i >= 0; --i) {
    e[i] = static_cast<int>(index % spec.modulus);
    index /= spec.modulus;
  }
  return FieldVector(spec, std::move(e));
}

std::uint64_t index_of_vector(const FieldVector& v) {
  std::uint64_t idx = 0;
  for (int i = 0; i < v.length(); ++i)
    idx = idx * v.spec.modulus + static_cast<std::uint64_t>(v.entries[i]);
  return idx;
}

AffineEnsemble::AffineEnsemble(int n, int m, FieldSpec spec, std::uint64_t cap)
    : n_(n), m_(m), spec_(spec), size_(0) {
  if (n < 1 || m < 1) throw std::invalid_argument("n, m must be >= 1");
  const std::uint64_t states = pow_u64(spec.modulus, n * m + m);
  if (states > cap) throw EnumCapExceeded(states, cap);
  size_ = states;
}

std::pair<FieldMatrix, FieldVector> AffineEnsemble::at(
    std::uint64_t index) const {
  if (index >= size_) throw std::out_of_range("ensemble index out of range");
  const std::uint64_t b_states = pow_u64(spec_.modulus, m_);
  const std::uint64_t a_index = index / b_states;
  const std::uint64_t b_index = index % b_states;
  FieldVector flat = vector_from_index(a_index, n_ * m_, spec_);
  Eigen::MatrixXi A(n_, m_);
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < m_; ++c) A(r, c) = flat.entries[r * m_ + c];
  return {FieldMatrix(spec_, std::move(A)),
          vector_from_index(b_index, m_, spec_)};
}

std::vector<FieldVector> coset_preimages(const FieldMatrix& A,
                                         const FieldVector& target,
                                         std::uint64_t cap) {
  if (!(A.spec == target.spec))
    throw std::invalid_argument("matrix/target modulus mismatch");
  if (target.length() != A.cols())
    throw std::invalid_argument("target length does not match matrix cols");
  const std::uint64_t states = pow_u64(A.spec.modulus, A.rows());
  if (states > cap) throw EnumCapExceeded(states, cap);
  std::vector<FieldVector> out;
  for (std::uint64_t i = 0; i < states; ++i) {
    FieldVector x = vector_from_index(i, A.rows(), A.spec);
    if (mat_apply(x, A) == target) out.push_back(std::move(x));
  }
  return out;
}

}  // namespace pacsim
