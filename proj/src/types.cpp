#include "pacsim/types.hpp"

#include <cmath>
#include <stdexcept>

namespace pacsim {

TypeClass::TypeClass(Eigen::VectorXi c, int block_len)
    : counts(std::move(c)), n(block_len) {
  if (n < 1) throw std::invalid_argument("block length must be positive");
  int sum = 0;
  for (int i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) throw std::invalid_argument("negative type count");
    sum += counts[i];
  }
  if (sum != n) throw std::invalid_argument("type counts do not sum to n");
}

Distribution TypeClass::distribution() const {
  return Distribution(counts.cast<double>() / static_cast<double>(n));
}

TypeClass type_of(const FieldVector& x) {
  return type_of_sequence(x.entries, static_cast<int>(x.spec.modulus));
}

TypeClass type_of_sequence(const Eigen::VectorXi& seq, int alphabet_size) {
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(alphabet_size);
  for (int i = 0; i < seq.size(); ++i) counts[seq[i]] += 1;
  return TypeClass(std::move(counts), static_cast<int>(seq.size()));
}

double type_entropy(const TypeClass& t) {
  // H = ln n - (1/n) sum c ln c
  double s = 0.0;
  for (int i = 0; i < t.counts.size(); ++i)
    s += xlogx(static_cast<double>(t.counts[i]));
  return std::log(static_cast<double>(t.n)) - s / t.n;
}

int compare_type_entropy(const TypeClass& a, const TypeClass& b) {
  if (a.n != b.n)
    throw std::invalid_argument("entropy comparison needs equal block length");
  // H smaller <=> prod c^c larger; exact integer comparison.
  BigInt pa = 1, pb = 1;
  for (int i = 0; i < a.counts.size(); ++i)
    if (a.counts[i] > 1) pa *= boost::multiprecision::pow(BigInt(a.counts[i]),
                                                          a.counts[i]);
  for (int i = 0; i < b.counts.size(); ++i)
    if (b.counts[i] > 1) pb *= boost::multiprecision::pow(BigInt(b.counts[i]),
                                                          b.counts[i]);
  if (pa > pb) return -1;
  if (pa < pb) return 1;
  return 0;
}

std::vector<TypeClass> enumerate_types(int n, int alphabet_size,
                                       std::uint64_t cap) {
  if (alphabet_size < 1 || n < 1)
    throw std::invalid_argument("bad enumerate_types arguments");
  std::vector<TypeClass> out;
  Eigen::VectorXi current = Eigen::VectorXi::Zero(alphabet_size);
  // Lexicographic composition walk.
  std::uint64_t produced = 0;
  const auto recurse = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == alphabet_size - 1) {
      current[pos] = remaining;
      if (++produced > cap) throw EnumCapExceeded(produced, cap);
      out.emplace_back(current, n);
      return;
    }
    for (int c = remaining; c >= 0; --c) {
      current[pos] = c;
      self(self, pos + 1, remaining - c);
    }
  };
  recurse(recurse, 0, n);
  // |P_n(X)| <= (n+1)^|X|
  double bound = std::pow(n + 1.0, alphabet_size);
  if (static_cast<double>(out.size()) > bound)
    throw std::logic_error("type count exceeds (n+1)^|X|");
  return out;
}

BigInt type_class_size(const TypeClass& t) {
  BigInt size = 1;
  int placed = 0;
  for (int i = 0; i < t.counts.size(); ++i) {
    // running product of binomial(placed + c, c)
    for (int j = 1; j <= t.counts[i]; ++j) {
      ++placed;
      size = size * placed / j;
    }
  }
  const double h = type_entropy(t);
  const double upper = std::exp(t.n * h);
  const double lower =
      std::pow(t.n + 1.0, -t.alphabet_size()) * std::exp(t.n * h);
  const double sz = size.convert_to<double>();
  if (sz > upper * (1.0 + 1e-9) || sz < lower * (1.0 - 1e-9))
    throw std::logic_error("type class size violates entropy sandwich");
  return size;
}

TypeProbBound typeclass_prob_bound(const TypeClass& t, const Distribution& p) {
  if (t.alphabet_size() != p.size())
    throw std::invalid_argument("type/distribution alphabet mismatch");
  const BigInt size = type_class_size(t);
  double log_single = 0.0;  // ln prod p(x)^{n(x)}
  bool impossible = false;
  for (int i = 0; i < p.size(); ++i) {
    if (t.counts[i] == 0) continue;
    if (p(i) == 0.0) {
      impossible = true;
      break;
    }
    log_single += t.counts[i] * std::log(p(i));
  }
  const double exact =
      impossible ? 0.0 : size.convert_to<double>() * std::exp(log_single);
  const double d = divergence(t.distribution(), p);
  const double bound = d == kInfNats ? 0.0 : std::exp(-t.n * d);
  if (exact > bound * (1.0 + 1e-9))
    throw std::logic_error("type class probability exceeds divergence bound");
  return {exact, bound};
}

}  // namespace pacsim
