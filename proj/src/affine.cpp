#include "pacsim/affine.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pacsim {

TieRule tie_rule_from_string(const std::string& s) {
  if (s == "declare-error") return TieRule::DeclareError;
  if (s == "lexicographic") return TieRule::Lexicographic;
  throw std::invalid_argument("unknown tie rule: " + s);
}

AffineEncoder::AffineEncoder(FieldMatrix matrix, FieldVector offset)
    : A(std::move(matrix)), b(std::move(offset)) {
  if (!(A.spec == b.spec))
    throw std::invalid_argument("encoder matrix/offset modulus mismatch");
  if (b.length() != A.cols())
    throw std::invalid_argument("encoder offset length must equal columns");
  if (A.cols() > A.rows())
    throw std::invalid_argument("affine encoder must compress: m <= n");
}

FieldVector encode_linear(const AffineEncoder& enc, const FieldVector& x) {
  return mat_apply(x, enc.A);
}

FieldVector encode_affine(const AffineEncoder& enc, const FieldVector& k) {
  return field_add(mat_apply(k, enc.A), enc.b);
}

int cols_for_rate(double R, int n, std::uint32_t q) {
  const int m = static_cast<int>(std::floor(n * R / std::log(double(q))));
  if (m < 1)
    throw std::invalid_argument("rate too small: m = floor(nR/ln q) is 0");
  return m;
}

std::optional<FieldVector> decode_min_entropy(const AffineEncoder& enc,
                                              const FieldVector& xtilde,
                                              TieRule rule,
                                              std::uint64_t cap) {
  const std::vector<FieldVector> coset = coset_preimages(enc.A, xtilde, cap);
  if (coset.empty()) return std::nullopt;
  std::size_t best = 0;
  bool tied = false;
  TypeClass best_type = type_of(coset[0]);
  for (std::size_t i = 1; i < coset.size(); ++i) {
    TypeClass t = type_of(coset[i]);
    const int cmp = compare_type_entropy(t, best_type);
    if (cmp < 0) {
      best = i;
      best_type = std::move(t);
      tied = false;
    } else if (cmp == 0) {
      tied = true;  // candidates are lexicographic, earlier one is kept
    }
  }
  if (tied && rule == TieRule::DeclareError) return std::nullopt;
  return coset[best];
}

DecodeTable::DecodeTable(const AffineEncoder& enc, TieRule rule,
                         std::uint64_t cap) {
  const std::uint64_t sources = pow_u64(enc.spec().modulus, enc.n());
  const std::uint64_t targets = pow_u64(enc.spec().modulus, enc.m());
  if (sources > cap) throw EnumCapExceeded(sources, cap);
  table_.assign(targets, -1);
  // One pass over all sources, tracking the entropy minimizer per coset.
  std::vector<bool> tied(targets, false);
  std::vector<std::optional<TypeClass>> best(targets);
  for (std::uint64_t i = 0; i < sources; ++i) {
    const FieldVector x = vector_from_index(i, enc.n(), enc.spec());
    const std::uint64_t t = index_of_vector(encode_linear(enc, x));
    TypeClass ty = type_of(x);
    if (!best[t]) {
      best[t] = std::move(ty);
      table_[t] = static_cast<std::int64_t>(i);
      continue;
    }
    const int cmp = compare_type_entropy(ty, *best[t]);
    if (cmp < 0) {
      best[t] = std::move(ty);
      table_[t] = static_cast<std::int64_t>(i);
      tied[t] = false;
    } else if (cmp == 0) {
      tied[t] = true;
    }
  }
  if (rule == TieRule::DeclareError)
    for (std::uint64_t t = 0; t < targets; ++t)
      if (tied[t]) table_[t] = -1;
}

int error_indicator(const AffineEncoder& enc, const DecodeTable& dec,
                    const FieldVector& x) {
  const std::uint64_t t = index_of_vector(encode_linear(enc, x));
  return dec.decoded(t) ==
                 static_cast<std::int64_t>(index_of_vector(x))
             ? 0
             : 1;
}

double xi_type(const AffineEncoder& enc, const DecodeTable& dec,
               const TypeClass& t, std::uint64_t cap) {
  const std::uint64_t sources = pow_u64(enc.spec().modulus, enc.n());
  if (sources > cap) throw EnumCapExceeded(sources, cap);
  std::uint64_t members = 0, errors = 0;
  for (std::uint64_t i = 0; i < sources; ++i) {
    const FieldVector x = vector_from_index(i, enc.n(), enc.spec());
    if (type_of(x).counts != t.counts) continue;
    ++members;
    errors += error_indicator(enc, dec, x);
  }
  if (members == 0) throw std::invalid_argument("empty type class");
  return static_cast<double>(errors) / static_cast<double>(members);
}

double error_prob_exact(const AffineEncoder& enc, const DecodeTable& dec,
                        const Distribution& p_X, std::uint64_t cap) {
  if (p_X.size() != static_cast<int>(enc.spec().modulus))
    throw std::invalid_argument("source alphabet must match field size");
  const std::uint64_t sources = pow_u64(enc.spec().modulus, enc.n());
  if (sources > cap) throw EnumCapExceeded(sources, cap);
  double pe = 0.0;
  for (std::uint64_t i = 0; i < sources; ++i) {
    const FieldVector x = vector_from_index(i, enc.n(), enc.spec());
    if (error_indicator(enc, dec, x) == 0) continue;
    double px = 1.0;
    for (int j = 0; j < x.length(); ++j) px *= p_X(x.entries[j]);
    pe += px;
  }
  return pe;
}

double error_prob_type_bound(const AffineEncoder& enc, const DecodeTable& dec,
                             const Distribution& p_X, std::uint64_t cap) {
  double bound = 0.0;
  for (const TypeClass& t :
       enumerate_types(enc.n(), static_cast<int>(enc.spec().modulus), cap)) {
    const double xi = xi_type(enc, dec, t, cap);
    if (xi == 0.0) continue;
    const double d = divergence(t.distribution(), p_X);
    if (d == kInfNats) continue;
    bound += xi * std::exp(-enc.n() * d);
  }
  const double exact = error_prob_exact(enc, dec, p_X, cap);
  if (exact > bound * (1.0 + 1e-9) + 1e-15)
    throw std::logic_error("exact error probability exceeds type bound");
  return bound;
}

std::vector<EnsembleTypeBound> ensemble_error_bound(
    int n, int m, FieldSpec spec, double R, TieRule rule,
    const EnsembleOptions& opts) {
  const int q = static_cast<int>(spec.modulus);
  const std::vector<TypeClass> types = enumerate_types(n, q, opts.cap);
  std::vector<double> sums(types.size(), 0.0), sq(types.size(), 0.0);
  std::uint64_t draws = 0;
  bool exact_mode = true;

  const auto accumulate = [&](const AffineEncoder& enc) {
    const DecodeTable dec(enc, rule, opts.cap);
    for (std::size_t ti = 0; ti < types.size(); ++ti) {
      const double xi = xi_type(enc, dec, types[ti], opts.cap);
      sums[ti] += xi;
      sq[ti] += xi * xi;
    }
    ++draws;
  };

  bool fits = true;
  try {
    pow_u64(spec.modulus, n * m + m);
  } catch (const std::overflow_error&) {
    fits = false;
  }
  if (fits && pow_u64(spec.modulus, n * m + m) <= opts.cap) {
    const AffineEnsemble ens(n, m, spec, opts.cap);
    for (std::uint64_t i = 0; i < ens.size(); ++i) {
      auto [A, b] = ens.at(i);
      accumulate(AffineEncoder(std::move(A), std::move(b)));
    }
  } else if (opts.mc_samples > 0) {
    exact_mode = false;
    StreamRng rng(opts.mc_seed);
    for (std::uint64_t i = 0; i < opts.mc_samples; ++i) {
      auto [A, b] = random_affine(n, m, spec, rng);
      accumulate(AffineEncoder(std::move(A), std::move(b)));
    }
  } else {
    throw EnumCapExceeded(pow_u64(spec.modulus, std::min(n * m + m, 64)),
                          opts.cap);
  }

  std::vector<EnsembleTypeBound> out;
  for (std::size_t ti = 0; ti < types.size(); ++ti) {
    const double mean = sums[ti] / static_cast<double>(draws);
    double ci = 0.0;
    if (!exact_mode) {
      const double var =
          std::max(0.0, sq[ti] / draws - mean * mean) / (draws - 1.0);
      ci = 3.0 * std::sqrt(var);
    }
    const double slack = std::max(0.0, R - type_entropy(types[ti]));
    const double bound =
        std::exp(1.0) * std::pow(n + 1.0, q) * std::exp(-n * slack);
    if (exact_mode && mean > bound * (1.0 + 1e-9))
      throw std::logic_error("ensemble average violates random-coding bound");
    out.push_back({types[ti], mean, ci, bound, exact_mode});
  }
  return out;
}

std::string encoder_to_text(const AffineEncoder& enc) {
  std::ostringstream os;
  os << enc.spec().modulus << ' ' << enc.n() << ' ' << enc.m() << '\n';
  for (int r = 0; r < enc.n(); ++r) {
    for (int c = 0; c < enc.m(); ++c)
      os << enc.A.entries(r, c) << (c + 1 == enc.m() ? '\n' : ' ');
  }
  for (int c = 0; c < enc.m(); ++c)
    os << enc.b.entries[c] << (c + 1 == enc.m() ? '\n' : ' ');
  return os.str();
}

AffineEncoder encoder_from_text(const std::string& text) {
  std::istringstream is(text);
  std::uint32_t p;
  int n, m;
  if (!(is >> p >> n >> m))
    throw std::invalid_argument("bad encoder text header");
  FieldSpec spec(p);
  Eigen::MatrixXi A(n, m);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < m; ++c)
      if (!(is >> A(r, c)))
        throw std::invalid_argument("bad encoder text matrix");
  Eigen::VectorXi b(m);
  for (int c = 0; c < m; ++c)
    if (!(is >> b[c])) throw std::invalid_argument("bad encoder text offset");
  return AffineEncoder(FieldMatrix(spec, std::move(A)),
                       FieldVector(spec, std::move(b)));
}

}  // namespace pacsim
