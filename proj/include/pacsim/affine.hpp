#ifndef PACSIM_AFFINE_HPP
#define PACSIM_AFFINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "pacsim/field.hpp"
#include "pacsim/prob.hpp"
#include "pacsim/types.hpp"

namespace pacsim {

/// Tie handling for the minimum-entropy decoder. The strict-minimum rule
/// leaves ties unresolved; DeclareError reports failure, Lexicographic
/// picks the smallest coset member.
enum class TieRule { DeclareError, Lexicographic };

TieRule tie_rule_from_string(const std::string& s);

/// Compressing map pair: linear part x -> xA, affine part k -> kA + b.
struct AffineEncoder {
  FieldMatrix A;
  FieldVector b;

  AffineEncoder(FieldMatrix matrix, FieldVector offset);
  int n() const { return A.rows(); }
  int m() const { return A.cols(); }
  FieldSpec spec() const { return A.spec; }
};

FieldVector encode_linear(const AffineEncoder& enc, const FieldVector& x);
FieldVector encode_affine(const AffineEncoder& enc, const FieldVector& k);

/// m = floor(nR / ln q). Rejects the degenerate m = 0.
int cols_for_rate(double R, int n, std::uint32_t q);

std::optional<FieldVector> decode_min_entropy(const AffineEncoder& enc,
                                              const FieldVector& xtilde,
                                              TieRule rule,
                                              std::uint64_t cap =
                                                  kDefaultEnumCap);

/// Per-target decode results indexed by target index; -1 marks a
/// declared failure. Built once, reused by the sweeps below.
class DecodeTable {
 public:
  DecodeTable(const AffineEncoder& enc, TieRule rule,
              std::uint64_t cap = kDefaultEnumCap);
  /// Decoded source index for target index, or -1.
  std::int64_t decoded(std::uint64_t target_index) const {
    return table_[target_index];
  }
  std::uint64_t targets() const { return table_.size(); }

 private:
  std::vector<std::int64_t> table_;
};

int error_indicator(const AffineEncoder& enc, const DecodeTable& dec,
                    const FieldVector& x);

/// Fraction of the type class that fails to round-trip.
double xi_type(const AffineEncoder& enc, const DecodeTable& dec,
               const TypeClass& t, std::uint64_t cap = kDefaultEnumCap);

double error_prob_exact(const AffineEncoder& enc, const DecodeTable& dec,
                        const Distribution& p_X,
                        std::uint64_t cap = kDefaultEnumCap);

/// Sum over types of Xi_type * e^{-nD(type||p_X)}; checked against the
/// exact probability.
double error_prob_type_bound(const AffineEncoder& enc, const DecodeTable& dec,
                             const Distribution& p_X,
                             std::uint64_t cap = kDefaultEnumCap);

struct EnsembleTypeBound {
  TypeClass type;
  double mean_xi;      // ensemble average of Xi_type (exact or estimated)
  double ci_half;      // 0 in exact mode; 3-sigma half width in MC mode
  double bound;        // e (n+1)^|X| e^{-n[R - H(type)]^+}
  bool exact;
};

struct EnsembleOptions {
  std::uint64_t cap = kDefaultEnumCap;
  // Monte Carlo fallback when the ensemble exceeds the cap.
  std::uint64_t mc_samples = 0;
  std::uint64_t mc_seed = 0;
};

/// Ensemble average of Xi_type per type, against the random-coding
/// bound at rate R. Exhaustive when p^(nm+m) fits the cap, Monte Carlo
/// when sample count is given.
std::vector<EnsembleTypeBound> ensemble_error_bound(
    int n, int m, FieldSpec spec, double R, TieRule rule,
    const EnsembleOptions& opts = {});

/// Text form "p n m / A rows / b" for golden files.
std::string encoder_to_text(const AffineEncoder& enc);
AffineEncoder encoder_from_text(const std::string& text);

}  // namespace pacsim

#endif  // PACSIM_AFFINE_HPP
