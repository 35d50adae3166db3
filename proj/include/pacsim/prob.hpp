#ifndef PACSIM_PROB_HPP
#define PACSIM_PROB_HPP

#include <Eigen/Dense>
#include <limits>
#include <span>
#include <vector>

namespace pacsim {

inline constexpr double kProbTolerance = 1e-12;
inline constexpr double kInfNats = std::numeric_limits<double>::infinity();

/// 0*ln(0) = 0 convention.
inline double xlogx(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

/// Probability vector. Construction validates (nonnegative, sums to one
/// within kProbTolerance); it never renormalizes.
class Distribution {
 public:
  explicit Distribution(Eigen::VectorXd probs);
  static Distribution uniform(int q);
  static Distribution point_mass(int q, int atom);

  int size() const { return static_cast<int>(p_.size()); }
  double operator()(int i) const { return p_[i]; }
  const Eigen::VectorXd& probs() const { return p_; }

 private:
  Eigen::VectorXd p_;
};

/// Stochastic kernel: one Distribution-valid row per input symbol.
class Channel {
 public:
  explicit Channel(Eigen::MatrixXd rows);
  static Channel binary_symmetric(double crossover);
  static Channel identity(int q);

  int input_size() const { return static_cast<int>(rows_.rows()); }
  int output_size() const { return static_cast<int>(rows_.cols()); }
  double operator()(int out, int in) const { return rows_(in, out); }
  Distribution row(int in) const { return Distribution(rows_.row(in)); }
  const Eigen::MatrixXd& rows() const { return rows_; }

  Distribution output_distribution(const Distribution& input) const;

 private:
  Eigen::MatrixXd rows_;
};

/// Dense joint law over a small product alphabet. Flat row-major table;
/// the last axis varies fastest.
class JointDistribution {
 public:
  JointDistribution(std::vector<int> shape, Eigen::VectorXd table);
  static JointDistribution from_unnormalized(std::vector<int> shape,
                                             Eigen::VectorXd table);

  const std::vector<int>& shape() const { return shape_; }
  int axes() const { return static_cast<int>(shape_.size()); }
  std::int64_t atoms() const { return table_.size(); }
  double at_flat(std::int64_t i) const { return table_[i]; }
  const Eigen::VectorXd& table() const { return table_; }

  std::int64_t flat_index(std::span<const int> idx) const;
  void unflatten(std::int64_t flat, std::span<int> idx) const;

  JointDistribution marginal(std::span<const int> keep_axes) const;

 private:
  std::vector<int> shape_;
  std::vector<std::int64_t> strides_;
  Eigen::VectorXd table_;
};

double entropy(const Distribution& d);
double entropy(const JointDistribution& j);

/// H(axes_a | axes_b), both given as axis lists of the joint.
double conditional_entropy(const JointDistribution& j,
                           std::span<const int> axes_a,
                           std::span<const int> axes_b);

/// I(axes_a ; axes_b). Nonnegative up to rounding.
double mutual_information(const JointDistribution& j,
                          std::span<const int> axes_a,
                          std::span<const int> axes_b);

/// D(p || q) in nats; +infinity iff supp(p) is not within supp(q).
double divergence(const Distribution& p, const Distribution& q);

/// sum_b pB(b) D(pAgivenB(.|b) || qA).
double conditional_divergence(const Channel& pAgivenB, const Distribution& qA,
                              const Distribution& pB);

}  // namespace pacsim

#endif  // PACSIM_PROB_HPP
