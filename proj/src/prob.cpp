#include "pacsim/prob.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pacsim {

namespace {

void validate_probability_row(const Eigen::VectorXd& p, const char* what) {
  if (p.size() < 1) throw std::invalid_argument(std::string(what) + " is empty");
  for (int i = 0; i < p.size(); ++i)
    if (!(p[i] >= 0.0))
      throw std::invalid_argument(std::string(what) +
                                  " has a negative or NaN entry");
  const double sum = p.sum();
  if (std::abs(sum - 1.0) > kProbTolerance)
    throw std::invalid_argument(std::string(what) + " sums to " +
                                std::to_string(sum) + ", not 1");
}

}  // namespace

Distribution::Distribution(Eigen::VectorXd probs) : p_(std::move(probs)) {
  validate_probability_row(p_, "distribution");
}

Distribution Distribution::uniform(int q) {
  return Distribution(Eigen::VectorXd::Constant(q, 1.0 / q));
}

Distribution Distribution::point_mass(int q, int atom) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(q);
  p[atom] = 1.0;
  return Distribution(std::move(p));
}

Channel::Channel(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
  if (rows_.rows() < 1 || rows_.cols() < 1)
    throw std::invalid_argument("channel must have positive dimensions");
  for (int r = 0; r < rows_.rows(); ++r)
    validate_probability_row(rows_.row(r), "channel row");
}

Channel Channel::binary_symmetric(double crossover) {
  Eigen::MatrixXd m(2, 2);
  m << 1.0 - crossover, crossover, crossover, 1.0 - crossover;
  return Channel(std::move(m));
}

Channel Channel::identity(int q) {
  return Channel(Eigen::MatrixXd::Identity(q, q));
}

Distribution Channel::output_distribution(const Distribution& input) const {
  if (input.size() != input_size())
    throw std::invalid_argument("channel input size mismatch");
  return Distribution(rows_.transpose() * input.probs());
}

JointDistribution::JointDistribution(std::vector<int> shape,
                                     Eigen::VectorXd table)
    : shape_(std::move(shape)), table_(std::move(table)) {
  std::int64_t expect = 1;
  for (int s : shape_) {
    if (s < 1) throw std::invalid_argument("joint axis size must be positive");
    expect *= s;
  }
  if (expect != table_.size())
    throw std::invalid_argument("joint table size does not match shape");
  validate_probability_row(table_, "joint distribution");
  strides_.assign(shape_.size(), 1);
  for (int a = static_cast<int>(shape_.size()) - 2; a >= 0; --a)
    strides_[a] = strides_[a + 1] * shape_[a + 1];
}

JointDistribution JointDistribution::from_unnormalized(std::vector<int> shape,
                                                       Eigen::VectorXd table) {
  const double sum = table.sum();
  if (!(sum > 0.0))
    throw std::invalid_argument("unnormalized joint has zero mass");
  table /= sum;
  return JointDistribution(std::move(shape), std::move(table));
}

std::int64_t JointDistribution::flat_index(std::span<const int> idx) const {
  std::int64_t flat = 0;
  for (std::size_t a = 0; a < shape_.size(); ++a) flat += idx[a] * strides_[a];
  return flat;
}

void JointDistribution::unflatten(std::int64_t flat,
                                  std::span<int> idx) const {
  for (std::size_t a = 0; a < shape_.size(); ++a) {
    idx[a] = static_cast<int>(flat / strides_[a]);
    flat %= strides_[a];
  }
}

JointDistribution JointDistribution::marginal(
    std::span<const int> keep_axes) const {
  std::vector<int> out_shape;
  for (int a : keep_axes) out_shape.push_back(shape_.at(a));
  std::int64_t out_size = 1;
  for (int s : out_shape) out_size *= s;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(out_size);
  std::vector<int> idx(shape_.size());
  for (std::int64_t f = 0; f < table_.size(); ++f) {
    if (table_[f] == 0.0) continue;
    unflatten(f, idx);
    std::int64_t of = 0;
    for (int a : keep_axes) of = of * shape_[a] + idx[a];
    out[of] += table_[f];
  }
  return JointDistribution(std::move(out_shape), std::move(out));
}

double entropy(const Distribution& d) {
  double h = 0.0;
  for (int i = 0; i < d.size(); ++i) h -= xlogx(d(i));
  return h;
}

double entropy(const JointDistribution& j) {
  double h = 0.0;
  for (std::int64_t i = 0; i < j.atoms(); ++i) h -= xlogx(j.at_flat(i));
  return h;
}

double conditional_entropy(const JointDistribution& j,
                           std::span<const int> axes_a,
                           std::span<const int> axes_b) {
  std::vector<int> both(axes_a.begin(), axes_a.end());
  both.insert(both.end(), axes_b.begin(), axes_b.end());
  return entropy(j.marginal(both)) -
         entropy(j.marginal(std::vector<int>(axes_b.begin(), axes_b.end())));
}

double mutual_information(const JointDistribution& j,
                          std::span<const int> axes_a,
                          std::span<const int> axes_b) {
  std::vector<int> both(axes_a.begin(), axes_a.end());
  both.insert(both.end(), axes_b.begin(), axes_b.end());
  return entropy(j.marginal(std::vector<int>(axes_a.begin(), axes_a.end()))) +
         entropy(j.marginal(std::vector<int>(axes_b.begin(), axes_b.end()))) -
         entropy(j.marginal(both));
}

double divergence(const Distribution& p, const Distribution& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("divergence requires equal alphabet sizes");
  double d = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (p(i) == 0.0) continue;
    if (q(i) == 0.0) return kInfNats;
    d += p(i) * std::log(p(i) / q(i));
  }
  return d;
}

double conditional_divergence(const Channel& pAgivenB, const Distribution& qA,
                              const Distribution& pB) {
  if (pAgivenB.input_size() != pB.size() ||
      pAgivenB.output_size() != qA.size())
    throw std::invalid_argument("conditional divergence shape mismatch");
  double d = 0.0;
  for (int b = 0; b < pB.size(); ++b) {
    if (pB(b) == 0.0) continue;
    const double term = divergence(pAgivenB.row(b), qA);
    if (term == kInfNats) return kInfNats;
    d += pB(b) * term;
  }
  return d;
}

}  // namespace pacsim
