#include "pacsim/cipher.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>

namespace pacsim {

namespace {

std::vector<int> seq_from_index(std::uint64_t index, int len, int base) {
  std::vector<int> s(len);
  for (int i = len - 1; i >= 0; --i) {
    s[i] = static_cast<int>(index % base);
    index /= base;
  }
  return s;
}

double block_prob(const std::vector<int>& seq, const Distribution& p) {
  double out = 1.0;
  for (int s : seq) out *= p(s);
  return out;
}

/// Core table for leakage computations:
///   G(l, a) = Pr[K~^m = l, M_A = a]
/// over the uniform key, plus the per-key adversary kernel.
struct KeyMessageTable {
  Eigen::MatrixXd g;        // q^m rows (key image), messages cols
  Eigen::MatrixXd pr_a;     // q^n rows (key), messages cols
  std::vector<std::uint64_t> key_image;  // k index -> affine image index
};

KeyMessageTable key_message_table(const SystemInstance& sys,
                                  std::uint64_t cap) {
  const int q = static_cast<int>(sys.spec.modulus);
  const std::uint64_t nk = pow_u64(q, sys.n);
  const std::uint64_t nz = pow_u64(sys.adversary.z_alphabet, sys.n);
  const std::uint64_t nl = pow_u64(q, sys.m());
  if (nk > cap || nz > cap || nk * nz > cap)
    throw EnumCapExceeded(nk * nz, cap);

  KeyMessageTable t;
  t.pr_a = Eigen::MatrixXd::Zero(nk, sys.adversary.messages);
  t.key_image.resize(nk);
  for (std::uint64_t k = 0; k < nk; ++k) {
    const FieldVector kv = vector_from_index(k, sys.n, sys.spec);
    t.key_image[k] = index_of_vector(encode_affine(sys.encoder, kv));
    for (std::uint64_t z = 0; z < nz; ++z) {
      const std::vector<int> zs =
          seq_from_index(z, sys.n, sys.adversary.z_alphabet);
      double w = 1.0;
      for (int i = 0; i < sys.n; ++i) w *= sys.W(zs[i], kv.entries[i]);
      if (w > 0.0) t.pr_a(k, sys.adversary.map[z]) += w;
    }
  }
  t.g = Eigen::MatrixXd::Zero(nl, sys.adversary.messages);
  const double pk = std::pow(1.0 / q, sys.n);
  for (std::uint64_t k = 0; k < nk; ++k)
    t.g.row(t.key_image[k]) += pk * t.pr_a.row(k);
  return t;
}

double table_entropy(const Eigen::MatrixXd& m) {
  double h = 0.0;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) h -= xlogx(m(r, c));
  return h;
}

}  // namespace

double AdversaryEncoder::rate() const {
  return std::log(static_cast<double>(messages)) / n;
}

AdversaryEncoder adversary_constant(int n, int z_alphabet) {
  const std::uint64_t nz = pow_u64(z_alphabet, n);
  return {"constant", n, z_alphabet, std::vector<int>(nz, 0), 1};
}

AdversaryEncoder adversary_identity(int n, int z_alphabet) {
  const std::uint64_t nz = pow_u64(z_alphabet, n);
  std::vector<int> map(nz);
  for (std::uint64_t i = 0; i < nz; ++i) map[i] = static_cast<int>(i);
  return {"identity", n, z_alphabet, std::move(map), static_cast<int>(nz)};
}

AdversaryEncoder adversary_truncation(int n, int z_alphabet, double R_A) {
  const int keep = std::min(
      n, static_cast<int>(std::floor(n * R_A / std::log(double(z_alphabet)))));
  const std::uint64_t nz = pow_u64(z_alphabet, n);
  const std::uint64_t drop = pow_u64(z_alphabet, n - keep);
  std::vector<int> map(nz);
  for (std::uint64_t i = 0; i < nz; ++i)
    map[i] = static_cast<int>(i / drop);  // leading symbols form the message
  return {"truncation", n, z_alphabet, std::move(map),
          static_cast<int>(pow_u64(z_alphabet, keep))};
}

AdversaryEncoder adversary_type_quantizer(int n, int z_alphabet) {
  const std::uint64_t nz = pow_u64(z_alphabet, n);
  std::vector<int> map(nz);
  std::vector<std::vector<int>> seen;
  for (std::uint64_t i = 0; i < nz; ++i) {
    std::vector<int> counts(z_alphabet, 0);
    for (int s : seq_from_index(i, n, z_alphabet)) counts[s] += 1;
    auto it = std::find(seen.begin(), seen.end(), counts);
    if (it == seen.end()) {
      seen.push_back(counts);
      it = std::prev(seen.end());
    }
    map[i] = static_cast<int>(it - seen.begin());
  }
  return {"type-quantizer", n, z_alphabet, std::move(map),
          static_cast<int>(seen.size())};
}

AdversaryEncoder make_adversary(const std::string& strategy, int n,
                                int z_alphabet, double R_A) {
  if (strategy == "constant") return adversary_constant(n, z_alphabet);
  if (strategy == "identity") return adversary_identity(n, z_alphabet);
  if (strategy == "truncation")
    return adversary_truncation(n, z_alphabet, R_A);
  if (strategy == "type-quantizer")
    return adversary_type_quantizer(n, z_alphabet);
  throw std::invalid_argument("unknown adversary strategy: " + strategy);
}

void check_rate_class(const AdversaryEncoder& adv, double R_A, double eps) {
  if (adv.rate() > R_A + eps)
    throw std::invalid_argument(
        "adversary rate " + std::to_string(adv.rate()) +
        " exceeds rate class bound " + std::to_string(R_A + eps));
}

SystemInstance::SystemInstance(FieldSpec s, int block, Distribution px,
                               Channel w, AffineEncoder enc,
                               AdversaryEncoder adv, TieRule rule)
    : spec(s),
      n(block),
      p_X(std::move(px)),
      W(std::move(w)),
      encoder(std::move(enc)),
      adversary(std::move(adv)),
      tie(rule) {
  const int q = static_cast<int>(spec.modulus);
  if (p_X.size() != q)
    throw std::invalid_argument("p_X alphabet must equal field size");
  if (W.input_size() != q)
    throw std::invalid_argument("side channel input must equal field size");
  if (encoder.n() != n)
    throw std::invalid_argument("encoder block length mismatch");
  if (adversary.n != n || adversary.z_alphabet != W.output_size())
    throw std::invalid_argument("adversary table shape mismatch");
}

JointDistribution build_joint(const SystemInstance& sys, std::uint64_t cap) {
  const int q = static_cast<int>(sys.spec.modulus);
  const std::uint64_t nx = pow_u64(q, sys.n);
  const std::uint64_t nz = pow_u64(sys.W.output_size(), sys.n);
  const std::uint64_t nc = pow_u64(q, sys.m());
  const std::uint64_t atoms =
      nx * nx * nz * sys.adversary.messages * nc;
  if (atoms > cap) throw EnumCapExceeded(atoms, cap);

  std::vector<int> shape{static_cast<int>(nx), static_cast<int>(nx),
                         static_cast<int>(nz), sys.adversary.messages,
                         static_cast<int>(nc)};
  Eigen::VectorXd table = Eigen::VectorXd::Zero(atoms);
  const double pk = std::pow(1.0 / q, sys.n);
  for (std::uint64_t xi = 0; xi < nx; ++xi) {
    const FieldVector x = vector_from_index(xi, sys.n, sys.spec);
    const double px = block_prob(
        std::vector<int>(x.entries.data(), x.entries.data() + sys.n),
        sys.p_X);
    const FieldVector xlin = encode_linear(sys.encoder, x);
    for (std::uint64_t ki = 0; ki < nx; ++ki) {
      const FieldVector k = vector_from_index(ki, sys.n, sys.spec);
      const std::uint64_t ci =
          index_of_vector(field_add(xlin, encode_affine(sys.encoder, k)));
      for (std::uint64_t zi = 0; zi < nz; ++zi) {
        const std::vector<int> zs =
            seq_from_index(zi, sys.n, sys.W.output_size());
        double w = 1.0;
        for (int i = 0; i < sys.n; ++i) w *= sys.W(zs[i], k.entries[i]);
        if (w == 0.0) continue;
        const int a = sys.adversary.map[zi];
        const std::uint64_t flat =
            (((xi * nx + ki) * nz + zi) * sys.adversary.messages + a) * nc +
            ci;
        table[flat] += px * pk * w;
      }
    }
  }
  return JointDistribution(std::move(shape), std::move(table));
}

double leakage_exact(const SystemInstance& sys, std::uint64_t cap) {
  const int q = static_cast<int>(sys.spec.modulus);
  const KeyMessageTable t = key_message_table(sys, cap);
  const std::uint64_t nx = pow_u64(q, sys.n);
  const std::uint64_t nl = pow_u64(q, sys.m());

  // p_{X~}: mass of each linear image.
  Eigen::VectorXd px_img = Eigen::VectorXd::Zero(nl);
  for (std::uint64_t xi = 0; xi < nx; ++xi) {
    const FieldVector x = vector_from_index(xi, sys.n, sys.spec);
    px_img[index_of_vector(encode_linear(sys.encoder, x))] += block_prob(
        std::vector<int>(x.entries.data(), x.entries.data() + sys.n),
        sys.p_X);
  }
  // Index map for c (-) l over X^m.
  Eigen::MatrixXd joint_ca =
      Eigen::MatrixXd::Zero(nl, sys.adversary.messages);
  for (std::uint64_t ci = 0; ci < nl; ++ci) {
    const FieldVector c = vector_from_index(ci, sys.m(), sys.spec);
    for (std::uint64_t li = 0; li < nl; ++li) {
      if (px_img[li] == 0.0) continue;
      const FieldVector l = vector_from_index(li, sys.m(), sys.spec);
      joint_ca.row(ci) +=
          px_img[li] * t.g.row(index_of_vector(field_sub(c, l)));
    }
  }
  // Given X = x the pair (C~, M_A) has law G shifted by the linear image
  // of x, so H(C~, M_A | X^n) = H(G).
  return table_entropy(joint_ca) - table_entropy(t.g);
}

double leakage_divergence_bound(const SystemInstance& sys, std::uint64_t cap) {
  const KeyMessageTable t = key_message_table(sys, cap);
  const Eigen::VectorXd pa = t.g.colwise().sum();
  double h_l_given_a = table_entropy(t.g);
  for (int a = 0; a < pa.size(); ++a) h_l_given_a -= -xlogx(pa[a]);
  // bound = m ln|X| - H(K~ | M_A)
  const double bound =
      sys.m() * std::log(double(sys.spec.modulus)) - h_l_given_a;
  const double exact = leakage_exact(sys, cap);
  if (exact > bound + 1e-9)
    throw std::logic_error("leakage exceeds divergence bound");
  return bound;
}

LeakageReport leakage_report(const SystemInstance& sys, double R,
                             std::uint64_t cap) {
  LeakageReport r;
  r.delta_exact = leakage_exact(sys, cap);
  r.divergence_bound = leakage_divergence_bound(sys, cap);
  r.theta_bound = theta(sys, R, cap);
  r.n = sys.n;
  r.m = sys.m();
  r.R = R;
  r.R_A = sys.adversary.rate();
  r.adversary = sys.adversary.name;
  return r;
}

double theta(const SystemInstance& sys, double R, std::uint64_t cap) {
  const int q = static_cast<int>(sys.spec.modulus);
  const KeyMessageTable t = key_message_table(sys, cap);
  const std::uint64_t nk = pow_u64(q, sys.n);
  const double pk = std::pow(1.0 / q, sys.n);
  const Eigen::VectorXd pa = pk * t.pr_a.colwise().sum();
  const double scale = std::expm1(sys.n * R);  // e^{nR} - 1
  double out = 0.0;
  for (std::uint64_t k = 0; k < nk; ++k) {
    for (int a = 0; a < sys.adversary.messages; ++a) {
      const double pak = pk * t.pr_a(k, a);
      if (pak == 0.0) continue;
      out += pak * std::log1p(scale * (pak / pa[a]));
    }
  }
  return out;
}

ThetaTail theta_tail_bound(const SystemInstance& sys, double R, double eta,
                           std::uint64_t cap) {
  if (eta <= 0.0) throw std::invalid_argument("eta must be positive");
  const int q = static_cast<int>(sys.spec.modulus);
  const KeyMessageTable t = key_message_table(sys, cap);
  const std::uint64_t nk = pow_u64(q, sys.n);
  const double pk = std::pow(1.0 / q, sys.n);
  const Eigen::VectorXd pa = pk * t.pr_a.colwise().sum();
  const double threshold = -sys.n * (R + eta);  // ln p(k|a) >= threshold
  double wp = 0.0;
  for (std::uint64_t k = 0; k < nk; ++k)
    for (int a = 0; a < sys.adversary.messages; ++a) {
      const double pak = pk * t.pr_a(k, a);
      if (pak == 0.0) continue;
      if (std::log(pak / pa[a]) >= threshold) wp += pak;
    }
  ThetaTail tail;
  tail.wp = wp;
  tail.bound = sys.n * R * wp + std::exp(-sys.n * eta);
  tail.theta_value = theta(sys, R, cap);
  if (tail.theta_value > tail.bound + 1e-9)
    throw std::logic_error("theta exceeds its tail bound");
  return tail;
}

EventReport event_decomposition(const SystemInstance& sys, double R,
                                double R_A, double eta,
                                const JointDistribution& qhat,
                                const Distribution& q_zn,
                                std::uint64_t cap) {
  const int q = static_cast<int>(sys.spec.modulus);
  const std::uint64_t nk = pow_u64(q, sys.n);
  const std::uint64_t nz = pow_u64(sys.W.output_size(), sys.n);
  if (nk * nz > cap) throw EnumCapExceeded(nk * nz, cap);
  if (qhat.shape() !=
      std::vector<int>{sys.adversary.messages, static_cast<int>(nz),
                       static_cast<int>(nk)})
    throw std::invalid_argument("qhat shape must be (M_A, Z^n, K^n)");
  if (q_zn.size() != static_cast<int>(nz))
    throw std::invalid_argument("q_zn must live on Z^n block indices");

  const KeyMessageTable t = key_message_table(sys, cap);
  const double pk = std::pow(1.0 / q, sys.n);
  const Eigen::VectorXd pa = pk * t.pr_a.colwise().sum();

  // p_Z^n and p(z|a).
  Eigen::VectorXd pz = Eigen::VectorXd::Zero(nz);
  Eigen::MatrixXd w_cache(nk, nz);
  for (std::uint64_t ki = 0; ki < nk; ++ki) {
    const FieldVector kv = vector_from_index(ki, sys.n, sys.spec);
    for (std::uint64_t zi = 0; zi < nz; ++zi) {
      const std::vector<int> zs =
          seq_from_index(zi, sys.n, sys.W.output_size());
      double w = 1.0;
      for (int i = 0; i < sys.n; ++i) w *= sys.W(zs[i], kv.entries[i]);
      w_cache(ki, zi) = w;
      pz[zi] += pk * w;
    }
  }
  Eigen::VectorXd pz_given_a(nz);  // a is determined by z
  for (std::uint64_t zi = 0; zi < nz; ++zi)
    pz_given_a[zi] = pa[sys.adversary.map[zi]] > 0.0
                         ? pz[zi] / pa[sys.adversary.map[zi]]
                         : 0.0;

  const double eps = std::exp(-sys.n * eta);
  const double madv = static_cast<double>(sys.adversary.messages);
  EventReport r{};
  std::vector<int> qidx(3);
  for (std::uint64_t ki = 0; ki < nk; ++ki)
    for (std::uint64_t zi = 0; zi < nz; ++zi) {
      const double w = w_cache(ki, zi);
      if (w == 0.0) continue;
      const double mass = pk * w;  // p(a, z, k) with a = adv(z)
      const int a = sys.adversary.map[zi];
      qidx[0] = a;
      qidx[1] = static_cast<int>(zi);
      qidx[2] = static_cast<int>(ki);
      const double qh = qhat.at_flat(qhat.flat_index(qidx));

      const bool in_b = qh == 0.0 || std::log(mass / qh) >= -sys.n * eta;
      const bool in_c =
          q_zn(static_cast<int>(zi)) == 0.0 ||
          std::log(pz[zi] / q_zn(static_cast<int>(zi))) >= -sys.n * eta;
      const bool in_d =
          pz_given_a[zi] <= madv * std::exp(sys.n * eta) * pz[zi];
      const double pka = pk * t.pr_a(ki, a) / pa[a];
      const bool in_e = std::log(pka) >= -sys.n * (R + eta);
      // Rate-class form of the D condition used inside wp~.
      const bool in_d_rate =
          pz[zi] == 0.0 ||
          std::log(pz_given_a[zi] / pz[zi]) <= sys.n * (R_A + eta);

      if (in_b) r.pr_b += mass;
      if (in_c) r.pr_c += mass;
      if (in_d) r.pr_d += mass;
      if (in_e) r.pr_e += mass;
      if (in_b && in_c && in_d_rate && in_e) r.wp_tilde += mass;
    }
  r.pr_b_c = 1.0 - r.pr_b;
  r.pr_c_c = 1.0 - r.pr_c;
  r.pr_d_c = 1.0 - r.pr_d;
  r.wp = r.pr_e;
  r.wp_tilde += 3.0 * eps;

  if (r.pr_b_c > eps + 1e-10 || r.pr_c_c > eps + 1e-10 ||
      r.pr_d_c > eps + 1e-10)
    throw std::logic_error("event complement exceeds e^{-n eta}");
  if (r.wp > r.wp_tilde + 1e-10)
    throw std::logic_error("wp exceeds wp~");
  return r;
}

SimResult simulate(const SystemInstance& sys, std::uint64_t trials,
                   std::uint64_t seed, std::uint64_t cap) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const DecodeTable dec(sys.encoder, sys.tie, cap);
  StreamRng rng(seed, 1);
  std::uint64_t errors = 0;
  Eigen::VectorXi x(sys.n);
  for (std::uint64_t tr = 0; tr < trials; ++tr) {
    for (int i = 0; i < sys.n; ++i) {
      double u = rng.next_double();
      int s = 0;
      while (s + 1 < sys.p_X.size() && u >= sys.p_X(s)) u -= sys.p_X(s), ++s;
      x[i] = s;
    }
    const FieldVector xv(sys.spec, x);
    errors += error_indicator(sys.encoder, dec, xv);
  }
  const double p_hat = static_cast<double>(errors) / trials;
  const double z = 1.959963984540054;
  const double z2 = z * z, nt = static_cast<double>(trials);
  const double denom = 1.0 + z2 / nt;
  const double center = (p_hat + z2 / (2 * nt)) / denom;
  const double half =
      z * std::sqrt(p_hat * (1 - p_hat) / nt + z2 / (4 * nt * nt)) / denom;
  double lo = std::max(0.0, center - half), hi = std::min(1.0, center + half);
  if (errors == 0) lo = 0.0;          // fp noise otherwise leaves ~1e-19
  if (errors == trials) hi = 1.0;
  return {trials, errors, p_hat, lo, hi};
}

}  // namespace pacsim
