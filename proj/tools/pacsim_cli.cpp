// Batch front door: scenario config in, CSV/JSON/report artifacts out.
//
// Commands: verify | simulate | leakage | exponent | region
// Exit codes: 0 ok, 1 invariant violation, 2 config error, 3 resource cap.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "pacsim/affine.hpp"
#include "pacsim/cipher.hpp"
#include "pacsim/exponents.hpp"
#include "pacsim/region.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return j;
}

template <typename T>
T require(const json& j, const std::string& key) {
  if (!j.contains(key)) throw ConfigError("missing config field: " + key);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field has wrong type: " + key);
  }
}

template <typename T>
T optional_of(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field has wrong type: " + key);
  }
}

pacsim::Distribution parse_distribution(const json& j,
                                        const std::string& key) {
  const auto v = require<std::vector<double>>(j, key);
  Eigen::VectorXd p(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) p[i] = v[i];
  try {
    return pacsim::Distribution(std::move(p));
  } catch (const std::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

pacsim::Channel parse_channel(const json& j) {
  if (!j.contains("W")) throw ConfigError("missing config field: W");
  const json& w = j.at("W");
  try {
    if (w.contains("type")) {
      const auto type = require<std::string>(w, "type");
      if (type == "bsc")
        return pacsim::Channel::binary_symmetric(
            require<double>(w, "crossover"));
      if (type == "identity")
        return pacsim::Channel::identity(require<int>(w, "size"));
      throw ConfigError("W.type must be bsc or identity");
    }
    const auto rows = require<std::vector<std::vector<double>>>(w, "rows");
    Eigen::MatrixXd m(rows.size(), rows.at(0).size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != rows[0].size())
        throw ConfigError("W.rows must be rectangular");
      for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
    }
    return pacsim::Channel(std::move(m));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("W: ") + e.what());
  }
}

struct Scenario {
  pacsim::FieldSpec spec;
  int n;
  pacsim::Distribution p_X;
  pacsim::Channel W;
  pacsim::TieRule tie;
  std::uint64_t seed;
  std::uint64_t cap;
  double R, R_A;
};

Scenario parse_scenario(const json& j, std::uint64_t seed_override,
                        bool has_seed_override) {
  const auto modulus = require<std::uint32_t>(j, "field_modulus");
  pacsim::FieldSpec spec = [&] {
    try {
      return pacsim::FieldSpec(modulus);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("field_modulus: ") + e.what());
    }
  }();
  Scenario s{spec,
             require<int>(j, "n"),
             parse_distribution(j, "p_X"),
             parse_channel(j),
             pacsim::tie_rule_from_string(
                 optional_of<std::string>(j, "tie_rule", "declare-error")),
             has_seed_override ? seed_override
                               : require<std::uint64_t>(j, "seed"),
             optional_of<std::uint64_t>(j, "cap", pacsim::kDefaultEnumCap),
             require<double>(j, "R"),
             optional_of<double>(j, "R_A", 0.0)};
  if (s.n < 1) throw ConfigError("n must be >= 1");
  if (s.p_X.size() != static_cast<int>(modulus))
    throw ConfigError("p_X length must equal field_modulus");
  if (s.W.input_size() != static_cast<int>(modulus))
    throw ConfigError("W must have one row per field symbol");
  return s;
}

pacsim::AffineEncoder pick_encoder(const Scenario& s, const json& j,
                                   const std::string& select) {
  const json enc = j.value("encoder", json{{"source", "random"}});
  const auto source = optional_of<std::string>(enc, "source", "random");
  const int m = enc.contains("m")
                    ? require<int>(enc, "m")
                    : pacsim::cols_for_rate(s.R, s.n, s.spec.modulus);
  if (source == "explicit")
    return pacsim::encoder_from_text(require<std::string>(enc, "text"));
  if (source == "random") {
    pacsim::StreamRng rng(s.seed, 2);
    auto [A, b] = pacsim::random_affine(s.n, m, s.spec, rng);
    return pacsim::AffineEncoder(std::move(A), std::move(b));
  }
  if (source != "exhaustive")
    throw ConfigError("encoder.source must be random|explicit|exhaustive");

  // Exhaustive: scan the whole (A, b) ensemble for the best candidate.
  const pacsim::AffineEnsemble ens(s.n, m, s.spec, s.cap);
  double best = std::numeric_limits<double>::infinity();
  std::optional<pacsim::AffineEncoder> winner;
  for (std::uint64_t i = 0; i < ens.size(); ++i) {
    auto [A, b] = ens.at(i);
    pacsim::AffineEncoder cand(std::move(A), std::move(b));
    double score;
    if (select == "min-leakage") {
      pacsim::SystemInstance sys(s.spec, s.n, s.p_X, s.W, cand,
                                 pacsim::make_adversary(
                                     "identity", s.n, s.W.output_size(),
                                     s.R_A),
                                 s.tie);
      score = pacsim::leakage_exact(sys, s.cap);
    } else {
      const pacsim::DecodeTable dec(cand, s.tie, s.cap);
      score = pacsim::error_prob_exact(cand, dec, s.p_X, s.cap);
    }
    if (score < best) {
      best = score;
      winner = std::move(cand);
    }
  }
  return *winner;
}

pacsim::SystemInstance build_system(const Scenario& s, const json& j) {
  const json adv = j.value("adversary", json{{"strategy", "identity"}});
  pacsim::AdversaryEncoder a = pacsim::make_adversary(
      optional_of<std::string>(adv, "strategy", "identity"), s.n,
      s.W.output_size(), s.R_A);
  const std::string select =
      optional_of<std::string>(j.value("encoder", json::object()), "select",
                               "min-error");
  return pacsim::SystemInstance(s.spec, s.n, s.p_X, s.W,
                                pick_encoder(s, j, select), std::move(a),
                                s.tie);
}

struct Artifacts {
  fs::path dir;
  std::ostringstream csv;
  json results = json::array();
  std::ostringstream report;

  void write(const json& config, std::uint64_t hash) {
    fs::create_directories(dir);
    std::ofstream(dir / "results.csv") << csv.str();
    json side;
    side["config"] = config;
    side["config_hash"] = hash;
    side["results"] = results;
    std::ofstream(dir / "results.json") << side.dump(2) << '\n';
    std::ofstream(dir / "report.txt") << report.str();
  }
};

/// Index-parallel map with deterministic output ordering.
void parallel_for(std::size_t count, int workers,
                  const std::function<void(std::size_t)>& body) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int spawn = std::min<std::size_t>(workers, count);
  std::vector<std::exception_ptr> errors(spawn);
  for (int t = 0; t < spawn; ++t)
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < count; i = next++) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Scenario& s, const json& j, Artifacts& art,
                 std::uint64_t hash) {
  const auto trials = require<std::uint64_t>(j, "trials");
  const pacsim::SystemInstance sys = build_system(s, j);
  const pacsim::SimResult r = pacsim::simulate(sys, trials, s.seed, s.cap);
  const pacsim::DecodeTable dec(sys.encoder, sys.tie, s.cap);
  const double exact =
      pacsim::error_prob_exact(sys.encoder, dec, s.p_X, s.cap);

  art.csv << "config_hash,trials,errors,p_hat,wilson_lo,wilson_hi,p_exact\n"
          << hash << ',' << r.trials << ',' << r.errors << ','
          << fmt(r.p_hat) << ',' << fmt(r.wilson_lo) << ','
          << fmt(r.wilson_hi) << ',' << fmt(exact) << '\n';
  art.results.push_back({{"trials", r.trials},
                         {"errors", r.errors},
                         {"p_hat", r.p_hat},
                         {"wilson_lo", r.wilson_lo},
                         {"wilson_hi", r.wilson_hi},
                         {"p_exact", exact},
                         {"encoder", pacsim::encoder_to_text(sys.encoder)}});
  art.report << "simulate: " << r.errors << '/' << r.trials
             << " decoding errors (p_hat=" << fmt(r.p_hat)
             << ", exact=" << fmt(exact) << ")\n";
  const bool covered = r.wilson_lo <= exact && exact <= r.wilson_hi;
  art.report << "wilson 95% interval [" << fmt(r.wilson_lo) << ", "
             << fmt(r.wilson_hi) << "] "
             << (covered ? "covers" : "misses") << " the exact value\n";
  return 0;
}

int cmd_leakage(const Scenario& s, const json& j, Artifacts& art,
                std::uint64_t hash) {
  const pacsim::SystemInstance sys = build_system(s, j);
  pacsim::check_rate_class(sys.adversary, s.R_A + 1e-9);
  const pacsim::LeakageReport rep =
      pacsim::leakage_report(sys, s.R, s.cap);
  const auto etas =
      optional_of<std::vector<double>>(j, "eta_grid", {0.05, 0.1, 0.2});

  art.csv << "config_hash,eta,delta_exact,divergence_bound,theta,wp,"
             "tail_bound\n";
  for (double eta : etas) {
    const pacsim::ThetaTail tail =
        pacsim::theta_tail_bound(sys, s.R, eta, s.cap);
    art.csv << hash << ',' << fmt(eta) << ',' << fmt(rep.delta_exact)
            << ',' << fmt(rep.divergence_bound) << ','
            << fmt(tail.theta_value) << ',' << fmt(tail.wp) << ','
            << fmt(tail.bound) << '\n';
    art.results.push_back({{"eta", eta},
                           {"delta_exact", rep.delta_exact},
                           {"divergence_bound", rep.divergence_bound},
                           {"theta", tail.theta_value},
                           {"wp", tail.wp},
                           {"tail_bound", tail.bound}});
  }
  art.report << "leakage: Delta=" << fmt(rep.delta_exact)
             << " divergence bound=" << fmt(rep.divergence_bound)
             << " Theta=" << fmt(rep.theta_bound) << " (n=" << rep.n
             << ", m=" << rep.m << ", adversary=" << rep.adversary
             << ")\n";
  return 0;
}

int cmd_exponent(const Scenario& s, const json& j, Artifacts& art,
                 std::uint64_t hash, int workers) {
  const auto r_grid = optional_of<std::vector<double>>(j, "R_grid", {s.R});
  pacsim::ExponentOptions eopts;
  if (j.contains("optimizer")) {
    const json& o = j.at("optimizer");
    eopts.outer_grid = optional_of<int>(o, "outer_grid", eopts.outer_grid);
    eopts.lambda_cap =
        optional_of<double>(o, "lambda_cap", eopts.lambda_cap);
    eopts.inner.starts =
        optional_of<int>(o, "starts", eopts.inner.starts);
  }
  const pacsim::KeyChannelModel model(
      pacsim::Distribution::uniform(s.spec.modulus), s.W);
  const pacsim::FSolver f_solver(model, eopts);
  const pacsim::FTildeSolver ft_solver(model, eopts);

  struct Row {
    double R, E, F, mu, alpha, Ftilde, mu2, lambda;
  };
  std::vector<Row> rows(r_grid.size());
  parallel_for(r_grid.size(), workers, [&](std::size_t i) {
    const double R = r_grid[i];
    const double E = pacsim::error_exponent_E(R, s.p_X);
    const pacsim::ExponentResult f = f_solver.evaluate(s.R_A, R);
    const pacsim::ExponentResult ft = ft_solver.evaluate(s.R_A, R);
    rows[i] = {R, E, f.value, f.mu, f.second, ft.value, ft.mu, ft.second};
  });

  art.csv << "config_hash,R,R_A,E,F,F_mu,F_alpha,F_tilde,Ft_mu,"
             "Ft_lambda\n";
  for (const Row& r : rows) {
    art.csv << hash << ',' << fmt(r.R) << ',' << fmt(s.R_A) << ','
            << fmt(r.E) << ',' << fmt(r.F) << ',' << fmt(r.mu) << ','
            << fmt(r.alpha) << ',' << fmt(r.Ftilde) << ',' << fmt(r.mu2)
            << ',' << fmt(r.lambda) << '\n';
    art.results.push_back({{"R", r.R},
                           {"R_A", s.R_A},
                           {"E", r.E},
                           {"F", r.F},
                           {"F_argmax", {r.mu, r.alpha}},
                           {"F_tilde", r.Ftilde},
                           {"F_tilde_argmax", {r.mu2, r.lambda}}});
  }
  art.report << "exponent: " << rows.size() << " rate points, R_A="
             << fmt(s.R_A) << ", outer grid " << eopts.outer_grid << "x"
             << eopts.outer_grid << '\n';
  return 0;
}

int cmd_region(const Scenario& s, const json& j, Artifacts& art,
               std::uint64_t hash) {
  pacsim::RegionOptions ropts;
  ropts.sweep = optional_of<int>(j, "sweep", ropts.sweep);
  const pacsim::KeyChannelModel model(
      pacsim::Distribution::uniform(s.spec.modulus), s.W);
  const pacsim::RegionBoundary b = pacsim::region_boundary(model, ropts);
  const pacsim::Property1Report p1 =
      pacsim::property1_check(model, b);

  art.csv << "config_hash,R_A,R\n";
  for (const pacsim::RegionPoint& p : b.points) {
    art.csv << hash << ',' << fmt(p.r_a) << ',' << fmt(p.r) << '\n';
    art.results.push_back({{"R_A", p.r_a}, {"R", p.r}});
  }
  art.report << "region: " << b.points.size()
             << " frontier points; H(K)=" << fmt(b.h_k)
             << " H(Z)=" << fmt(b.h_z)
             << " H(K|Z)=" << fmt(b.h_k_given_z) << '\n';
  art.report << "property1: min(R_A+R)=" << fmt(p1.min_sum)
             << " target=" << fmt(p1.h_k) << " convexity slack="
             << fmt(p1.worst_convexity) << ' '
             << (p1.pass ? "PASS" : "FAIL") << '\n';
  return p1.pass ? 0 : 1;
}

int cmd_verify(const Scenario& s, const json& j, Artifacts& art,
               std::uint64_t hash) {
  art.csv << "config_hash,check,status,margin\n";
  bool all = true;
  const auto record = [&](const std::string& name, bool ok,
                          double margin) {
    all = all && ok;
    art.csv << hash << ',' << name << ',' << (ok ? "pass" : "fail") << ','
            << fmt(margin) << '\n';
    art.report << name << ": " << (ok ? "PASS" : "FAIL")
               << " (worst margin " << fmt(margin) << ")\n";
  };

  const int q = static_cast<int>(s.spec.modulus);
  // Method-of-types bounds (the constructors self-check; margin is the
  // worst slack of |T| <= e^{nH}).
  double worst = pacsim::kInfNats;
  for (int n = 1; n <= s.n; ++n)
    for (const pacsim::TypeClass& t : pacsim::enumerate_types(n, q, s.cap))
      worst = std::min(
          worst, std::exp(n * pacsim::type_entropy(t)) -
                     pacsim::type_class_size(t).convert_to<double>());
  record("type_probability_bounds", worst >= -1e-6, worst);

  // Collision probabilities of the random affine map.
  const int m = std::max(1, s.n - 1);
  const pacsim::AffineEnsemble ens(s.n, m, s.spec, s.cap);
  const auto zero = pacsim::FieldVector::zero(s.spec, s.n);
  const auto one = pacsim::vector_from_index(1, s.n, s.spec);
  const auto target = pacsim::FieldVector::zero(s.spec, m);
  std::uint64_t hit_one = 0, hit_both = 0;
  for (std::uint64_t i = 0; i < ens.size(); ++i) {
    auto [A, b] = ens.at(i);
    const pacsim::AffineEncoder enc(std::move(A), std::move(b));
    const bool h1 = pacsim::encode_affine(enc, one) == target;
    const bool h0 = pacsim::encode_affine(enc, zero) == target;
    hit_one += h1;
    hit_both += h1 && h0;
  }
  const double p1 = double(hit_one) / ens.size() -
                    std::pow(double(q), -m);
  const double p2 = double(hit_both) / ens.size() -
                    std::pow(double(q), -2 * m);
  record("affine_collision_exactness", std::abs(p1) < 1e-12 && std::abs(p2) < 1e-12,
         std::max(std::abs(p1), std::abs(p2)));

  // Error bound by types for one seeded encoder.
  pacsim::StreamRng rng(s.seed, 3);
  auto [A, b] = pacsim::random_affine(s.n, m, s.spec, rng);
  const pacsim::AffineEncoder enc(std::move(A), std::move(b));
  const pacsim::DecodeTable dec(enc, s.tie, s.cap);
  const double exact =
      pacsim::error_prob_exact(enc, dec, s.p_X, s.cap);
  const double bound =
      pacsim::error_prob_type_bound(enc, dec, s.p_X, s.cap);
  record("error_type_bound", exact <= bound + 1e-12, bound - exact);

  // Leakage versus its divergence and Theta bounds.
  const pacsim::SystemInstance sys = build_system(s, j);
  const double leak = pacsim::leakage_exact(sys, s.cap);
  const double div = pacsim::leakage_divergence_bound(sys, s.cap);
  record("leakage_divergence_bound", leak <= div + 1e-10, div - leak);
  const double theta = pacsim::theta(sys, s.R, s.cap);
  record("ensemble_theta_bound", leak <= theta + 1e-10, theta - leak);

  // Tail and event decompositions.
  bool tail_ok = true;
  double tail_margin = pacsim::kInfNats;
  for (double eta : {0.05, 0.1, 0.2}) {
    try {
      const pacsim::ThetaTail t =
          pacsim::theta_tail_bound(sys, s.R, eta, s.cap);
      tail_margin = std::min(tail_margin, t.bound - t.theta_value);
    } catch (const std::logic_error&) {
      tail_ok = false;
    }
  }
  record("theta_tail_bound", tail_ok, tail_margin);

  const pacsim::JointDistribution joint = pacsim::build_joint(sys, s.cap);
  const std::vector<int> keep{3, 2, 1};
  const pacsim::JointDistribution qhat = joint.marginal(keep);
  const std::uint64_t nz = pacsim::pow_u64(s.W.output_size(), s.n);
  bool events_ok = true;
  double events_margin = pacsim::kInfNats;
  for (double eta : {0.05, 0.2}) {
    try {
      const pacsim::EventReport er = pacsim::event_decomposition(
          sys, s.R, s.R_A, eta, qhat,
          pacsim::Distribution::uniform(static_cast<int>(nz)), s.cap);
      events_margin = std::min(events_margin, er.wp_tilde - er.wp);
    } catch (const std::logic_error&) {
      events_ok = false;
    }
  }
  record("event_decomposition_bounds", events_ok, events_margin);

  // Region and exponent properties at desk scale.
  const pacsim::KeyChannelModel model(pacsim::Distribution::uniform(q),
                                      s.W);
  pacsim::RegionOptions ropts;
  ropts.sweep = 17;
  const pacsim::RegionBoundary boundary =
      pacsim::region_boundary(model, ropts);
  const pacsim::Property1Report p1r =
      pacsim::property1_check(model, boundary);
  record("property1_min_sum", p1r.pass,
         std::abs(p1r.min_sum - p1r.h_k));

  const pacsim::Property2Report p2r =
      pacsim::property2_suite(model, s.seed);
  record("property2_c_d_e", p2r.pass,
         std::min({p2r.worst_c_low, -p2r.worst_c_high,
                   1e-4 - p2r.worst_d_first, p2r.worst_e_margin}));

  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privacy-amplified cipher system toolkit"};
  app.require_subcommand(1);
  std::string config_path, out_dir = "out";
  int workers = static_cast<int>(std::thread::hardware_concurrency());
  std::uint64_t seed_override = 0;
  bool has_seed = false;
  app.add_option("--config", config_path, "scenario config path")
      ->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--workers", workers, "worker pool size");
  auto* seed_opt =
      app.add_option("--seed", seed_override, "seed override");
  for (const char* name :
       {"verify", "simulate", "leakage", "exponent", "region"})
    app.add_subcommand(name)->fallthrough();
  CLI11_PARSE(app, argc, argv);
  has_seed = seed_opt->count() > 0;
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const json config = load_config(config_path);
    const std::uint64_t hash = fnv1a(config.dump());
    const Scenario s = parse_scenario(config, seed_override, has_seed);
    Artifacts art{fs::path(out_dir)};
    int rc = 0;
    if (command == "verify")
      rc = cmd_verify(s, config, art, hash);
    else if (command == "simulate")
      rc = cmd_simulate(s, config, art, hash);
    else if (command == "leakage")
      rc = cmd_leakage(s, config, art, hash);
    else if (command == "exponent")
      rc = cmd_exponent(s, config, art, hash, workers);
    else
      rc = cmd_region(s, config, art, hash);
    art.write(config, hash);
    return rc;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const pacsim::EnumCapExceeded& e) {
    std::fprintf(stderr, "enumeration cap exceeded: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return 1;
  }
}
