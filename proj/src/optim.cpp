#include "pacsim/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace pacsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SimplexPoint barycenter(const std::vector<int>& dims) {
  SimplexPoint p;
  for (int d : dims)
    p.push_back(Eigen::VectorXd::Constant(d, 1.0 / d));
  return p;
}

/// Corner start t: block i sits at vertex (t + i) mod dims[i].
SimplexPoint corner(const std::vector<int>& dims, int t) {
  SimplexPoint p;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dims[i]);
    v[(t + static_cast<int>(i)) % dims[i]] = 1.0;
    p.push_back(std::move(v));
  }
  return p;
}

SimplexPoint random_point(const std::vector<int>& dims, StreamRng& rng) {
  SimplexPoint p;
  for (int d : dims) {
    Eigen::VectorXd v(d);
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      // exponential spacings give a uniform simplex draw
      v[i] = -std::log(1.0 - rng.next_double());
      s += v[i];
    }
    p.push_back(v / s);
  }
  return p;
}

}  // namespace

SimplexResult minimize_on_simplices(const SimplexObjective& f,
                                    const std::vector<int>& block_dims,
                                    const PatternSearchOptions& opts) {
  if (block_dims.empty())
    throw std::invalid_argument("need at least one simplex block");
  int max_dim = 1;
  for (int d : block_dims) {
    if (d < 1) throw std::invalid_argument("simplex dimension must be >= 1");
    max_dim = std::max(max_dim, d);
  }

  int evals = 0;
  const auto eval = [&](const SimplexPoint& p) {
    ++evals;
    return f(p);
  };

  const auto local_search = [&](SimplexPoint x) {
    double fx = eval(x);
    double step = opts.step_init;
    for (int it = 0; it < opts.max_iters && step >= opts.step_min; ++it) {
      bool improved = false;
      for (std::size_t b = 0; b < x.size(); ++b) {
        const int d = block_dims[b];
        if (d < 2) continue;
        for (int i = 0; i < d; ++i) {
          for (int j = 0; j < d; ++j) {
            if (j == i) continue;
            const double t = std::min(step, x[b][i]);
            if (t <= 0.0) break;
            SimplexPoint y = x;
            y[b][i] -= t;
            y[b][j] += t;
            const double fy = eval(y);
            if (fy < fx - 1e-15) {
              x = std::move(y);
              fx = fy;
              improved = true;
            }
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    return std::pair<SimplexPoint, double>(std::move(x), fx);
  };

  SimplexResult best{barycenter(block_dims), kInf, 0};
  StreamRng rng(opts.seed, 7);
  int stale = 0;
  const int extras = static_cast<int>(opts.extra_starts.size());
  for (int s = 0; s < opts.starts + extras && stale < opts.patience; ++s) {
    SimplexPoint start;
    if (s < extras)
      start = opts.extra_starts[s];
    else if (s == extras)
      start = barycenter(block_dims);
    else if (s <= extras + max_dim)
      start = corner(block_dims, s - extras - 1);
    else
      start = random_point(block_dims, rng);
    auto [pt, val] = local_search(std::move(start));
    if (val < best.value - opts.improve_tol) {
      best.point = std::move(pt);
      best.value = val;
      stale = 0;
    } else {
      ++stale;
    }
  }
  best.evaluations = evals;
  return best;
}

double golden_minimize(const std::function<double(double)>& f, double lo,
                       double hi, double tol, double* arg) {
  if (hi < lo) throw std::invalid_argument("empty interval");
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  const double x = fc < fd ? c : d;
  if (arg) *arg = x;
  return std::min(fc, fd);
}

}  // namespace pacsim
