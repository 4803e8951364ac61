#include "figopt/optimizer.hpp"

#include "figopt/errors.hpp"
#include "figopt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace figopt {

namespace {

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr int kMaxExpansions = 20;

std::string format_point(const ControlPoint& d) {
  std::ostringstream out;
  out.precision(17);
  out << "(";
  for (int r = 0; r < d.size(); ++r) out << (r ? ", " : "") << d(r);
  out << ")";
  return out.str();
}

double checked_eval(const Objective& phi, const ControlPoint& d) {
  const double v = phi(d);
  if (!std::isfinite(v)) {
    throw EvaluationError("non-finite objective value at " + format_point(d));
  }
  return v;
}

// The search minimises f = -phi; everything below is in terms of f.
class BoxMinimizer {
 public:
  BoxMinimizer(const Objective& phi, const DesignSpace& space, const OptimizerConfig& cfg)
      : phi_(phi), space_(space), cfg_(cfg), k_(space.k()), widths_(k_) {
    for (int r = 0; r < k_; ++r) widths_(r) = space_.width(r);
  }

  double f(const ControlPoint& x) const { return -checked_eval(phi_, x); }

  // Central differences, or second-order one-sided differences where a
  // central stencil would leave the box.
  Vector gradient(const ControlPoint& x, double fx) const {
    Vector g(k_);
    ControlPoint probe = x;
    for (int r = 0; r < k_; ++r) {
      const double h = cfg_.grad_step * space_.width(r);
      const Bound& b = space_.bound(r);
      if (x(r) - h >= b.lo && x(r) + h <= b.hi) {
        probe(r) = x(r) + h;
        const double fp = f(probe);
        probe(r) = x(r) - h;
        const double fm = f(probe);
        g(r) = (fp - fm) / (2.0 * h);
      } else {
        const double dir = (x(r) + h <= b.hi) ? 1.0 : -1.0;
        probe(r) = x(r) + dir * h;
        const double f1 = f(probe);
        probe(r) = x(r) + dir * 2.0 * h;
        const double f2 = f(probe);
        g(r) = dir * (-3.0 * fx + 4.0 * f1 - f2) / (2.0 * h);
      }
      probe(r) = x(r);
    }
    return g;
  }

  // A coordinate is held when it sits on a bound and the descent direction
  // points out of the box.
  std::vector<bool> active_set(const ControlPoint& x, const Vector& g) const {
    std::vector<bool> active(static_cast<std::size_t>(k_));
    for (int r = 0; r < k_; ++r) {
      const Bound& b = space_.bound(r);
      active[r] = (x(r) <= b.lo && g(r) > 0.0) || (x(r) >= b.hi && g(r) < 0.0);
    }
    return active;
  }

  static Vector projected(const Vector& g, const std::vector<bool>& active) {
    Vector pg = g;
    for (int r = 0; r < g.size(); ++r) {
      if (active[r]) pg(r) = 0.0;
    }
    return pg;
  }

  LocalResult run(const ControlPoint& start) const {
    LocalResult result;
    result.start = start;
    ControlPoint x = start;
    double fx = f(x);
    Vector g = gradient(x, fx);
    std::vector<bool> active = active_set(x, g);
    Matrix h_inv = Matrix::Identity(k_, k_);
    bool scaled = false;
    int iter = 0;

    for (; iter < cfg_.max_iters; ++iter) {
      const Vector pg = projected(g, active);
      if (pg.norm() <= cfg_.convergence_tol) break;

      Vector dir = -projected(h_inv * pg, active);
      if (g.dot(dir) >= 0.0) {
        h_inv.setIdentity();
        scaled = false;
        dir = -pg;
      }

      // Keep the first trial step within one box width per coordinate.
      double alpha = 1.0;
      for (int r = 0; r < k_; ++r) {
        const double reach = std::abs(dir(r)) / space_.width(r);
        if (reach > 1.0) alpha = std::min(alpha, 1.0 / reach);
      }

      ControlPoint x_new;
      double f_new = fx;
      bool accepted = false;
      int bt = 0;
      for (; bt < kMaxBacktracks; ++bt, alpha *= 0.5) {
        x_new = space_.project(x + alpha * dir);
        const Vector step = x_new - x;
        if (step.cwiseAbs().maxCoeff() == 0.0) break;
        f_new = f(x_new);
        if (f_new <= fx + kArmijo * g.dot(step)) {
          accepted = true;
          break;
        }
      }
      if (!accepted) break;

      // A full step that was accepted outright may be far too short, e.g.
      // while the curvature is negative and the update is skipped.
      for (int grow = 0; bt == 0 && grow < kMaxExpansions; ++grow) {
        alpha *= 2.0;
        const ControlPoint x_try = space_.project(x + alpha * dir);
        if ((x_try - x).cwiseQuotient(widths_).cwiseAbs().maxCoeff() > 1.0) break;
        if ((x_try - x_new).cwiseAbs().maxCoeff() == 0.0) break;
        const double f_try = f(x_try);
        if (f_try >= f_new) break;
        x_new = x_try;
        f_new = f_try;
      }

      Vector s = x_new - x;
      const Vector g_new = gradient(x_new, f_new);
      Vector y = g_new - g;
      const std::vector<bool> active_new = active_set(x_new, g_new);
      // Curvature pairs live in the free subspace only.
      for (int r = 0; r < k_; ++r) {
        if (active_new[r]) s(r) = y(r) = 0.0;
      }
      x = x_new;
      fx = f_new;
      g = g_new;

      const double sy = s.dot(y);
      if (active_new != active) {
        active = active_new;
        h_inv.setIdentity();
        if (sy > 0.0 && y.squaredNorm() > 0.0) h_inv *= sy / y.squaredNorm();
        scaled = true;
      } else if (sy > 1e-12 * s.norm() * y.norm()) {
        if (!scaled) {
          h_inv *= sy / y.squaredNorm();
          scaled = true;
        }
        const double rho = 1.0 / sy;
        const Matrix left = Matrix::Identity(k_, k_) - rho * s * y.transpose();
        h_inv = left * h_inv * left.transpose() + rho * s * s.transpose();
      }
    }

    result.point = x;
    result.value = -fx;
    result.iterations = iter;
    result.pg_norm = projected(g, active).norm();
    if (result.pg_norm <= cfg_.convergence_tol) {
      result.status = StartStatus::Converged;
    } else if (result.pg_norm <= 10.0 * cfg_.convergence_tol) {
      result.status = StartStatus::AcceptedAtLimit;
    } else {
      result.status = StartStatus::Discarded;
    }
    return result;
  }

 private:
  const Objective& phi_;
  const DesignSpace& space_;
  const OptimizerConfig& cfg_;
  int k_;
  Vector widths_;
};

Objective wrap(const PhiEvaluator& phi) {
  return [&phi](const ControlPoint& d) { return phi(d); };
}

bool lex_less(const ControlPoint& a, const ControlPoint& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

bool better(const Maximum& a, const Maximum& b) {
  if (a.value != b.value) return a.value > b.value;
  return lex_less(a.point, b.point);
}

// Splits distinct maxima into the tied-optimal set and the rest.
void finalize(MaximaReport& report, std::vector<Maximum> found) {
  std::sort(found.begin(), found.end(), better);
  report.maxima.clear();
  report.secondary.clear();
  if (found.empty()) {
    report.q = 0;
    report.best_value = 0.0;
    return;
  }
  report.best_value = found.front().value;
  const double threshold = report.best_value - report.value_tol * std::abs(report.best_value);
  for (auto& m : found) {
    (m.value >= threshold ? report.maxima : report.secondary).push_back(std::move(m));
  }
  report.q = static_cast<int>(report.maxima.size());
}

}  // namespace

const char* status_name(StartStatus status) {
  switch (status) {
    case StartStatus::Converged: return "converged";
    case StartStatus::AcceptedAtLimit: return "accepted_at_limit";
    case StartStatus::Discarded: return "discarded";
    case StartStatus::Failed: return "failed";
  }
  return "unknown";
}

void OptimizerConfig::validate() const {
  if (starts < 1) throw InputError("optimizer starts must be >= 1");
  if (max_iters < 1) throw InputError("optimizer max_iters must be >= 1");
  if (!(grad_step > 0.0) || !(convergence_tol > 0.0) || !(dedup_tol > 0.0) || !(value_tol > 0.0)) {
    throw InputError("optimizer tolerances and steps must be positive");
  }
}

LocalResult local_maximize(const Objective& phi, const DesignSpace& space,
                           const ControlPoint& start, const OptimizerConfig& cfg) {
  cfg.validate();
  if (!space.contains(start)) {
    throw InputError("starting point " + format_point(start) + " is outside the design space");
  }
  return BoxMinimizer(phi, space, cfg).run(start);
}

LocalResult local_maximize(const PhiEvaluator& phi, const DesignSpace& space,
                           const ControlPoint& start, const OptimizerConfig& cfg) {
  return local_maximize(wrap(phi), space, start, cfg);
}

ControlPoint start_point(const DesignSpace& space, std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  ControlPoint x(space.k());
  for (int r = 0; r < space.k(); ++r) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x(r) = std::min(space.bound(r).lo + u * space.width(r), space.bound(r).hi);
  }
  return x;
}

MaximaReport multistart(const Objective& phi, const DesignSpace& space,
                        const OptimizerConfig& cfg) {
  cfg.validate();
  std::vector<LocalResult> runs(static_cast<std::size_t>(cfg.starts));
  const BoxMinimizer minimizer(phi, space, cfg);
  parallel_for(runs.size(), [&](std::size_t i) {
    const ControlPoint x0 = start_point(space, cfg.seed, i);
    try {
      runs[i] = minimizer.run(x0);
    } catch (const Error& e) {
      runs[i].start = x0;
      runs[i].point = x0;
      runs[i].status = StartStatus::Failed;
      runs[i].error = e.what();
    }
  });
  return cluster_maxima(std::move(runs), space, cfg.dedup_tol, cfg.value_tol);
}

MaximaReport multistart(const PhiEvaluator& phi, const DesignSpace& space,
                        const OptimizerConfig& cfg) {
  return multistart(wrap(phi), space, cfg);
}

MaximaReport cluster_maxima(std::vector<LocalResult> runs, const DesignSpace& space,
                            double dedup_tol, double value_tol) {
  MaximaReport report;
  report.method = "multistart";
  report.dedup_tol = dedup_tol;
  report.value_tol = value_tol;
  report.starts = static_cast<int>(runs.size());

  std::vector<std::size_t> eligible;
  long total_iters = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    total_iters += r.iterations;
    report.max_iterations = std::max(report.max_iterations, r.iterations);
    switch (r.status) {
      case StartStatus::Converged: ++report.starts_converged; break;
      case StartStatus::AcceptedAtLimit: ++report.starts_accepted_at_limit; break;
      case StartStatus::Discarded: ++report.starts_discarded; break;
      case StartStatus::Failed: ++report.starts_failed; break;
    }
    if (r.status == StartStatus::Converged || r.status == StartStatus::AcceptedAtLimit) {
      eligible.push_back(i);
    }
  }
  if (!runs.empty()) report.mean_iterations = static_cast<double>(total_iters) / runs.size();

  std::stable_sort(eligible.begin(), eligible.end(), [&](std::size_t a, std::size_t b) {
    if (runs[a].value != runs[b].value) return runs[a].value > runs[b].value;
    return lex_less(runs[a].point, runs[b].point);
  });

  std::vector<Maximum> found;
  for (std::size_t i : eligible) {
    const auto& r = runs[i];
    auto it = std::find_if(found.begin(), found.end(), [&](const Maximum& m) {
      return space.scaled_distance(m.point, r.point) <= dedup_tol;
    });
    if (it == found.end()) {
      found.push_back({r.point, r.value, 1});
    } else {
      ++it->hits;
    }
  }
  finalize(report, std::move(found));
  report.runs = std::move(runs);
  return report;
}

MaximaReport grid_maximize(const Objective& phi, const DesignSpace& space, double resolution,
                           double value_tol, std::size_t cap) {
  if (!(resolution > 0.0)) throw InputError("grid resolution must be positive");
  const int k = space.k();
  std::vector<std::size_t> counts(static_cast<std::size_t>(k));
  std::vector<std::vector<double>> axes(static_cast<std::size_t>(k));
  double total_d = 1.0;
  for (int r = 0; r < k; ++r) {
    const Bound& b = space.bound(r);
    const double cells = std::ceil(b.width() / resolution - 1e-9);
    counts[r] = static_cast<std::size_t>(cells) + 1;
    total_d *= static_cast<double>(counts[r]);
    if (total_d > static_cast<double>(cap)) {
      throw CapacityError("grid exceeds " + std::to_string(cap) + " lattice points");
    }
    auto& axis = axes[r];
    axis.resize(counts[r]);
    const double spacing = b.width() / cells;
    for (std::size_t i = 0; i < counts[r]; ++i) axis[i] = b.lo + static_cast<double>(i) * spacing;
    axis.back() = b.hi;
  }
  const auto total = static_cast<std::size_t>(total_d);

  // Linear index with the last coordinate fastest.
  auto unravel = [&](std::size_t idx, std::vector<std::size_t>& sub) {
    for (int r = k - 1; r >= 0; --r) {
      sub[r] = idx % counts[r];
      idx /= counts[r];
    }
  };
  auto point_at = [&](const std::vector<std::size_t>& sub) {
    ControlPoint x(k);
    for (int r = 0; r < k; ++r) x(r) = axes[r][sub[r]];
    return x;
  };

  std::vector<double> values(total);
  parallel_for(total, [&](std::size_t i) {
    std::vector<std::size_t> sub(static_cast<std::size_t>(k));
    unravel(i, sub);
    values[i] = checked_eval(phi, point_at(sub));
  });

  // Offsets in {-1,0,1}^k minus the origin.
  std::vector<std::vector<int>> offsets;
  {
    std::vector<int> off(static_cast<std::size_t>(k), -1);
    while (true) {
      if (std::any_of(off.begin(), off.end(), [](int o) { return o != 0; })) offsets.push_back(off);
      int r = k - 1;
      while (r >= 0 && off[r] == 1) off[r--] = -1;
      if (r < 0) break;
      ++off[r];
    }
  }
  auto neighbours = [&](std::size_t idx, auto&& visit) {
    std::vector<std::size_t> sub(static_cast<std::size_t>(k));
    unravel(idx, sub);
    for (const auto& off : offsets) {
      std::size_t lin = 0;
      bool inside = true;
      for (int r = 0; r < k; ++r) {
        const long s = static_cast<long>(sub[r]) + off[r];
        if (s < 0 || s >= static_cast<long>(counts[r])) {
          inside = false;
          break;
        }
        lin = lin * counts[r] + static_cast<std::size_t>(s);
      }
      if (inside) visit(lin);
    }
  };

  std::vector<char> is_max(total, 0);
  for (std::size_t i = 0; i < total; ++i) {
    bool local = true;
    neighbours(i, [&](std::size_t j) {
      if (values[j] > values[i]) local = false;
    });
    is_max[i] = local;
  }

  std::vector<char> seen(total, 0);
  std::vector<Maximum> found;
  std::vector<std::size_t> sub(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < total; ++i) {
    if (!is_max[i] || seen[i]) continue;
    int members = 0;
    std::vector<std::size_t> stack{i};
    seen[i] = 1;
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      ++members;
      neighbours(cur, [&](std::size_t j) {
        if (is_max[j] && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      });
    }
    unravel(i, sub);
    found.push_back({point_at(sub), values[i], members});
  }

  MaximaReport report;
  report.method = "grid";
  report.value_tol = value_tol;
  report.grid_points = total;
  finalize(report, std::move(found));
  return report;
}

MaximaReport grid_maximize(const PhiEvaluator& phi, const DesignSpace& space, double resolution,
                           double value_tol, std::size_t cap) {
  return grid_maximize(wrap(phi), space, resolution, value_tol, cap);
}

}  // namespace figopt
