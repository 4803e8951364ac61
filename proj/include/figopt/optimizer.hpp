#pragma once

#include "figopt/model.hpp"
#include "figopt/phi.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace figopt {

struct OptimizerConfig {
  int starts = 1000;
  std::uint64_t seed = 1;
  // Finite-difference step as a fraction of each bound width.
  double grad_step = 1e-6;
  // Euclidean norm of the projected gradient.
  double convergence_tol = 1e-8;
  int max_iters = 500;
  // Scaled Euclidean distance below which two endpoints are one maximum.
  double dedup_tol = 1e-4;
  // Maxima within value_tol (relative) of the best are tied for the optimum.
  double value_tol = 1e-6;

  void validate() const;
  friend bool operator==(const OptimizerConfig&, const OptimizerConfig&) = default;
};

using Objective = std::function<double(const ControlPoint&)>;

enum class StartStatus {
  Converged,        // projected gradient norm <= tol
  AcceptedAtLimit,  // stopped early but projected gradient norm <= 10 tol
  Discarded,        // stopped early with a larger projected gradient
  Failed,           // the objective threw or returned a non-finite value
};

const char* status_name(StartStatus status);

struct LocalResult {
  ControlPoint start;
  ControlPoint point;
  double value = 0.0;
  int iterations = 0;
  double pg_norm = 0.0;
  StartStatus status = StartStatus::Converged;
  std::string error;
};

struct Maximum {
  ControlPoint point;
  double value = 0.0;
  int hits = 0;  // starts (or lattice points) absorbed into this maximum
};

struct MaximaReport {
  std::string method;  // "multistart" or "grid"
  // The tied-optimal set, sorted by value descending then lexicographically.
  std::vector<Maximum> maxima;
  // Lower local maxima, retained for inspection; not counted in q.
  std::vector<Maximum> secondary;
  int q = 0;
  double best_value = 0.0;
  double dedup_tol = 0.0;
  double value_tol = 0.0;

  int starts = 0;
  int starts_converged = 0;
  int starts_accepted_at_limit = 0;
  int starts_discarded = 0;
  int starts_failed = 0;
  double mean_iterations = 0.0;
  int max_iterations = 0;
  std::size_t grid_points = 0;

  std::vector<LocalResult> runs;
};

// Projected quasi-Newton ascent from `start` (which must lie in the box).
// Iterates never leave the box and the objective never decreases.
LocalResult local_maximize(const Objective& phi, const DesignSpace& space,
                           const ControlPoint& start, const OptimizerConfig& cfg);
LocalResult local_maximize(const PhiEvaluator& phi, const DesignSpace& space,
                           const ControlPoint& start, const OptimizerConfig& cfg);

// cfg.starts local searches from uniform starting points. Start i draws its
// point from its own seeded stream, so results do not depend on scheduling.
MaximaReport multistart(const Objective& phi, const DesignSpace& space,
                        const OptimizerConfig& cfg);
MaximaReport multistart(const PhiEvaluator& phi, const DesignSpace& space,
                        const OptimizerConfig& cfg);

// Uniform starting point number `index` for the given seed.
ControlPoint start_point(const DesignSpace& space, std::uint64_t seed, std::size_t index);

// Groups local-search endpoints into distinct maxima. Exposed so the same
// endpoints can be re-clustered under different tolerances.
MaximaReport cluster_maxima(std::vector<LocalResult> runs, const DesignSpace& space,
                            double dedup_tol, double value_tol);

// Exhaustive lattice scan with spacing at most `resolution` per coordinate
// (endpoints included). A lattice point is a local maximum when it is >= all
// of its 3^k - 1 neighbours; adjacent local maxima form one plateau maximum.
MaximaReport grid_maximize(const Objective& phi, const DesignSpace& space, double resolution,
                           double value_tol = 1e-6, std::size_t cap = 10'000'000);
MaximaReport grid_maximize(const PhiEvaluator& phi, const DesignSpace& space, double resolution,
                           double value_tol = 1e-6, std::size_t cap = 10'000'000);

}  // namespace figopt
