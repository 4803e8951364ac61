#pragma once

#include "figopt/model.hpp"
#include "figopt/optimizer.hpp"
#include "figopt/phi.hpp"
#include "figopt/priors.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace figopt {

// Allocates n runs round-robin over the tied-optimal maxima, taken in
// lexicographic order of their points.
Design assemble_design(const MaximaReport& report, int n);

// Distinct points: classes of points within `tol` of each other. The first
// overload uses plain Euclidean distance, the second scales each coordinate
// by its bound width.
int support_points(const Design& design, double tol = 1e-6);
int support_points(const Design& design, const DesignSpace& space, double tol = 1e-6);

// Singular values above tol_factor * max(n, p) * sigma_max * epsilon.
int numerical_rank(const Matrix& m, double tol_factor = 1.0);

struct SymbolicFlag {
  enum class Kind {
    TooManyParameters,  // p > 2^C
    EvenPowerOverAbsent,  // u[r,j1] == 0 and u[r,j2] > 1 even
    OddPowerOverLinear,   // u[r,j1] == 1 and u[r,j2] > 1 odd
  };
  Kind kind;
  int r = -1;   // 0-based, -1 when not applicable
  int j1 = -1;
  int j2 = -1;
  std::string description;
};

const char* flag_kind_name(SymbolicFlag::Kind kind);

struct RankDraw {
  Vector theta;
  int rank = 0;
  // det(I) / (tr(I)/p)^p for the information matrix at this draw.
  double det_ratio = 0.0;
  double min_eigenvalue = 0.0;
};

struct RedundancyReport {
  int q = 0;
  int p = 0;
  bool under_supported = false;
  std::vector<RankDraw> numerical_ranks;
  bool redundant = false;
  int deficient_draws = 0;
  bool singular_at_all_draws = false;
  int draws = 0;
  std::uint64_t seed = 0;
  int resamples = 0;

  // Populated by linear_model_redundancy.
  std::vector<SymbolicFlag> symbolic_flags;
  std::optional<int> q_upper_bound;
  std::optional<int> symmetric_coordinates;

  std::vector<std::string> warnings;
};

inline constexpr double kSingularDetRatio = 1e-10;
inline constexpr int kDefaultRedundancyDraws = 100;

// Ranks of M over prior draws. Draws outside the model's domain are
// rejected and redrawn. q is set to the design's support-point count.
RedundancyReport redundancy_check(const ModelSpec& model, const PriorSpec& prior,
                                  const Design& design, int draws, std::uint64_t seed);

// Closed-form check for monomial normal linear models on a box: every
// FIG-optimal coordinate sits at max(|a_r|, |b_r|), so q <= 2^C with C the
// number of coordinates with |a_r| == |b_r|.
RedundancyReport linear_model_redundancy(const RegressionSpec& spec, const DesignSpace& space);

struct FigReport {
  MaximaReport maxima;
  Design design;
  int support = 0;
  double expected_fig = 0.0;
  RedundancyReport redundancy;
  std::optional<RedundancyReport> symbolic;
  std::vector<std::string> verdicts;
};

struct PipelineOptions {
  int quadrature_order = kDefaultQuadratureOrder;
  int redundancy_draws = kDefaultRedundancyDraws;
  std::uint64_t redundancy_seed = 1;
};

// multistart -> assemble_design -> redundancy_check (plus the symbolic
// check for normal linear models).
FigReport fig_report(const ModelSpec& model, const PriorSpec& prior, const DesignSpace& space,
                     int n, const OptimizerConfig& cfg, const PipelineOptions& options = {});

// The same pipeline starting from an existing multistart result for `ev`.
FigReport fig_report_from_maxima(const PhiEvaluator& ev, const DesignSpace& space,
                                 MaximaReport maxima, int n, const PipelineOptions& options = {});

}  // namespace figopt
