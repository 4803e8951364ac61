#include "figopt/diagnosis.hpp"

#include "figopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace figopt {

namespace {

int count_classes(const Design& design, const std::function<double(const ControlPoint&, const ControlPoint&)>& dist,
                  double tol) {
  std::vector<const ControlPoint*> reps;
  for (const auto& d : design.points()) {
    const bool known = std::any_of(reps.begin(), reps.end(),
                                   [&](const ControlPoint* r) { return dist(*r, d) <= tol; });
    if (!known) reps.push_back(&d);
  }
  return static_cast<int>(reps.size());
}

Matrix information_for_check(const ModelSpec& model, const Vector& theta, const Design& design) {
  // The determinant ratio is invariant to a positive rescaling of the
  // information, so unknown scales are evaluated at gamma = 1.
  double gamma = 1.0;
  if (const auto* known = std::get_if<KnownScale>(&model.scale())) gamma = known->gamma;
  return fisher_information(model, theta, design, gamma);
}

}  // namespace

Design assemble_design(const MaximaReport& report, int n) {
  if (report.maxima.empty()) throw InputError("cannot assemble a design from an empty maxima report");
  if (n < 1) throw InputError("a design needs at least one run");
  std::vector<ControlPoint> tied;
  for (const auto& m : report.maxima) tied.push_back(m.point);
  std::sort(tied.begin(), tied.end(), [](const ControlPoint& a, const ControlPoint& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  std::vector<ControlPoint> runs;
  runs.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) runs.push_back(tied[static_cast<std::size_t>(i) % tied.size()]);
  return Design(std::move(runs));
}

int support_points(const Design& design, double tol) {
  return count_classes(design, [](const ControlPoint& a, const ControlPoint& b) { return (a - b).norm(); }, tol);
}

int support_points(const Design& design, const DesignSpace& space, double tol) {
  return count_classes(
      design, [&](const ControlPoint& a, const ControlPoint& b) { return space.scaled_distance(a, b); }, tol);
}

int numerical_rank(const Matrix& m, double tol_factor) {
  if (m.size() == 0) return 0;
  if (!m.allFinite()) throw InputError("numerical_rank needs finite matrix entries");
  const Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& sv = svd.singularValues();
  const double sigma_max = sv.size() ? sv.maxCoeff() : 0.0;
  const double tol = tol_factor * static_cast<double>(std::max(m.rows(), m.cols())) * sigma_max *
                     std::numeric_limits<double>::epsilon();
  return static_cast<int>((sv.array() > tol).count());
}

const char* flag_kind_name(SymbolicFlag::Kind kind) {
  switch (kind) {
    case SymbolicFlag::Kind::TooManyParameters: return "too_many_parameters";
    case SymbolicFlag::Kind::EvenPowerOverAbsent: return "even_power_over_absent";
    case SymbolicFlag::Kind::OddPowerOverLinear: return "odd_power_over_linear";
  }
  return "unknown";
}

RedundancyReport redundancy_check(const ModelSpec& model, const PriorSpec& prior,
                                  const Design& design, int draws, std::uint64_t seed) {
  if (draws < 1) throw InputError("redundancy check needs at least one prior draw");
  if (prior.p() != model.p()) throw InputError("prior and model disagree on p");
  RedundancyReport report;
  report.p = model.p();
  report.q = support_points(design);
  report.under_supported = report.q < report.p;
  report.draws = draws;
  report.seed = seed;

  const int max_resamples = 1000 * draws;
  std::vector<Vector> thetas = sample_prior(prior, draws, seed);
  for (auto& theta : thetas) {
    while (true) {
      try {
        const Matrix m = build_M(model, theta, design);
        RankDraw rd;
        rd.theta = theta;
        rd.rank = numerical_rank(m);
        const Matrix info = information_for_check(model, theta, design);
        const Vector eig = Eigen::SelfAdjointEigenSolver<Matrix>(info, Eigen::EigenvaluesOnly).eigenvalues();
        rd.min_eigenvalue = eig.minCoeff();
        const double mean_eig = info.trace() / report.p;
        rd.det_ratio = mean_eig > 0.0 ? (eig.array() / mean_eig).prod() : 0.0;
        report.numerical_ranks.push_back(std::move(rd));
        break;
      } catch (const DomainError&) {
        if (++report.resamples > max_resamples) {
          throw DomainError("prior draws keep falling outside the model domain");
        }
        theta = sample_prior(prior, 1, seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(report.resamples))
                    .front();
      }
    }
  }

  report.deficient_draws = static_cast<int>(std::count_if(
      report.numerical_ranks.begin(), report.numerical_ranks.end(),
      [&](const RankDraw& rd) { return rd.rank < report.p; }));
  report.redundant = report.deficient_draws == draws;
  report.singular_at_all_draws = std::all_of(
      report.numerical_ranks.begin(), report.numerical_ranks.end(),
      [](const RankDraw& rd) { return rd.det_ratio <= kSingularDetRatio; });
  if (report.redundant) {
    report.warnings.push_back(
        "parameter redundant: no unique classical estimates; a Bayesian analysis will be "
        "non-identifiable in some parameter directions");
  }
  return report;
}

RedundancyReport linear_model_redundancy(const RegressionSpec& spec, const DesignSpace& space) {
  if (spec.k() != space.k()) throw InputError("regression and design space disagree on k");
  RedundancyReport report;
  report.p = spec.p();
  int c = 0;
  for (const auto& b : space.bounds()) c += std::abs(b.lo) == std::abs(b.hi) ? 1 : 0;
  report.symmetric_coordinates = c;
  const int bound = c >= 30 ? std::numeric_limits<int>::max() : (1 << c);
  report.q_upper_bound = bound;
  report.q = bound;
  report.under_supported = report.p > bound;
  if (report.under_supported) {
    report.symbolic_flags.push_back({SymbolicFlag::Kind::TooManyParameters, -1, -1, -1,
                                     "p=" + std::to_string(report.p) + " > 2^C=" + std::to_string(bound)});
  }
  for (int r = 0; r < spec.k(); ++r) {
    for (int j1 = 0; j1 < spec.p(); ++j1) {
      for (int j2 = 0; j2 < spec.p(); ++j2) {
        if (j1 == j2) continue;
        const int u1 = spec.exponent(r, j1);
        const int u2 = spec.exponent(r, j2);
        const auto where = "d" + std::to_string(r + 1) + ": u[" + std::to_string(r + 1) + "," +
                           std::to_string(j1 + 1) + "]=" + std::to_string(u1) + ", u[" +
                           std::to_string(r + 1) + "," + std::to_string(j2 + 1) + "]=" + std::to_string(u2);
        if (u1 == 0 && u2 > 1 && u2 % 2 == 0) {
          report.symbolic_flags.push_back({SymbolicFlag::Kind::EvenPowerOverAbsent, r, j1, j2, where});
        } else if (u1 == 1 && u2 > 1 && u2 % 2 == 1) {
          report.symbolic_flags.push_back({SymbolicFlag::Kind::OddPowerOverLinear, r, j1, j2, where});
        }
      }
    }
  }
  report.redundant = !report.symbolic_flags.empty();
  if (report.redundant) {
    report.warnings.push_back(
        "parameter redundant: no unique classical estimates; a Bayesian analysis will be "
        "non-identifiable in some parameter directions");
  }
  return report;
}

FigReport fig_report(const ModelSpec& model, const PriorSpec& prior, const DesignSpace& space,
                     int n, const OptimizerConfig& cfg, const PipelineOptions& options) {
  if (space.k() != model.k()) throw InputError("design space and model disagree on k");
  const PhiEvaluator ev(model, prior, options.quadrature_order);
  return fig_report_from_maxima(ev, space, multistart(ev, space, cfg), n, options);
}

FigReport fig_report_from_maxima(const PhiEvaluator& ev, const DesignSpace& space,
                                 MaximaReport maxima, int n, const PipelineOptions& options) {
  const ModelSpec& model = ev.model();
  if (maxima.maxima.empty()) throw EvaluationError("no local search converged; no maxima found");
  Design design = assemble_design(maxima, n);
  RedundancyReport redundancy =
      redundancy_check(model, ev.prior(), design, options.redundancy_draws, options.redundancy_seed);
  redundancy.q = maxima.q;
  redundancy.under_supported = maxima.q < model.p();

  FigReport out{std::move(maxima), design, support_points(design, space), expected_fig(ev, design),
                std::move(redundancy), std::nullopt, {}};
  if (model.family() == Family::NormalLinear) {
    out.symbolic = linear_model_redundancy(*model.regression(), space);
  }

  const auto& red = out.redundancy;
  const std::string qp = "q=" + std::to_string(red.q);
  const std::string pp = "p=" + std::to_string(red.p);
  out.verdicts.push_back(red.under_supported ? "UNDER-SUPPORTED: " + qp + " < " + pp
                                             : "SUPPORTED: " + qp + " >= " + pp);
  int min_rank = red.p;
  int max_rank = 0;
  for (const auto& rd : red.numerical_ranks) {
    min_rank = std::min(min_rank, rd.rank);
    max_rank = std::max(max_rank, rd.rank);
  }
  const std::string at = " at " + std::to_string(red.deficient_draws) + "/" +
                         std::to_string(red.draws) + " prior draws";
  if (red.deficient_draws == 0) {
    out.verdicts.push_back("rank(M)=" + pp.substr(2) + " = p at all " + std::to_string(red.draws) +
                           " prior draws");
  } else if (min_rank == max_rank) {
    out.verdicts.push_back("rank(M)=" + std::to_string(max_rank) + " < " + pp + at);
  } else {
    out.verdicts.push_back("rank(M) in [" + std::to_string(min_rank) + "," + std::to_string(max_rank) +
                           "], < " + pp + at);
  }
  out.verdicts.push_back(red.redundant ? "PARAMETER REDUNDANT" : "NOT REDUNDANT");
  return out;
}

}  // namespace figopt
