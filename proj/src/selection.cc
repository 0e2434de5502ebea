#include "dqst/selection.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "dqst/errors.h"

namespace dqst {
namespace {

constexpr double kInvGolden = 0.6180339887498949;

double GridTime(int g, int n_grid, double horizon) {
  return horizon * static_cast<double>(g) / static_cast<double>(n_grid - 1);
}

void RequireHorizon(double horizon, const SelectionOptions& options) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw InvalidInputError("time horizon must be positive and finite");
  }
  if (options.n_grid < 2) {
    throw InvalidInputError("time grid needs at least 2 points");
  }
}

// a beats b only when larger by more than the relative tie tolerance.
bool Beats(double a, double b, double tie_tol) {
  return a > b + tie_tol * std::max(std::abs(a), std::abs(b));
}

int BestGridIndex(const std::vector<double>& values, double tie_tol) {
  int best = 0;
  for (int g = 1; g < static_cast<int>(values.size()); ++g) {
    if (Beats(values[g], values[best], tie_tol)) best = g;
  }
  return best;
}

// Golden-section refinement of f around grid point g. Returns the best
// point seen; the grid point itself wins unless beaten beyond the tie
// tolerance.
TimeOptimum Refine(const std::function<double(double)>& f, int g,
                   double horizon, const SelectionOptions& options) {
  const int n = options.n_grid;
  TimeOptimum best{GridTime(g, n, horizon), 0.0};
  best.objective = f(best.time);
  double a = GridTime(std::max(g - 1, 0), n, horizon);
  double b = GridTime(std::min(g + 1, n - 1), n, horizon);
  const double tol = options.time_tol * horizon;

  double c = b - kInvGolden * (b - a);
  double d = a + kInvGolden * (b - a);
  double fc = f(c);
  double fd = f(d);
  TimeOptimum seen = best;
  auto note = [&](double t, double v) {
    if (v > seen.objective) seen = {t, v};
  };
  note(c, fc);
  note(d, fd);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvGolden * (b - a);
      fc = f(c);
      note(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvGolden * (b - a);
      fd = f(d);
      note(d, fd);
    }
  }
  return Beats(seen.objective, best.objective, options.tie_tol) ? seen : best;
}

}  // namespace

TimeOptimum OptimizeTime(const OperatorVector& x,
                         const Eigen::MatrixXcd& projector,
                         const Evolver& evolver, double horizon,
                         const SelectionOptions& options) {
  RequireHorizon(horizon, options);
  const Eigen::Index n = evolver.generator().size();
  if (x.size() != n || projector.rows() != n || projector.cols() != n) {
    throw DimensionError("optimize time: operand sizes do not match");
  }
  auto f = [&](double t) {
    return (projector * evolver.Apply(t, x)).squaredNorm();
  };
  std::vector<double> values(options.n_grid);
  for (int g = 0; g < options.n_grid; ++g) {
    values[g] = f(GridTime(g, options.n_grid, horizon));
  }
  return Refine(f, BestGridIndex(values, options.tie_tol), horizon, options);
}

double DefaultHorizon(const Superoperator& generator) {
  const auto lambda2 = SlowestDecayEigenvalue(generator);
  if (!lambda2 || !(lambda2->real() < -1e-12)) {
    throw InvalidInputError(
        "generator has no decaying mode; supply the time horizon explicitly");
  }
  return 4.0 / std::abs(lambda2->real());
}

MeasurementPlan GreedyPlan(const Superoperator& generator,
                           const MeasurementSet& X, double horizon,
                           const SelectionOptions& options) {
  RequireHorizon(horizon, options);
  if (generator.kind != SuperoperatorKind::kGenerator) {
    throw InvalidInputError("greedy plan needs a continuous-time generator");
  }
  const ObservabilityReport report =
      KalmanReport(generator, X, options.rank_policy);
  const Evolver evolver(generator);
  const Eigen::Index n = generator.size();
  const int m = X.size();
  const int n_grid = options.n_grid;
  const Eigen::MatrixXcd start = X.VecMatrix();

  // Trajectories on the grid: column g·m + i holds e^{L t_g} x_i.
  Eigen::MatrixXcd grid(n, static_cast<Eigen::Index>(m) * n_grid);
  for (int g = 0; g < n_grid; ++g) {
    grid.middleCols(static_cast<Eigen::Index>(g) * m, m) =
        evolver.Apply(GridTime(g, n_grid, horizon), start);
  }
  Eigen::VectorXd residual = grid.colwise().squaredNorm().transpose();

  MeasurementPlan plan;
  plan.horizon = horizon;
  plan.target_rank = report.rank;
  plan.dim = generator.dim;
  Eigen::MatrixXcd Q(n, 0);
  const double rel_threshold = options.rank_policy.Threshold(n, n, 1.0);

  auto project_out = [&](const OperatorVector& y) {
    OperatorVector r = y;
    for (int pass = 0; pass < 2 && Q.cols() > 0; ++pass) {
      r -= Q * (Q.adjoint() * r);
    }
    return r;
  };
  auto accept = [&](int obs, double t, OperatorVector evolved) {
    const OperatorVector r = project_out(evolved);
    const double norm = r.norm();
    if (!(norm > rel_threshold * evolved.norm())) return false;
    const OperatorVector q = r / norm;
    Eigen::MatrixXcd grown(n, Q.cols() + 1);
    grown << Q, q;
    Q = std::move(grown);
    residual -= (q.adjoint() * grid).cwiseAbs2().transpose();
    residual = residual.cwiseMax(0.0);
    PlanEntry entry;
    entry.observable = obs;
    entry.time = t;
    entry.objective = norm * norm;
    entry.evolved = std::move(evolved);
    entry.cumulative_rank = static_cast<int>(Q.cols());
    plan.entries.push_back(std::move(entry));
    return true;
  };

  const int id = X.identity_index();
  accept(id, 0.0, start.col(id));

  std::vector<int> others;
  for (int i = 0; i < m; ++i) {
    if (i != id) others.push_back(i);
  }
  if (!others.empty() && Q.cols() < plan.target_rank) {
    int first = others.front();
    if (options.first_pick_seed) {
      std::mt19937_64 rng(*options.first_pick_seed);
      std::uniform_int_distribution<std::size_t> pick(0, others.size() - 1);
      first = others[pick(rng)];
    }
    accept(first, 0.0, start.col(first));
  }

  // With an eigendecomposition L = VΛV⁻¹ and an orthonormal basis C of the
  // current complement, ‖Π⊥e^{Lt}x_i‖ = ‖K·(e^{Λt}c_i)‖ where K = C†V and
  // c_i = V⁻¹x_i. Each accepted direction removes one row of K through a
  // Householder reflection, so C itself is never formed.
  const bool spectral = evolver.spectral();
  Eigen::MatrixXcd K, coords;
  if (spectral) {
    coords = evolver.Coordinates(start);
    K = OrthogonalComplement(Q).adjoint() * evolver.eigenvectors();
  }
  auto phased = [&](int i, double t) -> Eigen::VectorXcd {
    return (evolver.eigenvalues() * t).array().exp().matrix().cwiseProduct(
        coords.col(i));
  };
  Eigen::MatrixXcd grid_coords;
  if (spectral) grid_coords = evolver.Coordinates(grid);

  // The running residuals lose relative accuracy as they shrink, so they
  // are recomputed directly once they fall by a factor kRefresh.
  constexpr double kRefresh = 1e-6;
  auto recompute = [&]() {
    if (spectral) {
      residual = (K * grid_coords).colwise().squaredNorm().transpose();
    } else {
      Eigen::MatrixXcd r = grid;
      for (int pass = 0; pass < 2; ++pass) r -= Q * (Q.adjoint() * r);
      residual = r.colwise().squaredNorm().transpose();
    }
  };
  double reference = residual.maxCoeff();

  while (Q.cols() < plan.target_rank) {
    if (residual.maxCoeff() < kRefresh * reference) {
      recompute();
      reference = residual.maxCoeff();
    }
    int best_obs = -1;
    TimeOptimum best;
    for (int i = 0; i < m; ++i) {
      std::function<double(double)> f;
      if (spectral) {
        f = [&, i](double t) { return (K * phased(i, t)).squaredNorm(); };
      } else {
        f = [&, i](double t) {
          return project_out(evolver.Apply(t, OperatorVector(start.col(i))))
              .squaredNorm();
        };
      }
      std::vector<double> values(n_grid);
      for (int g = 0; g < n_grid; ++g) {
        values[g] = residual(static_cast<Eigen::Index>(g) * m + i);
      }
      const TimeOptimum opt =
          Refine(f, BestGridIndex(values, options.tie_tol), horizon, options);
      if (best_obs < 0 || Beats(opt.objective, best.objective, options.tie_tol)) {
        best_obs = i;
        best = opt;
      }
    }
    const OperatorVector evolved =
        evolver.Apply(best.time, OperatorVector(start.col(best_obs)));
    if (!accept(best_obs, best.time, evolved)) break;
    if (spectral && K.rows() > 1) {
      // Rotate the complement so its first direction is the accepted one,
      // then drop it.
      Eigen::VectorXcd u = K * phased(best_obs, best.time);
      Eigen::VectorXcd essential(u.size() - 1);
      Complex tau;
      double beta;
      u.makeHouseholder(essential, tau, beta);
      Eigen::VectorXcd workspace(K.cols());
      K.applyHouseholderOnTheLeft(essential, tau, workspace.data());
      K = K.bottomRows(K.rows() - 1).eval();
    }
  }
  plan.final_rank = static_cast<int>(Q.cols());
  return plan;
}

}  // namespace dqst
