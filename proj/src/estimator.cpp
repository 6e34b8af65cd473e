#include "afm/estimator.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "afm/errors.hpp"
#include "afm/rng.hpp"

namespace afm {

FactorMatrix init_factors(const Eigen::MatrixXd& centered, int q, InitMethod method,
                          std::uint64_t seed) {
  const int N = static_cast<int>(centered.rows());
  const int T = static_cast<int>(centered.cols());
  if (q >= N) {
    throw std::invalid_argument("init_factors: need q < N, got q = " +
                                std::to_string(q) + ", N = " + std::to_string(N));
  }
  Eigen::MatrixXd raw(T, q);
  if (method == InitMethod::random) {
    RandomStream stream(seed);
    for (int l = 0; l < q; ++l) {
      for (int t = 0; t < T; ++t) raw(t, l) = stream.next_unit();
    }
  } else {
    // Principal component scores of the T x N data matrix (time points as
    // observations); columns are already centered per series.
    const Eigen::MatrixXd cov = centered * centered.transpose() / T;  // N x N
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success) {
      throw NumericalError("init_factors: eigen decomposition failed");
    }
    // Eigenvalues come in ascending order; take the top q.
    for (int l = 0; l < q; ++l) {
      raw.col(l) = centered.transpose() * eig.eigenvectors().col(N - 1 - l);
    }
  }
  return FactorMatrix{rank_to_grid(raw)};
}

CoefficientTensor fit_functions_step(const Eigen::MatrixXd& centered,
                                     const FactorMatrix& factors,
                                     const BasisSpec& basis, double ridge) {
  const int N = static_cast<int>(centered.rows());
  const int T = static_cast<int>(centered.cols());
  const int q = factors.n_factors();
  const int d = basis.dim;
  if (factors.n_time() != T) {
    throw std::invalid_argument("fit_functions_step: factor rows must equal T");
  }
  if (ridge < 0.0) throw std::invalid_argument("fit_functions_step: ridge >= 0");

  // Stacked design is shared by every series: solve the normal equations
  // once for all N right-hand sides.
  Eigen::MatrixXd design(T, q * d);
  for (int l = 0; l < q; ++l) {
    design.middleCols(l * d, d) = design_matrix(basis, factors.values.col(l));
  }
  Eigen::MatrixXd gram = design.transpose() * design;
  gram.diagonal().array() += ridge;
  const Eigen::MatrixXd rhs = design.transpose() * centered.transpose();  // (qd) x N

  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  // For q >= 2 the stacked design is rank deficient by exactly q - 1: every
  // block spans the constant function (partition of unity), and the centering
  // below resolves that ambiguity.  The normal equations stay consistent, so
  // the pivoted LDLT still minimizes the residual; only deficiency beyond
  // the structural q - 1 makes the per-series problems ill-posed.
  const Eigen::VectorXd diag = ldlt.vectorD().cwiseAbs();
  const double pivot_tol = 1e-10 * diag.maxCoeff();
  const int deficiency = static_cast<int>((diag.array() <= pivot_tol).count());
  Eigen::MatrixXd solution = ldlt.solve(rhs);
  if (ldlt.info() != Eigen::Success || deficiency > q - 1 || !solution.allFinite()) {
    throw NumericalError(
        "fit_functions_step: singular normal equations; use a positive ridge");
  }

  CoefficientTensor coeffs(N, q, d);
  coeffs.flat() = solution.transpose();

  // Center each fitted component over its factor column.  The constant
  // function has all-ones coefficients (partition of unity), so the shift is
  // a uniform subtraction in coefficient space.
  for (int l = 0; l < q; ++l) {
    const Eigen::RowVectorXd col_mean =
        design.middleCols(l * d, d).colwise().mean();  // 1 x d
    const Eigen::VectorXd component_means = coeffs.factor_block(l) * col_mean.transpose();
    coeffs.factor_block(l).colwise() -= component_means;
  }
  return coeffs;
}

namespace {

// Fitted values of every series at every grid candidate for one factor:
// result(i, c) = psi(grid[c])' b_il.
Eigen::MatrixXd candidate_table(const CoefficientTensor& coeffs, int l,
                                const Eigen::MatrixXd& grid_design) {
  return coeffs.factor_block(l) * grid_design.transpose();
}

// For each time point pick the candidate minimizing
// ||target_col - table_col||^2; scan order breaks ties toward the smaller
// grid value.  Uses the expansion ||x - m_c||^2 = ||x||^2 - 2 x'm_c + ||m_c||^2.
void best_candidates(const Eigen::MatrixXd& target, const Eigen::MatrixXd& table,
                     std::vector<int>& choice) {
  const int T = static_cast<int>(target.cols());
  const int C = static_cast<int>(table.cols());
  const Eigen::MatrixXd cross = target.transpose() * table;       // T x C
  const Eigen::VectorXd norms = table.colwise().squaredNorm();    // C
  for (int t = 0; t < T; ++t) {
    int best = 0;
    double best_obj = norms[0] - 2.0 * cross(t, 0);
    for (int c = 1; c < C; ++c) {
      const double obj = norms[c] - 2.0 * cross(t, c);
      if (obj < best_obj) {
        best_obj = obj;
        best = c;
      }
    }
    choice[t] = best;
  }
}

}  // namespace

RawFactors fit_factors_step(const Eigen::MatrixXd& centered,
                            const CoefficientTensor& coeffs, const BasisSpec& basis,
                            const Eigen::MatrixXd& current, int sweeps) {
  const int N = static_cast<int>(centered.rows());
  const int T = static_cast<int>(centered.cols());
  const int q = coeffs.n_factors();
  if (coeffs.n_series() != N || current.rows() != T || current.cols() != q ||
      coeffs.dim() != basis.dim) {
    throw std::invalid_argument("fit_factors_step: inconsistent dimensions");
  }
  if (sweeps < 1) throw std::invalid_argument("fit_factors_step: sweeps >= 1");

  const Eigen::VectorXd grid = sieve_grid(T);
  const Eigen::MatrixXd grid_design = design_matrix(basis, grid);  // T x d

  std::vector<int> choice(T);
  Eigen::MatrixXd out(T, q);

  if (q == 1) {
    const Eigen::MatrixXd table = candidate_table(coeffs, 0, grid_design);
    best_candidates(centered, table, choice);
    for (int t = 0; t < T; ++t) out(t, 0) = grid[choice[t]];
    return RawFactors{out};
  }

  // Coordinate descent: keep per-factor fitted values and a running residual.
  std::vector<Eigen::MatrixXd> tables(q);
  std::vector<Eigen::MatrixXd> fitted(q);
  Eigen::MatrixXd residual = centered;
  for (int l = 0; l < q; ++l) {
    tables[l] = candidate_table(coeffs, l, grid_design);
    const Eigen::MatrixXd psi = design_matrix(basis, current.col(l));
    fitted[l] = coeffs.factor_block(l) * psi.transpose();  // N x T
    residual -= fitted[l];
  }
  out = current;
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    for (int l = 0; l < q; ++l) {
      const Eigen::MatrixXd partial = residual + fitted[l];
      best_candidates(partial, tables[l], choice);
      for (int t = 0; t < T; ++t) {
        out(t, l) = grid[choice[t]];
        fitted[l].col(t) = tables[l].col(choice[t]);
      }
      residual = partial - fitted[l];
    }
  }
  return RawFactors{out};
}

FactorMatrix project_to_grid(const RawFactors& raw) {
  validate(raw);
  FactorMatrix projected{rank_to_grid(raw.values)};
  validate(projected);
  return projected;
}

FittedModel order_factors(FittedModel model) {
  const int q = model.n_factors();
  if (q <= 1) return model;
  std::vector<double> strength(q, 0.0);
  for (int l = 0; l < q; ++l) {
    for (int i = 0; i < model.n_series(); ++i) {
      strength[l] += l2_norm(model.basis, model.coeffs.slice(i, l).transpose());
    }
  }
  std::vector<int> order(q);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return strength[a] > strength[b]; });

  FittedModel out = model;
  for (int l = 0; l < q; ++l) {
    out.factors.values.col(l) = model.factors.values.col(order[l]);
    out.coeffs.factor_block(l) = model.coeffs.factor_block(order[l]);
  }
  return out;
}

namespace {

struct StartResult {
  CoefficientTensor coeffs;
  FactorMatrix factors;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> recorded;
  bool converged = false;
};

StartResult run_start(const Eigen::MatrixXd& centered, const BasisSpec& basis,
                      const EstimatorConfig& config, FactorMatrix factors) {
  StartResult result;
  double prev = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= config.max_iter; ++iter) {
    CoefficientTensor coeffs =
        fit_functions_step(centered, factors, basis, config.ridge);
    const RawFactors raw = fit_factors_step(centered, coeffs, basis, factors.values,
                                            config.factor_grid_sweeps);
    factors = project_to_grid(raw);
    const double current = loss(centered, basis, coeffs, factors.values);
    if (!std::isfinite(current)) {
      throw NumericalError("fit: loss diverged to a non-finite value");
    }
    if (current < result.best_loss) {
      result.best_loss = current;
      result.coeffs = coeffs;
      result.factors = factors;
    }
    // The recorded trace follows the best iterate so far: the projection can
    // bump the raw loss locally while the search keeps moving.
    result.recorded.push_back(result.best_loss);
    // Stop once the post-projection loss stalls between consecutive outer
    // iterations.
    if (iter > 1 && std::abs(current - prev) <= config.rel_tol * std::max(prev, 1e-300)) {
      result.converged = true;
      break;
    }
    prev = current;
  }
  return result;
}

}  // namespace

std::pair<FittedModel, FitReport> fit(const Panel& panel, const EstimatorConfig& config) {
  validate(panel);
  validate(config);
  const int N = panel.n_series();
  const int T = panel.n_time();
  if (config.q >= N) {
    throw std::invalid_argument("fit: need N > q, got q = " + std::to_string(config.q) +
                                ", N = " + std::to_string(N));
  }

  EstimatorConfig resolved = config;
  if (resolved.d == 0) resolved.d = default_d(T, resolved.eta);
  const BasisSpec basis = make_basis(resolved.d);

  const Eigen::VectorXd means = panel.values.rowwise().mean();
  const Eigen::MatrixXd centered = panel.values.colwise() - means;

  const RandomStream root(resolved.seed);
  StartResult best;
  int best_start = 0;
  for (int start = 0; start < resolved.n_starts; ++start) {
    const std::uint64_t start_seed =
        root.branch("init").branch(static_cast<std::uint64_t>(start)).next_u64();
    const InitMethod method = start == 0 ? InitMethod::pca_rank : InitMethod::random;
    FactorMatrix init = init_factors(centered, resolved.q, method, start_seed);
    StartResult candidate = run_start(centered, basis, resolved, std::move(init));
    if (start == 0 || candidate.best_loss < best.best_loss) {
      best = std::move(candidate);
      best_start = start;
    }
  }

  FittedModel model;
  model.basis = basis;
  model.coeffs = std::move(best.coeffs);
  model.factors = std::move(best.factors);
  model.series_means = means;
  model.converged = best.converged;
  model.config = resolved;
  model.loss_trace.reserve(best.recorded.size());
  for (std::size_t k = 0; k < best.recorded.size(); ++k) {
    model.loss_trace.emplace_back(static_cast<int>(k + 1), best.recorded[k]);
  }
  model = order_factors(std::move(model));

  FitReport report;
  report.n_iterations = static_cast<int>(best.recorded.size());
  report.final_loss = best.best_loss;
  report.start_index = best_start;
  report.per_iteration_losses = std::move(best.recorded);
  return {std::move(model), std::move(report)};
}

}  // namespace afm
