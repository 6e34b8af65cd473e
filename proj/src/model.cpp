#include "afm/model.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace afm {

void validate(const Panel& panel) {
  if (panel.n_series() < 1 || panel.n_time() < 2) {
    throw std::invalid_argument("Panel: need N >= 1 and T >= 2");
  }
  if (!panel.values.allFinite()) {
    throw std::invalid_argument("Panel: all entries must be finite");
  }
  if (!panel.series_ids.empty() &&
      static_cast<int>(panel.series_ids.size()) != panel.n_series()) {
    throw std::invalid_argument("Panel: series_ids size must be N");
  }
  if (!panel.time_ids.empty() &&
      static_cast<int>(panel.time_ids.size()) != panel.n_time()) {
    throw std::invalid_argument("Panel: time_ids size must be T");
  }
}

Eigen::VectorXd sieve_grid(int T) {
  Eigen::VectorXd grid(T);
  for (int k = 1; k <= T; ++k) grid[k - 1] = static_cast<double>(k) / (T + 1);
  return grid;
}

Eigen::MatrixXd rank_to_grid(const Eigen::MatrixXd& values) {
  const int T = static_cast<int>(values.rows());
  const Eigen::VectorXd grid = sieve_grid(T);
  Eigen::MatrixXd out(values.rows(), values.cols());
  std::vector<int> idx(T);
  for (int l = 0; l < values.cols(); ++l) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](int a, int b) { return values(a, l) < values(b, l); });
    for (int r = 0; r < T; ++r) out(idx[r], l) = grid[r];
  }
  return out;
}

void validate(const FactorMatrix& factors) {
  const int T = factors.n_time();
  if (T < 2 || factors.n_factors() < 1) {
    throw std::invalid_argument("FactorMatrix: need T >= 2 and q >= 1");
  }
  const Eigen::VectorXd grid = sieve_grid(T);
  std::vector<double> col(T);
  for (int l = 0; l < factors.n_factors(); ++l) {
    for (int t = 0; t < T; ++t) col[t] = factors.values(t, l);
    std::sort(col.begin(), col.end());
    for (int t = 0; t < T; ++t) {
      if (col[t] != grid[t]) {
        throw std::invalid_argument(
            "FactorMatrix: column " + std::to_string(l + 1) +
            " is not a permutation of the sieve grid");
      }
    }
  }
}

void validate(const RawFactors& raw) {
  if (!raw.values.allFinite() || raw.values.minCoeff() < 0.0 ||
      raw.values.maxCoeff() > 1.0) {
    throw std::invalid_argument("RawFactors: entries must lie in [0,1]");
  }
}

void validate(const EstimatorConfig& config) {
  if (config.q < 1) throw std::invalid_argument("EstimatorConfig: q >= 1");
  if (config.d != 0 && config.d < 4) {
    throw std::invalid_argument("EstimatorConfig: d must be >= 4 or 0 (auto)");
  }
  if (config.eta < 1.0) throw std::invalid_argument("EstimatorConfig: eta >= 1");
  if (config.max_iter < 1) throw std::invalid_argument("EstimatorConfig: max_iter >= 1");
  if (!(config.rel_tol > 0.0)) throw std::invalid_argument("EstimatorConfig: rel_tol > 0");
  if (config.ridge < 0.0) throw std::invalid_argument("EstimatorConfig: ridge >= 0");
  if (config.n_starts < 1) throw std::invalid_argument("EstimatorConfig: n_starts >= 1");
  if (config.factor_grid_sweeps < 1) {
    throw std::invalid_argument("EstimatorConfig: factor_grid_sweeps >= 1");
  }
}

double FittedModel::eval_g(int i, int l, double x) const {
  const BasisWindow w = eval_basis_window(basis, x);
  double g = 0.0;
  for (int j = 0; j <= 3; ++j) g += coeffs.slice(i, l)[w.first() + j] * w.values[j];
  return g;
}

double loss(const Eigen::MatrixXd& centered, const BasisSpec& basis,
            const CoefficientTensor& coeffs, const Eigen::MatrixXd& factors) {
  const int N = static_cast<int>(centered.rows());
  const int T = static_cast<int>(centered.cols());
  if (coeffs.n_series() != N || factors.rows() != T ||
      factors.cols() != coeffs.n_factors() || coeffs.dim() != basis.dim) {
    throw std::invalid_argument("loss: inconsistent dimensions");
  }
  Eigen::MatrixXd fitted = Eigen::MatrixXd::Zero(N, T);
  for (int l = 0; l < coeffs.n_factors(); ++l) {
    const Eigen::MatrixXd psi = design_matrix(basis, factors.col(l));
    fitted.noalias() += coeffs.factor_block(l) * psi.transpose();
  }
  return (centered - fitted).squaredNorm() / (static_cast<double>(N) * T);
}

int default_d(int T, double eta) {
  if (T < 2) throw std::invalid_argument("default_d: T >= 2");
  if (eta < 1.0) throw std::invalid_argument("default_d: eta >= 1");
  const double raw = 4.0 + 0.25 * std::pow(static_cast<double>(T), 1.0 / (1.0 + 2.0 * eta));
  // nearbyint under FE_TONEAREST is round-half-to-even.
  const int d = static_cast<int>(std::nearbyint(raw));
  return std::max(d, 4);
}

}  // namespace afm
