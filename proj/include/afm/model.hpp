#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "afm/basis.hpp"

namespace afm {

// N x T panel of observations, rows = series, columns = time points.
struct Panel {
  Eigen::MatrixXd values;
  std::vector<std::string> series_ids;  // optional, size N or empty
  std::vector<std::string> time_ids;    // optional, size T or empty

  int n_series() const { return static_cast<int>(values.rows()); }
  int n_time() const { return static_cast<int>(values.cols()); }
};

void validate(const Panel& panel);

// The candidate grid {1/(T+1), ..., T/(T+1)}.
Eigen::VectorXd sieve_grid(int T);

// Columnwise rank transform onto the sieve grid; ties broken by row index
// (earlier time gets the smaller rank), so every column of the result is a
// permutation of sieve_grid(T).
Eigen::MatrixXd rank_to_grid(const Eigen::MatrixXd& values);

// T x q factor matrix whose columns are permutations of the sieve grid.
struct FactorMatrix {
  Eigen::MatrixXd values;

  int n_time() const { return static_cast<int>(values.rows()); }
  int n_factors() const { return static_cast<int>(values.cols()); }
};

void validate(const FactorMatrix& factors);

// Unprojected factor values in [0,1]^q, the output of the per-time search
// before rank projection.
struct RawFactors {
  Eigen::MatrixXd values;
};

void validate(const RawFactors& raw);

// Spline coefficients b_{il}, one length-d vector per (series, factor).
// Stored as an N x (q*d) matrix with factor-major column blocks, so the
// slice for (i, l) is row i, columns [l*d, (l+1)*d).
class CoefficientTensor {
 public:
  CoefficientTensor() = default;
  CoefficientTensor(int n_series, int n_factors, int dim)
      : n_series_(n_series),
        n_factors_(n_factors),
        dim_(dim),
        flat_(Eigen::MatrixXd::Zero(n_series, n_factors * dim)) {}

  int n_series() const { return n_series_; }
  int n_factors() const { return n_factors_; }
  int dim() const { return dim_; }

  Eigen::MatrixXd& flat() { return flat_; }
  const Eigen::MatrixXd& flat() const { return flat_; }

  // d-vector of coefficients for series i, factor l.
  auto slice(int i, int l) { return flat_.row(i).segment(l * dim_, dim_); }
  auto slice(int i, int l) const { return flat_.row(i).segment(l * dim_, dim_); }

  // N x d block of all series' coefficients for factor l.
  auto factor_block(int l) { return flat_.middleCols(l * dim_, dim_); }
  auto factor_block(int l) const { return flat_.middleCols(l * dim_, dim_); }

 private:
  int n_series_ = 0;
  int n_factors_ = 0;
  int dim_ = 0;
  Eigen::MatrixXd flat_;
};

// Estimation settings.  d = 0 requests the automatic dimension rule.
struct EstimatorConfig {
  int q = 1;
  int d = 0;  // 0 = auto via default_d(T, eta)
  double eta = 1.0;
  int max_iter = 100;
  double rel_tol = 1e-6;
  double ridge = 1e-8;
  int n_starts = 1;
  std::uint64_t seed = 0;
  int factor_grid_sweeps = 1;
};

void validate(const EstimatorConfig& config);

// Estimation output: everything needed to evaluate ghat_{il} = psi' b_{il}
// and the factor path, plus bookkeeping of the run.
struct FittedModel {
  BasisSpec basis;
  CoefficientTensor coeffs;
  FactorMatrix factors;
  Eigen::VectorXd series_means;
  std::vector<std::pair<int, double>> loss_trace;  // (iteration, recorded loss)
  bool converged = false;
  EstimatorConfig config;  // snapshot with d resolved

  int n_series() const { return coeffs.n_series(); }
  int n_factors() const { return coeffs.n_factors(); }

  // ghat_{il}(x) for x in [0,1].
  double eval_g(int i, int l, double x) const;
};

// Mean squared residual (1/(NT)) sum_{i,t} (x_it - sum_l psi(f_tl)' b_il)^2.
// Callers pass per-series centered data; factors need only lie in [0,1].
double loss(const Eigen::MatrixXd& centered, const BasisSpec& basis,
            const CoefficientTensor& coeffs, const Eigen::MatrixXd& factors);

// Basis dimension rule round(4 + 0.25 * T^(1/(1+2*eta))), floored at 4,
// round-half-to-even.
int default_d(int T, double eta);

}  // namespace afm
