#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "afm/model.hpp"

namespace afm {

enum class InitMethod { pca_rank, random };

// Initial factor matrix for the alternating scheme.
//
// pca_rank: top-q principal component score series of the centered panel
// (time points as observations), each column replaced by its ranks on the
// sieve grid.  random: seeded uniforms, rank projected.  Requires q < N.
FactorMatrix init_factors(const Eigen::MatrixXd& centered, int q, InitMethod method,
                          std::uint64_t seed);

// Function step: per-series ridge-penalized least squares of the centered
// panel on the T x (q*d) stacked design [Psi(F_1) ... Psi(F_q)], followed by
// centering each fitted component to zero empirical mean over its factor
// column (a constant shift along the all-ones coefficient direction).
// The stacked design always carries a structural rank deficiency of q - 1
// (each block spans the constant function); that ambiguity is resolved by
// the centering.  With ridge = 0, deficiency beyond it raises
// NumericalError suggesting a positive ridge.
CoefficientTensor fit_functions_step(const Eigen::MatrixXd& centered,
                                     const FactorMatrix& factors,
                                     const BasisSpec& basis, double ridge);

// Factor step: for every time point, minimize the cross-sectional mean
// squared residual over the sieve grid.  q = 1 is a single exhaustive
// search; q > 1 runs `sweeps` rounds of coordinate descent started from
// `current`, each coordinate updated by exhaustive grid search.  Ties keep
// the smallest grid value.
RawFactors fit_factors_step(const Eigen::MatrixXd& centered,
                            const CoefficientTensor& coeffs, const BasisSpec& basis,
                            const Eigen::MatrixXd& current, int sweeps);

// Columnwise rank projection onto the sieve, ties broken by time index.
FactorMatrix project_to_grid(const RawFactors& raw);

// Reorders factor columns (with their coefficient slices) so that
// sum_i ||ghat_il||_2 is non-increasing in l.  Stable on exact ties; the
// loss is unchanged.
FittedModel order_factors(FittedModel model);

struct FitReport {
  int n_iterations = 0;
  double final_loss = 0.0;
  int start_index = 0;
  // Recorded loss after each outer iteration (best-so-far, post projection).
  std::vector<double> per_iteration_losses;
};

// Full Algorithm: center the panel per series, resolve d, then alternate
// [function step -> factor step -> projection] until the recorded loss
// stalls (rel_tol) or max_iter, for each of n_starts initializations
// (pca_rank first, then seeded random restarts), keeping the best recorded
// iterate.  Deterministic given config.seed.
std::pair<FittedModel, FitReport> fit(const Panel& panel, const EstimatorConfig& config);

}  // namespace afm
