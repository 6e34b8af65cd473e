#pragma once

#include <Eigen/Core>
#include <functional>
#include <utility>
#include <vector>

#include "afm/model.hpp"
#include "afm/simulate.hpp"

namespace afm {

// Resolves the trivial indeterminacies before scoring: estimated factor
// column j corresponds to true column permutation[j], reflected through
// f -> 1 - f when reflect[j] is set.
struct Alignment {
  std::vector<int> permutation;
  std::vector<bool> reflect;

  static Alignment identity(int q) {
    Alignment a;
    a.permutation.resize(q);
    for (int l = 0; l < q; ++l) a.permutation[l] = l;
    a.reflect.assign(q, false);
    return a;
  }
};

// Greedy matching on |Spearman correlation| between estimated and true
// columns; a negative matched correlation sets the reflect flag.  Throws
// NumericalError on a constant column (alignment undefined).
Alignment align(const Eigen::MatrixXd& est_factors, const Eigen::MatrixXd& true_factors);

// (1/T) sum_{t,l} (fhat_tl - f_tl)^2 after permutation/reflection.
double mse_f(const FactorMatrix& est, const Eigen::MatrixXd& truth,
             const Alignment& alignment);

// (1/(NT)) sum_{t,i,l} (ghat_il(f_tl) - g_il(f_tl))^2 with ghat evaluated at
// the true factor values (through 1 - f when reflected) and both curves
// centered by their empirical means over the true factor sample.
double mse_g(const BasisSpec& basis, const CoefficientTensor& coeffs,
             const std::vector<FunctionDescriptor>& true_functions,
             const Eigen::MatrixXd& true_factors, const Alignment& alignment);
double mse_g(const FittedModel& model, const GroundTruth& truth,
             const Alignment& alignment);

// value_t -> rank_t / (T+1), ties broken by index; output lies in (0,1).
Eigen::VectorXd ecdf_transform(const Eigen::VectorXd& values);

// A target distribution as a (quantile, cdf) pair of mutually inverse
// monotone maps.  retarget_factors applies the quantile map elementwise;
// retargeted_function composes a fitted loading with the cdf so that
// evaluation is unchanged: g_tilde(quantile(f)) = ghat(f).
struct DistributionMap {
  std::function<double(double)> quantile;
  std::function<double(double)> cdf;
};

DistributionMap gaussian_map();
DistributionMap ecdf_map(const Eigen::VectorXd& reference);

Eigen::MatrixXd retarget_factors(const Eigen::MatrixXd& factors,
                                 const std::function<double(double)>& quantile_fn);

std::function<double(double)> retargeted_function(const FittedModel& model, int i, int l,
                                                  const std::function<double(double)>& cdf);

// No-intercept least squares slope of z_t on z_{t-1}.  Throws
// NumericalError when the lagged series has zero energy.
double ar1_ols(const Eigen::VectorXd& z, bool intercept = false);

// Sample median (mean of the middle two for even counts) and median
// absolute deviation from it.
std::pair<double, double> median_and_mad(std::vector<double> values);

}  // namespace afm
