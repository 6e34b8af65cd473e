#include "afm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "afm/errors.hpp"
#include "afm/normal.hpp"

namespace afm {

namespace {

// Ranks 1..T with ties broken by index, as doubles.
Eigen::VectorXd index_ranks(const Eigen::VectorXd& values) {
  const int T = static_cast<int>(values.size());
  std::vector<int> idx(T);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return values[a] < values[b]; });
  Eigen::VectorXd ranks(T);
  for (int r = 0; r < T; ++r) ranks[idx[r]] = r + 1;
  return ranks;
}

double spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.minCoeff() == a.maxCoeff() || b.minCoeff() == b.maxCoeff()) {
    throw NumericalError("align: constant factor column, alignment undefined");
  }
  const Eigen::VectorXd ra = index_ranks(a);
  const Eigen::VectorXd rb = index_ranks(b);
  const Eigen::VectorXd ca = ra.array() - ra.mean();
  const Eigen::VectorXd cb = rb.array() - rb.mean();
  return ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
}

}  // namespace

Alignment align(const Eigen::MatrixXd& est_factors, const Eigen::MatrixXd& true_factors) {
  if (est_factors.rows() != true_factors.rows() ||
      est_factors.cols() != true_factors.cols()) {
    throw std::invalid_argument("align: factor matrices must share T and q");
  }
  const int q = static_cast<int>(est_factors.cols());
  Eigen::MatrixXd rho(q, q);
  for (int j = 0; j < q; ++j) {
    for (int k = 0; k < q; ++k) {
      rho(j, k) = spearman(est_factors.col(j), true_factors.col(k));
    }
  }
  Alignment out;
  out.permutation.assign(q, -1);
  out.reflect.assign(q, false);
  std::vector<bool> est_used(q, false), true_used(q, false);
  for (int round = 0; round < q; ++round) {
    int best_j = -1, best_k = -1;
    double best_abs = -1.0;
    for (int j = 0; j < q; ++j) {
      if (est_used[j]) continue;
      for (int k = 0; k < q; ++k) {
        if (true_used[k]) continue;
        if (std::abs(rho(j, k)) > best_abs) {
          best_abs = std::abs(rho(j, k));
          best_j = j;
          best_k = k;
        }
      }
    }
    est_used[best_j] = true;
    true_used[best_k] = true;
    out.permutation[best_j] = best_k;
    out.reflect[best_j] = rho(best_j, best_k) < 0.0;
  }
  return out;
}

double mse_f(const FactorMatrix& est, const Eigen::MatrixXd& truth,
             const Alignment& alignment) {
  const int T = est.n_time();
  const int q = est.n_factors();
  if (truth.rows() != T || truth.cols() != q ||
      static_cast<int>(alignment.permutation.size()) != q) {
    throw std::invalid_argument("mse_f: inconsistent dimensions");
  }
  double acc = 0.0;
  for (int j = 0; j < q; ++j) {
    const int k = alignment.permutation[j];
    for (int t = 0; t < T; ++t) {
      const double f = alignment.reflect[j] ? 1.0 - est.values(t, j) : est.values(t, j);
      const double diff = f - truth(t, k);
      acc += diff * diff;
    }
  }
  return acc / T;
}

double mse_g(const BasisSpec& basis, const CoefficientTensor& coeffs,
             const std::vector<FunctionDescriptor>& true_functions,
             const Eigen::MatrixXd& true_factors, const Alignment& alignment) {
  const int N = coeffs.n_series();
  const int q = coeffs.n_factors();
  const int T = static_cast<int>(true_factors.rows());
  if (true_factors.cols() != q ||
      static_cast<int>(true_functions.size()) != static_cast<std::size_t>(N) * q ||
      static_cast<int>(alignment.permutation.size()) != q) {
    throw std::invalid_argument("mse_g: inconsistent dimensions");
  }
  double acc = 0.0;
  Eigen::VectorXd ghat(T), gtrue(T);
  for (int j = 0; j < q; ++j) {
    const int k = alignment.permutation[j];
    // Design at the (possibly reflected) true factor values, shared over i.
    Eigen::VectorXd points = true_factors.col(k);
    if (alignment.reflect[j]) points = (1.0 - points.array()).matrix();
    const Eigen::MatrixXd psi = design_matrix(basis, points);
    for (int i = 0; i < N; ++i) {
      ghat = psi * coeffs.slice(i, j).transpose();
      const FunctionDescriptor& g0 = true_functions[static_cast<std::size_t>(i) * q + k];
      for (int t = 0; t < T; ++t) gtrue[t] = g0(true_factors(t, k));
      ghat.array() -= ghat.mean();
      gtrue.array() -= gtrue.mean();
      acc += (ghat - gtrue).squaredNorm();
    }
  }
  return acc / (static_cast<double>(N) * T);
}

double mse_g(const FittedModel& model, const GroundTruth& truth,
             const Alignment& alignment) {
  return mse_g(model.basis, model.coeffs, truth.functions, truth.factors, alignment);
}

Eigen::VectorXd ecdf_transform(const Eigen::VectorXd& values) {
  if (values.size() < 1) throw std::invalid_argument("ecdf_transform: empty input");
  if (!values.allFinite()) {
    throw std::invalid_argument("ecdf_transform: input must be finite");
  }
  return rank_to_grid(values);
}

DistributionMap gaussian_map() {
  return DistributionMap{[](double p) { return norm_quantile(p); },
                         [](double x) { return norm_cdf(x); }};
}

DistributionMap ecdf_map(const Eigen::VectorXd& reference) {
  if (reference.size() < 2) {
    throw std::invalid_argument("ecdf_map: reference needs at least 2 observations");
  }
  if (!reference.allFinite()) {
    throw std::invalid_argument("ecdf_map: reference must be finite");
  }
  auto sorted = std::make_shared<std::vector<double>>(
      reference.data(), reference.data() + reference.size());
  std::sort(sorted->begin(), sorted->end());
  const double m = static_cast<double>(sorted->size());
  auto quantile = [sorted, m](double u) {
    if (!(u > 0.0 && u < 1.0)) {
      throw std::invalid_argument("ecdf quantile: u must lie in (0,1)");
    }
    const std::size_t k = static_cast<std::size_t>(std::ceil(u * m));
    return (*sorted)[std::min(std::max<std::size_t>(k, 1), sorted->size()) - 1];
  };
  auto cdf = [sorted, m](double x) {
    const auto it = std::upper_bound(sorted->begin(), sorted->end(), x);
    return static_cast<double>(it - sorted->begin()) / m;
  };
  return DistributionMap{quantile, cdf};
}

Eigen::MatrixXd retarget_factors(const Eigen::MatrixXd& factors,
                                 const std::function<double(double)>& quantile_fn) {
  Eigen::MatrixXd out(factors.rows(), factors.cols());
  for (Eigen::Index l = 0; l < factors.cols(); ++l) {
    for (Eigen::Index t = 0; t < factors.rows(); ++t) {
      const double v = quantile_fn(factors(t, l));
      if (!std::isfinite(v)) {
        throw NumericalError("retarget_factors: quantile map returned non-finite value");
      }
      out(t, l) = v;
    }
  }
  return out;
}

std::function<double(double)> retargeted_function(
    const FittedModel& model, int i, int l, const std::function<double(double)>& cdf) {
  return [&model, i, l, cdf](double x) { return model.eval_g(i, l, cdf(x)); };
}

double ar1_ols(const Eigen::VectorXd& z, bool intercept) {
  const int T = static_cast<int>(z.size());
  if (T < 3) throw std::invalid_argument("ar1_ols: need T >= 3");
  if (!z.allFinite()) throw std::invalid_argument("ar1_ols: input must be finite");
  const auto lead = z.tail(T - 1);
  const auto lag = z.head(T - 1);
  if (intercept) {
    const double mx = lag.mean();
    const double my = lead.mean();
    const double sxx = (lag.array() - mx).square().sum();
    if (sxx == 0.0) throw NumericalError("ar1_ols: degenerate series, zero variance");
    return ((lag.array() - mx) * (lead.array() - my)).sum() / sxx;
  }
  const double denom = lag.squaredNorm();
  if (denom == 0.0) throw NumericalError("ar1_ols: degenerate series, zero energy");
  return lead.dot(lag) / denom;
}

std::pair<double, double> median_and_mad(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median_and_mad: empty input");
  auto median_of = [](std::vector<double>& v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  const double med = median_of(values);
  for (double& v : values) v = std::abs(v - med);
  const double mad = median_of(values);
  return {med, mad};
}

}  // namespace afm
