#pragma once

// Independent reference implementations used as test oracles.  Everything
// here is written from the defining formulas (direct recursions, naive
// loops, exhaustive enumeration) and deliberately shares no code with the
// library paths it checks.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "afm/basis.hpp"
#include "afm/model.hpp"

namespace oracle {

// Cox-de Boor recursion straight from the definition.  The final nonempty
// knot span is right-closed so x = 1 is covered.
inline double bspline_recursive(const std::vector<double>& knots, int k, int degree,
                                double x) {
  if (degree == 0) {
    const bool last_closed = knots[k + 1] == knots.back() && knots[k] < knots[k + 1];
    if (knots[k] <= x && (x < knots[k + 1] || (last_closed && x == knots[k + 1]))) {
      return 1.0;
    }
    return 0.0;
  }
  double left = 0.0, right = 0.0;
  const double ld = knots[k + degree] - knots[k];
  if (ld > 0.0) left = (x - knots[k]) / ld * bspline_recursive(knots, k, degree - 1, x);
  const double rd = knots[k + degree + 1] - knots[k + 1];
  if (rd > 0.0) {
    right = (knots[k + degree + 1] - x) / rd * bspline_recursive(knots, k + 1, degree - 1, x);
  }
  return left + right;
}

inline Eigen::VectorXd basis_recursive(const afm::BasisSpec& spec, double x) {
  Eigen::VectorXd out(spec.dim);
  for (int k = 0; k < spec.dim; ++k) {
    out[k] = bspline_recursive(spec.knots, k, spec.degree, x);
  }
  return out;
}

// Triple-loop mean squared residual.
inline double loss_naive(const Eigen::MatrixXd& centered, const afm::BasisSpec& basis,
                         const afm::CoefficientTensor& coeffs,
                         const Eigen::MatrixXd& factors) {
  double acc = 0.0;
  for (int i = 0; i < centered.rows(); ++i) {
    for (int t = 0; t < centered.cols(); ++t) {
      double fitted = 0.0;
      for (int l = 0; l < coeffs.n_factors(); ++l) {
        const Eigen::VectorXd psi = basis_recursive(basis, factors(t, l));
        for (int k = 0; k < coeffs.dim(); ++k) {
          fitted += coeffs.slice(i, l)[k] * psi[k];
        }
      }
      const double r = centered(i, t) - fitted;
      acc += r * r;
    }
  }
  return acc / (static_cast<double>(centered.rows()) * centered.cols());
}

// Per-time brute-force grid minimizer for q = 1, first-wins on ties.
inline std::vector<int> factor_argmin_naive(const Eigen::MatrixXd& centered,
                                            const afm::BasisSpec& basis,
                                            const afm::CoefficientTensor& coeffs) {
  const int T = static_cast<int>(centered.cols());
  const Eigen::VectorXd grid = afm::sieve_grid(T);
  std::vector<int> best(T, 0);
  for (int t = 0; t < T; ++t) {
    double best_obj = std::numeric_limits<double>::infinity();
    for (int c = 0; c < T; ++c) {
      double obj = 0.0;
      for (int i = 0; i < centered.rows(); ++i) {
        const Eigen::VectorXd psi = basis_recursive(basis, grid[c]);
        double fitted = 0.0;
        for (int k = 0; k < coeffs.dim(); ++k) fitted += coeffs.slice(i, 0)[k] * psi[k];
        const double r = centered(i, t) - fitted;
        obj += r * r;
      }
      obj /= centered.rows();
      if (obj < best_obj) {
        best_obj = obj;
        best[t] = c;
      }
    }
  }
  return best;
}

// Exact minimum of the q = 1 loss over all T! grid permutations.
inline double permutation_min_loss(const Eigen::MatrixXd& centered,
                                   const afm::BasisSpec& basis,
                                   const afm::CoefficientTensor& coeffs) {
  const int T = static_cast<int>(centered.cols());
  const Eigen::VectorXd grid = afm::sieve_grid(T);
  std::vector<int> perm(T);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd factors(T, 1);
  do {
    for (int t = 0; t < T; ++t) factors(t, 0) = grid[perm[t]];
    best = std::min(best, loss_naive(centered, basis, coeffs, factors));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Midpoint Riemann sum of g^2 for g = sum_k coeffs[k] psi_k.
inline double riemann_sq_integral(const afm::BasisSpec& spec, const Eigen::VectorXd& coeffs,
                                  int points) {
  double acc = 0.0;
  for (int j = 0; j < points; ++j) {
    const double x = (j + 0.5) / points;
    const afm::BasisWindow w = afm::eval_basis_window(spec, x);
    double g = 0.0;
    for (int m = 0; m <= 3; ++m) g += coeffs[w.first() + m] * w.values[m];
    acc += g * g;
  }
  return acc / points;
}

// One-sample Kolmogorov-Smirnov statistic against Uniform[0,1].
inline double ks_uniform(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    d = std::max(d, (i + 1) / n - sample[i]);
    d = std::max(d, sample[i] - i / n);
  }
  return d;
}

inline double sample_autocorr1(const Eigen::VectorXd& z) {
  const Eigen::VectorXd c = z.array() - z.mean();
  double num = 0.0;
  for (int t = 1; t < z.size(); ++t) num += c[t] * c[t - 1];
  return num / c.squaredNorm();
}

}  // namespace oracle
