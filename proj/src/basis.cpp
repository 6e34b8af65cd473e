#include "afm/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace afm {

BasisSpec make_basis(int d) {
  if (d < 4) {
    throw std::invalid_argument("make_basis: cubic basis needs dim >= 4, got " +
                                std::to_string(d));
  }
  BasisSpec spec;
  spec.degree = 3;
  spec.dim = d;
  spec.knots.reserve(d + 4);
  for (int i = 0; i < 4; ++i) spec.knots.push_back(0.0);
  const int interior = d - 4;
  for (int k = 1; k <= interior; ++k) {
    spec.knots.push_back(static_cast<double>(k) / (interior + 1));
  }
  for (int i = 0; i < 4; ++i) spec.knots.push_back(1.0);
  return spec;
}

void validate(const BasisSpec& spec) {
  if (spec.degree != 3) {
    throw std::invalid_argument("BasisSpec: degree must be 3");
  }
  if (spec.dim < spec.degree + 1) {
    throw std::invalid_argument("BasisSpec: dim must be >= degree + 1");
  }
  if (static_cast<int>(spec.knots.size()) != spec.dim + spec.degree + 1) {
    throw std::invalid_argument("BasisSpec: knot count must be dim + degree + 1");
  }
  for (int i = 0; i <= spec.degree; ++i) {
    if (spec.knots[i] != 0.0 || spec.knots[spec.knots.size() - 1 - i] != 1.0) {
      throw std::invalid_argument("BasisSpec: knots must be clamped at 0 and 1");
    }
  }
  const int interior = spec.dim - 4;
  const double spacing = 1.0 / (interior + 1);
  double prev = 0.0;
  for (int k = 1; k <= interior; ++k) {
    const double knot = spec.knots[3 + k];
    if (!(knot > prev)) {
      throw std::invalid_argument("BasisSpec: interior knots must increase");
    }
    if (std::abs(knot - k * spacing) > 1e-12) {
      throw std::invalid_argument("BasisSpec: interior knots must be evenly spaced");
    }
    prev = knot;
  }
}

namespace {

// Knot span k with t_k <= x < t_{k+1}; x = 1 maps to the last nonempty span.
int find_span(const BasisSpec& spec, double x) {
  const int last = spec.dim - 1;
  if (x >= 1.0) return last;
  // Spans run over indices degree .. dim-1.
  auto begin = spec.knots.begin() + spec.degree;
  auto end = spec.knots.begin() + spec.dim + 1;
  auto it = std::upper_bound(begin, end, x);
  int span = static_cast<int>(it - spec.knots.begin()) - 1;
  return std::min(std::max(span, spec.degree), last);
}

}  // namespace

BasisWindow eval_basis_window(const BasisSpec& spec, double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::invalid_argument("eval_basis: x outside [0,1], no extrapolation");
  }
  BasisWindow w;
  w.span = find_span(spec, x);

  // Cox-de Boor triangle for the degree+1 nonzero functions on this span.
  const auto& t = spec.knots;
  std::array<double, 4> left{};
  std::array<double, 4> right{};
  w.values[0] = 1.0;
  for (int j = 1; j <= 3; ++j) {
    left[j] = x - t[w.span + 1 - j];
    right[j] = t[w.span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double tmp = denom != 0.0 ? w.values[r] / denom : 0.0;
      w.values[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    w.values[j] = saved;
  }
  return w;
}

Eigen::VectorXd eval_basis(const BasisSpec& spec, double x) {
  const BasisWindow w = eval_basis_window(spec, x);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(spec.dim);
  for (int j = 0; j <= 3; ++j) out[w.first() + j] = w.values[j];
  return out;
}

Eigen::MatrixXd design_matrix(const BasisSpec& spec, const Eigen::VectorXd& points) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(points.size(), spec.dim);
  for (Eigen::Index t = 0; t < points.size(); ++t) {
    const BasisWindow w = eval_basis_window(spec, points[t]);
    for (int j = 0; j <= 3; ++j) out(t, w.first() + j) = w.values[j];
  }
  return out;
}

namespace {

// 8-node Gauss-Legendre rule on [-1,1], exact through degree 15.
constexpr std::array<double, 8> kGlNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
    -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
    0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
    0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
    0.2223810344533745, 0.1012285362903763};

}  // namespace

double l2_norm(const BasisSpec& spec, const Eigen::VectorXd& coeffs) {
  if (coeffs.size() != spec.dim) {
    throw std::invalid_argument("l2_norm: coefficient length must equal dim");
  }
  if (!coeffs.allFinite()) {
    throw std::invalid_argument("l2_norm: coefficients must be finite");
  }
  const int intervals = spec.dim - 3;
  double acc = 0.0;
  for (int s = 0; s < intervals; ++s) {
    const double a = spec.knots[spec.degree + s];
    const double b = spec.knots[spec.degree + s + 1];
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (int n = 0; n < 8; ++n) {
      const double x = mid + half * kGlNodes[n];
      const BasisWindow w = eval_basis_window(spec, x);
      double g = 0.0;
      for (int j = 0; j <= 3; ++j) g += coeffs[w.first() + j] * w.values[j];
      acc += half * kGlWeights[n] * g * g;
    }
  }
  return std::sqrt(std::max(acc, 0.0));
}

double eval_fourier(const FourierLoading& h, double x) {
  double out = 0.0;
  for (int m = 1; m <= 5; ++m) {
    out += h.a[m - 1] / m * std::cos(M_PI * m * x) +
           h.b[m - 1] / m * std::sin(M_PI * m * x);
  }
  return out;
}

}  // namespace afm
