#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

namespace afm {

// Cubic B-spline basis on [0,1] with clamped, evenly spaced knots.
// The knot vector has dim + degree + 1 entries: 0 and 1 each repeated
// degree+1 times with dim - degree - 1 evenly spaced interior knots.
struct BasisSpec {
  int degree = 3;
  int dim = 0;
  std::vector<double> knots;

  int n_intervals() const { return dim - degree; }
};

// Builds the cubic clamped spec with d - 4 evenly spaced interior knots.
// Throws std::invalid_argument for d < 4.
BasisSpec make_basis(int d);

// Checks the BasisSpec invariants (knot count, clamping, even spacing).
void validate(const BasisSpec& spec);

// Evaluates all dim basis functions at x in [0,1].  At most degree+1 entries
// are nonzero, all entries are >= 0 and sum to 1.  Throws
// std::invalid_argument outside [0,1]; x = 1 is handled by the right-closed
// final knot span.
Eigen::VectorXd eval_basis(const BasisSpec& spec, double x);

// Nonzero window of the basis at x: values[j] is basis function
// (span - degree + j).  This is the allocation-free core used by the hot
// paths; eval_basis wraps it.
struct BasisWindow {
  int span = 0;  // knot span index, degree <= span <= dim - 1
  std::array<double, 4> values{};
  int first() const { return span - 3; }
};
BasisWindow eval_basis_window(const BasisSpec& spec, double x);

// T x dim matrix with row t = eval_basis(spec, points[t]).
Eigen::MatrixXd design_matrix(const BasisSpec& spec, const Eigen::VectorXd& points);

// L2 norm sqrt(int_0^1 g^2) of g = sum_k coeffs[k] psi_k, computed with
// composite 8-node Gauss-Legendre quadrature per inter-knot interval, which
// is exact for the degree-6 integrand.
double l2_norm(const BasisSpec& spec, const Eigen::VectorXd& coeffs);

// Sum of five cosine and five sine terms with 1/m-damped coefficients:
// h(x) = sum_{m=1..5} (a[m]/m) cos(pi m x) + (b[m]/m) sin(pi m x).
struct FourierLoading {
  std::array<double, 5> a{};
  std::array<double, 5> b{};
};

double eval_fourier(const FourierLoading& h, double x);

}  // namespace afm
