#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "afm/basis.hpp"
#include "oracles.hpp"

using afm::BasisSpec;
using afm::eval_basis;
using afm::make_basis;

TEST_CASE("make_basis produces clamped evenly spaced knots") {
  const BasisSpec b4 = make_basis(4);
  CHECK(b4.dim == 4);
  CHECK(b4.knots == std::vector<double>{0, 0, 0, 0, 1, 1, 1, 1});

  const BasisSpec b5 = make_basis(5);
  CHECK(b5.knots[4] == doctest::Approx(0.5).epsilon(1e-15));

  const BasisSpec b6 = make_basis(6);
  CHECK(b6.knots[4] == doctest::Approx(1.0 / 3).epsilon(1e-15));
  CHECK(b6.knots[5] == doctest::Approx(2.0 / 3).epsilon(1e-15));

  for (int d : {4, 5, 6, 10, 17}) {
    CHECK_NOTHROW(afm::validate(make_basis(d)));
    CHECK(static_cast<int>(make_basis(d).knots.size()) == d + 4);
  }
  CHECK_THROWS_AS(make_basis(3), std::invalid_argument);
}

TEST_CASE("eval_basis endpoints and domain") {
  const BasisSpec b4 = make_basis(4);
  Eigen::VectorXd at0 = eval_basis(b4, 0.0);
  Eigen::VectorXd at1 = eval_basis(b4, 1.0);
  CHECK(at0[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(at0.tail(3).cwiseAbs().maxCoeff() == 0.0);
  CHECK(at1[3] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(at1.head(3).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(eval_basis(b4, -0.001), std::invalid_argument);
  CHECK_THROWS_AS(eval_basis(b4, 1.001), std::invalid_argument);
}

TEST_CASE("eval_basis matches the direct Cox-de Boor recursion") {
  // Frozen midpoint values for d = 6: (0, 1/32, 15/32, 15/32, 1/32, 0).
  const BasisSpec b6 = make_basis(6);
  const Eigen::VectorXd mid = eval_basis(b6, 0.5);
  CHECK(mid[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(mid[1] == doctest::Approx(1.0 / 32).epsilon(1e-12));
  CHECK(mid[2] == doctest::Approx(15.0 / 32).epsilon(1e-12));
  CHECK(mid[3] == doctest::Approx(15.0 / 32).epsilon(1e-12));
  CHECK(mid[4] == doctest::Approx(1.0 / 32).epsilon(1e-12));
  CHECK(mid[5] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(mid.sum() == doctest::Approx(1.0).epsilon(1e-13));

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int d : {4, 5, 6, 9, 13}) {
    const BasisSpec spec = make_basis(d);
    for (int trial = 0; trial < 50; ++trial) {
      const double x = trial == 0 ? 0.0 : (trial == 1 ? 1.0 : unif(rng));
      const Eigen::VectorXd fast = eval_basis(spec, x);
      const Eigen::VectorXd slow = oracle::basis_recursive(spec, x);
      CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("partition of unity, non-negativity, and local support") {
  for (int d : {4, 5, 6, 10}) {
    const BasisSpec spec = make_basis(d);
    for (int j = 0; j <= 1000; ++j) {
      const double x = j / 1000.0;
      const Eigen::VectorXd v = eval_basis(spec, x);
      CHECK(std::abs(v.sum() - 1.0) < 1e-12);
      CHECK(v.minCoeff() >= 0.0);
      int nonzero = 0;
      for (int k = 0; k < d; ++k) {
        if (v[k] != 0.0) {
          ++nonzero;
          const bool in_support = x >= spec.knots[k] && x <= spec.knots[k + 4];
          CHECK(in_support);
        }
      }
      CHECK(nonzero <= 4);
    }
  }
}

TEST_CASE("design_matrix rows are basis evaluations") {
  const BasisSpec b4 = make_basis(4);
  Eigen::VectorXd pts(2);
  pts << 0.0, 1.0;
  const Eigen::MatrixXd design = afm::design_matrix(b4, pts);
  CHECK(design(0, 0) == doctest::Approx(1.0));
  CHECK(design(1, 3) == doctest::Approx(1.0));
  CHECK(design.row(0).sum() == doctest::Approx(1.0).epsilon(1e-13));

  Eigen::VectorXd bad(1);
  bad << 1.5;
  CHECK_THROWS_AS(afm::design_matrix(b4, bad), std::invalid_argument);
}

TEST_CASE("design_matrix column sums on the 101-point grid track the integrals") {
  // For d = 6 the exact integrals are (1/12, 1/6, 1/4, 1/4, 1/6, 1/12); the
  // grid average deviates from them by at most 4.3e-3 (endpoint effect,
  // value frozen from a quadrature oracle).
  const BasisSpec b6 = make_basis(6);
  Eigen::VectorXd pts(101);
  for (int j = 0; j <= 100; ++j) pts[j] = j / 100.0;
  const Eigen::MatrixXd design = afm::design_matrix(b6, pts);
  const Eigen::VectorXd colsum = design.colwise().sum();
  Eigen::VectorXd integrals(6);
  integrals << 1.0 / 12, 1.0 / 6, 0.25, 0.25, 1.0 / 6, 1.0 / 12;
  CHECK((colsum / 101.0 - integrals).cwiseAbs().maxCoeff() < 5e-3);
  // Every row sums to one.
  CHECK((design.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("linearity of evaluation in the coefficients") {
  const BasisSpec spec = make_basis(7);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd c1 = Eigen::VectorXd::NullaryExpr(7, [&](auto) { return gauss(rng); });
    Eigen::VectorXd c2 = Eigen::VectorXd::NullaryExpr(7, [&](auto) { return gauss(rng); });
    const double alpha = gauss(rng);
    const double x = unif(rng);
    const Eigen::VectorXd psi = eval_basis(spec, x);
    const double combined = psi.dot(c1 + alpha * c2);
    const double separate = psi.dot(c1) + alpha * psi.dot(c2);
    CHECK(combined == doctest::Approx(separate).epsilon(1e-12));
  }
}

TEST_CASE("l2_norm matches closed forms and the Riemann oracle") {
  const BasisSpec b4 = make_basis(4);
  CHECK(afm::l2_norm(b4, Eigen::VectorXd::Zero(4)) == 0.0);
  // Constant function 1 has unit norm by partition of unity.
  CHECK(afm::l2_norm(b4, Eigen::VectorXd::Ones(4)) == doctest::Approx(1.0).epsilon(1e-14));

  // First basis function for d = 6 is (1 - 3x)^3 on [0, 1/3]; the squared
  // norm integrates to exactly 1/21.
  const BasisSpec b6 = make_basis(6);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(6);
  e1[0] = 1.0;
  const double norm = afm::l2_norm(b6, e1);
  CHECK(norm * norm == doctest::Approx(1.0 / 21).epsilon(1e-13));
  CHECK(std::abs(norm * norm - oracle::riemann_sq_integral(b6, e1, 10000)) < 1e-8);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd c = Eigen::VectorXd::NullaryExpr(6, [&](auto) { return gauss(rng); });
    const double v = afm::l2_norm(b6, c);
    const double ref = std::sqrt(oracle::riemann_sq_integral(b6, c, 2000000));
    CHECK(v == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("eval_fourier closed-form spot values and summation oracle") {
  afm::FourierLoading h;
  h.a = {1, 0, 0, 0, 0};
  CHECK(afm::eval_fourier(h, 0.0) == doctest::Approx(1.0).epsilon(1e-15));

  afm::FourierLoading hs;
  hs.b = {1, 0, 0, 0, 0};
  CHECK(afm::eval_fourier(hs, 0.5) == doctest::Approx(1.0).epsilon(1e-14));

  afm::FourierLoading hall;
  hall.a = {1, 1, 1, 1, 1};
  CHECK(afm::eval_fourier(hall, 0.0) == doctest::Approx(137.0 / 60).epsilon(1e-14));

  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    afm::FourierLoading rnd;
    for (int m = 0; m < 5; ++m) {
      rnd.a[m] = gauss(rng);
      rnd.b[m] = gauss(rng);
    }
    const double x = unif(rng);
    double ref = 0.0;
    for (int m = 1; m <= 5; ++m) {
      ref += rnd.a[m - 1] / m * std::cos(M_PI * m * x);
      ref += rnd.b[m - 1] / m * std::sin(M_PI * m * x);
    }
    CHECK(std::abs(afm::eval_fourier(rnd, x) - ref) < 1e-14);
  }
}
