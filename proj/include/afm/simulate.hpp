#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "afm/basis.hpp"
#include "afm/model.hpp"

namespace afm {

enum class FunctionSource { random_fourier, fixed_suite_plus_fourier };
enum class FactorSource { iid_uniform, ar1_copula };

struct DGPSpec {
  int n_series = 0;
  int n_time = 0;
  int n_factors = 1;
  FunctionSource function_source = FunctionSource::random_fourier;
  double noise_sd = 1.0;
  FactorSource factor_source = FactorSource::iid_uniform;
  double theta = 0.5;   // AR(1) coefficient (ar1_copula only)
  int burn_in = 100;    // discarded AR(1) steps
  std::uint64_t seed = 0;
};

void validate(const DGPSpec& spec);

// One generating loading: either an index into the fixed suite or a Fourier
// coefficient pair.
struct FunctionDescriptor {
  enum class Kind { fourier, suite };
  Kind kind = Kind::fourier;
  int suite_index = 0;  // 1..9 when kind == suite
  FourierLoading fourier;

  double operator()(double x) const;
};

// g_k for k = 1..9: the fixed set of univariate test loadings (linear,
// quadratic, cosine, sine, cubic, rational-sine, sine-cubed, square root,
// scaled logistic).
double eval_suite(int index, double x);
std::vector<FunctionDescriptor> fixed_function_suite();

// N*q Fourier loadings with i.i.d. standard normal coefficients.
std::vector<FourierLoading> gen_random_functions(int N, int q, std::uint64_t seed);

// T x q i.i.d. Uniform[0,1] factors.
Eigen::MatrixXd gen_factors_iid(int T, int q, std::uint64_t seed);

// Gaussian-copula AR(1) factors: z_t = theta z_{t-1} + v_t started at 0 with
// `burn_in` discarded steps, f_t = Phi(z_t).  Returns (factors, latent z).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> gen_factors_ar1(int T, int q, double theta,
                                                            int burn_in,
                                                            std::uint64_t seed);

// A generated panel together with everything that produced it.
struct GroundTruth {
  std::vector<FunctionDescriptor> functions;  // (i, l) row-major, size N*q
  Eigen::MatrixXd factors;                    // T x q
  Eigen::MatrixXd latent_z;                   // T x q, empty unless ar1_copula
  Eigen::MatrixXd noise;                      // N x T
  Panel panel;

  const FunctionDescriptor& fn(int i, int l) const {
    return functions[static_cast<std::size_t>(i) * factors.cols() + l];
  }
};

// Assembles x_it = sum_l g_il(f_tl) + eps_it from decorrelated sub-streams
// ("functions", "factors", "noise") of spec.seed, so e.g. changing N leaves
// the factor draw untouched.  fixed_suite_plus_fourier uses the suite for
// i <= 9 and random Fourier loadings beyond.
GroundTruth gen_panel(const DGPSpec& spec);

}  // namespace afm
