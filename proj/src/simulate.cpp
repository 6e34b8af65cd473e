#include "afm/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "afm/normal.hpp"
#include "afm/rng.hpp"

namespace afm {

void validate(const DGPSpec& spec) {
  if (spec.n_series < 1 || spec.n_time < 2 || spec.n_factors < 1) {
    throw std::invalid_argument("DGPSpec: need N >= 1, T >= 2, q >= 1");
  }
  if (spec.noise_sd < 0.0) throw std::invalid_argument("DGPSpec: noise_sd >= 0");
  if (spec.function_source == FunctionSource::fixed_suite_plus_fourier) {
    if (spec.n_factors != 1) {
      throw std::invalid_argument("DGPSpec: fixed_suite_plus_fourier requires q = 1");
    }
    if (spec.n_series < 9) {
      throw std::invalid_argument("DGPSpec: fixed_suite_plus_fourier requires N >= 9");
    }
  }
  if (spec.factor_source == FactorSource::ar1_copula && std::abs(spec.theta) >= 1.0) {
    throw std::invalid_argument("DGPSpec: ar1_copula requires |theta| < 1");
  }
  if (spec.burn_in < 0) throw std::invalid_argument("DGPSpec: burn_in >= 0");
}

double eval_suite(int index, double x) {
  switch (index) {
    case 1: return 2.0 * x;
    case 2: return 10.0 * (x - 0.5) * (x - 0.5);
    case 3: return 1.5 * std::cos(3.0 * M_PI * x);
    case 4: return 1.5 * std::sin(2.0 * M_PI * x);
    case 5: return 10.0 * std::pow(x - 0.5, 3);
    case 6: return 2.0 * std::sin(2.0 * M_PI * x) / (2.0 - std::sin(2.0 * M_PI * x));
    case 7: return std::pow(std::sin(2.0 * M_PI * x), 3);
    case 8: return 2.0 * std::sqrt(x);
    case 9: {
      const double e = std::exp(10.0 * (x - 0.5));
      return 2.0 * e / (1.0 + e);
    }
    default:
      throw std::invalid_argument("eval_suite: index must be 1..9, got " +
                                  std::to_string(index));
  }
}

double FunctionDescriptor::operator()(double x) const {
  return kind == Kind::suite ? eval_suite(suite_index, x) : eval_fourier(fourier, x);
}

std::vector<FunctionDescriptor> fixed_function_suite() {
  std::vector<FunctionDescriptor> out(9);
  for (int k = 1; k <= 9; ++k) {
    out[k - 1].kind = FunctionDescriptor::Kind::suite;
    out[k - 1].suite_index = k;
  }
  return out;
}

namespace {

FourierLoading draw_loading(RandomStream& stream) {
  FourierLoading h;
  for (int m = 0; m < 5; ++m) h.a[m] = stream.next_normal();
  for (int m = 0; m < 5; ++m) h.b[m] = stream.next_normal();
  return h;
}

}  // namespace

std::vector<FourierLoading> gen_random_functions(int N, int q, std::uint64_t seed) {
  if (N < 1 || q < 1) throw std::invalid_argument("gen_random_functions: N, q >= 1");
  RandomStream stream(seed);
  std::vector<FourierLoading> out;
  out.reserve(static_cast<std::size_t>(N) * q);
  for (int i = 0; i < N; ++i) {
    for (int l = 0; l < q; ++l) out.push_back(draw_loading(stream));
  }
  return out;
}

Eigen::MatrixXd gen_factors_iid(int T, int q, std::uint64_t seed) {
  if (T < 2 || q < 1) throw std::invalid_argument("gen_factors_iid: T >= 2, q >= 1");
  RandomStream root(seed);
  Eigen::MatrixXd out(T, q);
  for (int l = 0; l < q; ++l) {
    RandomStream col = root.branch(static_cast<std::uint64_t>(l));
    for (int t = 0; t < T; ++t) out(t, l) = col.next_unit();
  }
  return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> gen_factors_ar1(int T, int q, double theta,
                                                            int burn_in,
                                                            std::uint64_t seed) {
  if (T < 2 || q < 1) throw std::invalid_argument("gen_factors_ar1: T >= 2, q >= 1");
  if (std::abs(theta) >= 1.0) {
    throw std::invalid_argument("gen_factors_ar1: |theta| < 1 required (nonstationary)");
  }
  if (burn_in < 0) throw std::invalid_argument("gen_factors_ar1: burn_in >= 0");
  RandomStream root(seed);
  Eigen::MatrixXd factors(T, q);
  Eigen::MatrixXd latent(T, q);
  for (int l = 0; l < q; ++l) {
    RandomStream col = root.branch(static_cast<std::uint64_t>(l));
    double z = 0.0;
    for (int t = 0; t < burn_in; ++t) z = theta * z + col.next_normal();
    for (int t = 0; t < T; ++t) {
      z = theta * z + col.next_normal();
      latent(t, l) = z;
      factors(t, l) = norm_cdf(z);
    }
  }
  return {factors, latent};
}

GroundTruth gen_panel(const DGPSpec& spec) {
  validate(spec);
  const int N = spec.n_series;
  const int T = spec.n_time;
  const int q = spec.n_factors;
  const RandomStream root(spec.seed);
  const std::uint64_t fn_seed = root.branch("functions").next_u64();
  const std::uint64_t factor_seed = root.branch("factors").next_u64();

  GroundTruth truth;
  if (spec.function_source == FunctionSource::random_fourier) {
    const std::vector<FourierLoading> loadings = gen_random_functions(N, q, fn_seed);
    truth.functions.resize(loadings.size());
    for (std::size_t k = 0; k < loadings.size(); ++k) {
      truth.functions[k].kind = FunctionDescriptor::Kind::fourier;
      truth.functions[k].fourier = loadings[k];
    }
  } else {
    truth.functions = fixed_function_suite();
    if (N > 9) {
      const std::vector<FourierLoading> extra = gen_random_functions(N - 9, 1, fn_seed);
      for (const FourierLoading& h : extra) {
        FunctionDescriptor f;
        f.kind = FunctionDescriptor::Kind::fourier;
        f.fourier = h;
        truth.functions.push_back(f);
      }
    }
  }

  if (spec.factor_source == FactorSource::iid_uniform) {
    truth.factors = gen_factors_iid(T, q, factor_seed);
  } else {
    auto [factors, latent] = gen_factors_ar1(T, q, spec.theta, spec.burn_in, factor_seed);
    truth.factors = std::move(factors);
    truth.latent_z = std::move(latent);
  }

  RandomStream noise_stream = root.branch("noise");
  truth.noise.resize(N, T);
  for (int i = 0; i < N; ++i) {
    for (int t = 0; t < T; ++t) {
      truth.noise(i, t) = spec.noise_sd * noise_stream.next_normal();
    }
  }

  truth.panel.values.resize(N, T);
  for (int i = 0; i < N; ++i) {
    for (int t = 0; t < T; ++t) {
      double common = 0.0;
      for (int l = 0; l < q; ++l) common += truth.fn(i, l)(truth.factors(t, l));
      truth.panel.values(i, t) = common + truth.noise(i, t);
    }
  }
  truth.panel.series_ids.reserve(N);
  for (int i = 1; i <= N; ++i) truth.panel.series_ids.push_back(std::to_string(i));
  truth.panel.time_ids.reserve(T);
  for (int t = 1; t <= T; ++t) truth.panel.time_ids.push_back(std::to_string(t));
  return truth;
}

}  // namespace afm
