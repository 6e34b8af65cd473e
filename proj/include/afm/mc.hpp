#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "afm/model.hpp"
#include "afm/simulate.hpp"

namespace afm {

// Runs tasks 0..n_tasks-1 on `workers` threads.  Each task writes only its
// own output slot, so results are identical for any worker count.
void parallel_for_tasks(int n_tasks, int workers, const std::function<void(int)>& fn);

// Per-replication seed: a pure hash of the master seed and the cell
// parameters, independent of grid enumeration order.
std::uint64_t replication_seed(std::uint64_t master, int N, int T, int q, int rep);

struct McConfig {
  std::vector<int> Ns;
  std::vector<int> Ts;
  std::vector<int> qs;
  int replications = 1;
  DGPSpec dgp;               // template; N, T, q, seed filled per replication
  EstimatorConfig estimator; // template; q and seed filled per replication
  std::uint64_t seed = 0;
  int workers = 1;
};

void validate(const McConfig& config);

struct RepResult {
  int N = 0, T = 0, q = 0, rep = 0;
  std::uint64_t seed = 0;
  double mse_g = 0.0;
  double mse_f = 0.0;
  double loss = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  bool ok = false;
  std::string error;
};

struct CellResult {
  int N = 0, T = 0, q = 0;
  int replications = 0;
  int n_failed = 0;
  double mse_g_median = 0.0, mse_g_mad = 0.0;
  double mse_f_median = 0.0, mse_f_mad = 0.0;
  double seconds = 0.0;  // summed replication wall time
};

struct McResult {
  std::vector<CellResult> cells;  // grid order: q outer, N middle, T inner
  std::vector<RepResult> reps;
};

// Simulate -> fit -> evaluate, R times per (N, T, q) cell.  Failures are
// recorded per replication and flagged on the cell; the run continues.
McResult run_mc(const McConfig& config);

std::string mc_table_csv(const McResult& result, const std::vector<int>& Ts);
std::string mc_raw_csv(const McResult& result);

}  // namespace afm
