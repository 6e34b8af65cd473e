#include "afm/mc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "afm/csv.hpp"
#include "afm/estimator.hpp"
#include "afm/metrics.hpp"
#include "afm/rng.hpp"

namespace afm {

void parallel_for_tasks(int n_tasks, int workers, const std::function<void(int)>& fn) {
  if (workers < 1) workers = 1;
  if (workers == 1 || n_tasks <= 1) {
    for (int k = 0; k < n_tasks; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    while (true) {
      const int k = next.fetch_add(1);
      if (k >= n_tasks) break;
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_threads = std::min(workers, n_tasks);
  pool.reserve(n_threads);
  for (int w = 0; w < n_threads; ++w) pool.emplace_back(body);
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t replication_seed(std::uint64_t master, int N, int T, int q, int rep) {
  std::uint64_t h = mix64(master ^ fnv1a64("mc-replication"));
  h = mix64(h ^ static_cast<std::uint64_t>(N));
  h = mix64(h ^ (static_cast<std::uint64_t>(T) << 20));
  h = mix64(h ^ (static_cast<std::uint64_t>(q) << 40));
  h = mix64(h ^ (static_cast<std::uint64_t>(rep) + 0x51ED270B));
  return h;
}

void validate(const McConfig& config) {
  if (config.Ns.empty() || config.Ts.empty() || config.qs.empty()) {
    throw std::invalid_argument("McConfig: empty grid");
  }
  if (config.replications < 1) throw std::invalid_argument("McConfig: R >= 1");
  if (config.workers < 1) throw std::invalid_argument("McConfig: workers >= 1");
}

McResult run_mc(const McConfig& config) {
  validate(config);
  struct Cell {
    int N, T, q;
  };
  std::vector<Cell> cells;
  for (int q : config.qs) {
    for (int N : config.Ns) {
      for (int T : config.Ts) cells.push_back({N, T, q});
    }
  }
  const int R = config.replications;
  McResult result;
  result.reps.resize(cells.size() * R);

  parallel_for_tasks(static_cast<int>(result.reps.size()), config.workers, [&](int task) {
    const Cell& cell = cells[task / R];
    const int rep = task % R;
    RepResult& slot = result.reps[task];
    slot.N = cell.N;
    slot.T = cell.T;
    slot.q = cell.q;
    slot.rep = rep;
    slot.seed = replication_seed(config.seed, cell.N, cell.T, cell.q, rep);
    const auto start = std::chrono::steady_clock::now();
    try {
      DGPSpec dgp = config.dgp;
      dgp.n_series = cell.N;
      dgp.n_time = cell.T;
      dgp.n_factors = cell.q;
      dgp.seed = slot.seed;
      const GroundTruth truth = gen_panel(dgp);

      EstimatorConfig est = config.estimator;
      est.q = cell.q;
      est.seed = RandomStream(slot.seed).branch("fit").next_u64();
      auto [model, report] = fit(truth.panel, est);

      const Alignment alignment = align(model.factors.values, truth.factors);
      slot.mse_g = mse_g(model, truth, alignment);
      slot.mse_f = mse_f(model.factors, truth.factors, alignment);
      slot.loss = report.final_loss;
      slot.iterations = report.n_iterations;
      slot.ok = true;
    } catch (const std::exception& e) {
      slot.ok = false;
      slot.error = e.what();
    }
    slot.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  result.cells.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellResult cr;
    cr.N = cells[c].N;
    cr.T = cells[c].T;
    cr.q = cells[c].q;
    cr.replications = R;
    std::vector<double> gs, fs;
    for (int rep = 0; rep < R; ++rep) {
      const RepResult& rr = result.reps[c * R + rep];
      cr.seconds += rr.seconds;
      if (!rr.ok) {
        ++cr.n_failed;
        continue;
      }
      gs.push_back(rr.mse_g);
      fs.push_back(rr.mse_f);
    }
    if (!gs.empty()) {
      std::tie(cr.mse_g_median, cr.mse_g_mad) = median_and_mad(gs);
      std::tie(cr.mse_f_median, cr.mse_f_mad) = median_and_mad(fs);
    }
    result.cells.push_back(cr);
  }
  return result;
}

std::string mc_table_csv(const McResult& result, const std::vector<int>& Ts) {
  // Wide layout mirroring the summary table: one row per (q, N), column
  // groups per T.
  std::map<std::pair<int, int>, std::map<int, const CellResult*>> by_row;
  for (const CellResult& cell : result.cells) {
    by_row[{cell.q, cell.N}][cell.T] = &cell;
  }
  // Wall-clock lives only in the in-memory result: the files are a pure
  // function of (config, seed).
  std::ostringstream out;
  out << "q,N";
  for (int T : Ts) {
    out << ",mse_g_median_T" << T << ",mse_g_mad_T" << T << ",mse_f_median_T" << T
        << ",mse_f_mad_T" << T << ",failed_T" << T;
  }
  out << "\n";
  for (const auto& [key, row] : by_row) {
    out << key.first << ',' << key.second;
    for (int T : Ts) {
      const auto it = row.find(T);
      if (it == row.end()) {
        out << ",,,,,";
        continue;
      }
      const CellResult& cell = *it->second;
      out << ',' << format_double(cell.mse_g_median) << ',' << format_double(cell.mse_g_mad)
          << ',' << format_double(cell.mse_f_median) << ',' << format_double(cell.mse_f_mad)
          << ',' << cell.n_failed;
    }
    out << "\n";
  }
  return out.str();
}

std::string mc_raw_csv(const McResult& result) {
  std::ostringstream out;
  out << "q,N,T,rep,seed,mse_g,mse_f,loss,iterations,status\n";
  for (const RepResult& rr : result.reps) {
    out << rr.q << ',' << rr.N << ',' << rr.T << ',' << rr.rep << ',' << rr.seed << ',';
    if (rr.ok) {
      out << format_double(rr.mse_g) << ',' << format_double(rr.mse_f) << ','
          << format_double(rr.loss) << ',' << rr.iterations << ",ok\n";
    } else {
      std::string msg = rr.error;
      for (char& ch : msg) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      out << ",,,," << "error:" << msg << "\n";
    }
  }
  return out.str();
}

}  // namespace afm
