#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "llr/adapt.hpp"
#include "llr/models.hpp"
#include "llr/optim.hpp"
#include "llr/schedule.hpp"

namespace llr {

enum class Algo { kSg, kSvrg, kSgSg, kSgAg, kSvrgAg, kGenSg, kMemory };

std::string algo_name(Algo algo);
Algo algo_from_name(const std::string& name);
bool algo_is_adaptive(Algo algo);

struct RunOptions {
  HessianMode hessian = HessianMode::kFree;
  double tau = 100.0;      // memory length for Algo::kMemory
  long svrg_refresh = 0;   // 0 keeps the base parameter fixed
  double theta0 = 0.0;     // broadcast initial parameter
  bool keep_thetas = false;
};

struct TraceRecord {
  long t;
  double theta;       // regression: first entry of theta^T . M
  double eta;
  double loss;        // l_t(theta_t)
  double ml_loss;     // l_t(theta_ML,t)
  double regret_diff; // sum_{s<=t} (ml_loss_s - loss_s)
  bool diverged;
  bool ml_defined;
};

struct RunTrace {
  Algo algo = Algo::kSg;
  double eta0 = 0.0;
  std::vector<TraceRecord> records;
  std::vector<double> eta_used;  // step size applied in each t -> t+1 transition
  std::vector<Vec> thetas;       // full parameters, only with keep_thetas
  bool diverged = false;
  long diverged_at = -1;  // first frozen row

  double final_regret() const { return records.back().regret_diff; }
};

/// Simulate one algorithm for the stream's whole horizon against the
/// running-ML baseline. Strictly sequential; pure given its inputs.
RunTrace run_single(const Stream& stream, const MlPath& ml, const RateSchedule& f,
                    const RateSchedule& mu, Algo algo, double eta0,
                    const RunOptions& options = {});

/// R_t = sum_{s<=t} (ml_losses[s] - losses[s]).
std::vector<double> regret_difference(const std::vector<double>& losses,
                                      const std::vector<double>& ml_losses);

struct ExperimentConfig {
  StreamConfig stream;
  std::vector<Algo> algos = {Algo::kSgAg};
  std::vector<double> eta0_grid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
  RunOptions options;
  std::string out_dir;    // empty: keep traces in memory only
  bool parallel = true;
  bool full_theta = false;  // also dump full parameter vectors per run
};

/// Sweep every (algorithm, eta0) pair over one shared materialized stream.
/// One trace CSV per run plus one samples CSV per sweep; a diverging run
/// never aborts the sweep. Deterministic given the config.
std::vector<RunTrace> run(const ExperimentConfig& config);

void write_trace_csv(std::ostream& out, const RunTrace& trace);
std::string trace_filename(const ExperimentConfig& config, Algo algo, double eta0);

struct QuadraticConfig {
  double alpha = 1e8;
  Algo algo = Algo::kSgAg;
  double eta0 = 1.0;
  double theta0 = 1.0;
  long steps = 5000;
  RunOptions options;
  std::string out_dir;
};

struct QuadraticResult {
  std::vector<double> ratio_log10;  // log10(eta_t / (2 f(t)))
  std::vector<double> eta;
  std::vector<double> theta;
  bool diverged = false;
  long diverged_at = -1;
};

/// Stability diagnostic on the deterministic quadratic: emits the ratio
/// eta_t / (2 f(t)), which a successful self-tuning run drives to the
/// inverse curvature. Divergence is recorded, not fatal.
QuadraticResult quadratic_diagnostic(const QuadraticConfig& config);

struct CompareConfig {
  StreamConfig stream;
  Algo base = Algo::kSg;
  Algo adaptive = Algo::kSgAg;
  std::vector<double> eta0_grid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0};
  // Adaptive starts; empty derives {winner/100, winner*100}.
  std::vector<double> adaptive_eta0s;
  RunOptions options;
  std::string out_dir;
  bool parallel = true;
};

struct CompareResult {
  double winner_eta = 0.0;          // grid eta with the least final regret
  double winner_final_regret = 0.0;
  RunTrace winner_trace;
  std::vector<RunTrace> adaptive_traces;
};

/// Grid-search the base algorithm for its best fixed step size, then pair
/// it against the adaptive algorithm started from poor eta0 values.
CompareResult compare_best_fixed(const CompareConfig& config);

}  // namespace llr
