#include "llr/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "llr/csv.hpp"

namespace llr {

namespace {

namespace fs = std::filesystem;

double scalar_report(const Stream& stream, const Vec& theta) {
  if (stream.kind() == ModelKind::kRegression)
    return theta.dot(stream.mixing_matrix().col(0));
  return theta(0);
}

std::string eta_tag(double eta) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", eta);
  return buf;
}

std::ofstream open_file(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  return out;
}

struct MlUse {
  Vec theta;
  bool defined;
};

// Carry rule: an undefined estimate is replaced by the latest defined one;
// before any exists, the flagged value itself is used.
class MlCarry {
 public:
  explicit MlCarry(const MlPath& path) : path_(path) {}
  MlUse at(long t) {
    const MlEstimate& e = path_.at(t);
    if (e.defined) {
      last_ = &e.theta;
      return {e.theta, true};
    }
    return {last_ ? *last_ : e.theta, false};
  }

 private:
  const MlPath& path_;
  const Vec* last_ = nullptr;
};

}  // namespace

std::string algo_name(Algo algo) {
  switch (algo) {
    case Algo::kSg: return "sg";
    case Algo::kSvrg: return "svrg";
    case Algo::kSgSg: return "sgsg";
    case Algo::kSgAg: return "sgag";
    case Algo::kSvrgAg: return "svrgag";
    case Algo::kGenSg: return "gensg";
    case Algo::kMemory: return "memory";
  }
  return "unknown";
}

Algo algo_from_name(const std::string& name) {
  if (name == "sg") return Algo::kSg;
  if (name == "svrg") return Algo::kSvrg;
  if (name == "sgsg") return Algo::kSgSg;
  if (name == "sgag") return Algo::kSgAg;
  if (name == "svrgag") return Algo::kSvrgAg;
  if (name == "gensg") return Algo::kGenSg;
  if (name == "memory") return Algo::kMemory;
  throw std::invalid_argument("unknown algorithm: " + name);
}

bool algo_is_adaptive(Algo algo) { return algo != Algo::kSg && algo != Algo::kSvrg; }

std::vector<double> regret_difference(const std::vector<double>& losses,
                                      const std::vector<double>& ml_losses) {
  if (losses.size() != ml_losses.size())
    throw std::invalid_argument("regret_difference: length mismatch");
  std::vector<double> out(losses.size());
  double acc = 0.0;
  for (std::size_t s = 0; s < losses.size(); ++s) {
    acc += ml_losses[s] - losses[s];
    out[s] = acc;
  }
  return out;
}

RunTrace run_single(const Stream& stream, const MlPath& ml, const RateSchedule& f,
                    const RateSchedule& mu, Algo algo, double eta0,
                    const RunOptions& options) {
  const long T = stream.horizon();
  const Vec theta0 = Vec::Constant(stream.dim(), options.theta0);

  RunTrace trace;
  trace.algo = algo;
  trace.eta0 = eta0;
  trace.records.reserve(static_cast<std::size_t>(T));
  trace.eta_used.reserve(static_cast<std::size_t>(T));

  SgState sg;
  SvrgState svrg;
  LlrState llr;
  SvrgLlrState svrg_llr;
  GenState gen;
  GenUpdateMap gen_map;
  double memory_gamma = 1.0;
  switch (algo) {
    case Algo::kSg: sg = sg_init(theta0, eta0); break;
    case Algo::kSvrg: svrg = svrg_init(theta0, eta0); break;
    case Algo::kSgSg:
    case Algo::kSgAg: llr = llr_init(theta0, eta0); break;
    case Algo::kMemory:
      llr = llr_init(theta0, eta0);
      memory_gamma = gamma_from_tau(options.tau);
      break;
    case Algo::kSvrgAg: svrg_llr = svrg_llr_init(theta0, eta0); break;
    case Algo::kGenSg:
      gen = gen_init(theta0, eta0);
      gen_map = sg_update_map(stream, f, options.hessian);
      gen_map.hyper_rate = [mu](long t) { return 1.0 / mu(t); };
      break;
  }

  MlCarry carry(ml);
  double regret = 0.0;
  for (long t = 0; t < T; ++t) {
    const Vec* theta = nullptr;
    double eta = 0.0;
    bool diverged = false;
    switch (algo) {
      case Algo::kSg: theta = &sg.theta; eta = sg.eta; diverged = sg.diverged; break;
      case Algo::kSvrg: theta = &svrg.theta; eta = svrg.eta; diverged = svrg.diverged; break;
      case Algo::kSgSg:
      case Algo::kSgAg:
      case Algo::kMemory:
        theta = &llr.theta; eta = llr.eta(); diverged = llr.diverged; break;
      case Algo::kSvrgAg:
        theta = &svrg_llr.theta; eta = svrg_llr.eta; diverged = svrg_llr.diverged; break;
      case Algo::kGenSg: theta = &gen.theta; eta = gen.eta; diverged = gen.diverged; break;
    }

    const MlUse ml_use = carry.at(t);
    const double loss = stream.loss(t, *theta);
    const double ml_loss = stream.loss(t, ml_use.theta);
    regret += ml_loss - loss;
    if (diverged && trace.diverged_at < 0) {
      trace.diverged = true;
      trace.diverged_at = t;
    }
    trace.records.push_back({t, scalar_report(stream, *theta), eta, loss, ml_loss, regret,
                             diverged, ml_use.defined});
    if (options.keep_thetas) trace.thetas.push_back(*theta);

    switch (algo) {
      case Algo::kSg:
        sg = sg_step(sg, stream, f);
        trace.eta_used.push_back(sg.eta);
        break;
      case Algo::kSvrg:
        svrg = svrg_step(svrg, stream, options.svrg_refresh);
        trace.eta_used.push_back(svrg.eta);
        break;
      case Algo::kSgSg:
        llr = sgsg_step(llr, stream, f, mu, options.hessian);
        trace.eta_used.push_back(llr.eta());
        break;
      case Algo::kSgAg:
        llr = sgag_step(llr, stream, f, mu, options.hessian);
        trace.eta_used.push_back(llr.eta());
        break;
      case Algo::kMemory:
        llr = sgag_step(llr, stream, f, mu, options.hessian, memory_gamma);
        trace.eta_used.push_back(llr.eta());
        break;
      case Algo::kSvrgAg:
        svrg_llr = svrgag_step(svrg_llr, stream, mu, options.hessian, options.svrg_refresh);
        trace.eta_used.push_back(svrg_llr.eta);
        break;
      case Algo::kGenSg:
        gen = gensg_step(gen, gen_map, stream);
        trace.eta_used.push_back(gen.eta);
        break;
    }
  }
  return trace;
}

void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << "t,theta,eta,loss,ml_loss,regret_diff,diverged,ml_defined\n";
  for (const TraceRecord& r : trace.records) {
    out << r.t << ',' << csv_double(r.theta) << ',' << csv_double(r.eta) << ','
        << csv_double(r.loss) << ',' << csv_double(r.ml_loss) << ','
        << csv_double(r.regret_diff) << ',' << (r.diverged ? 1 : 0) << ','
        << (r.ml_defined ? 1 : 0) << '\n';
  }
}

std::string trace_filename(const ExperimentConfig& config, Algo algo, double eta0) {
  return model_name(config.stream.kind) + "_" + algo_name(algo) + "_eta" + eta_tag(eta0) +
         ".csv";
}

std::vector<RunTrace> run(const ExperimentConfig& config) {
  if (config.eta0_grid.empty()) throw std::invalid_argument("run: empty eta0 grid");
  for (double eta0 : config.eta0_grid)
    if (!(eta0 > 0.0)) throw std::invalid_argument("run: eta0 must be positive");
  if (config.algos.empty()) throw std::invalid_argument("run: no algorithms selected");

  const Stream stream(config.stream);
  const MlPath ml(stream);
  const RateSchedule f = RateSchedule::sqrt_log();
  const RateSchedule mu = RateSchedule::sqrt_log();

  struct Job {
    Algo algo;
    double eta0;
  };
  std::vector<Job> jobs;
  for (Algo algo : config.algos)
    for (double eta0 : config.eta0_grid) jobs.push_back({algo, eta0});

  std::vector<RunTrace> traces(jobs.size());
  std::string error;
  const long n = static_cast<long>(jobs.size());
#ifdef LLR_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) if (config.parallel)
#endif
  for (long i = 0; i < n; ++i) {
    try {
      const Job& job = jobs[static_cast<std::size_t>(i)];
      traces[static_cast<std::size_t>(i)] =
          run_single(stream, ml, f, mu, job.algo, job.eta0, config.options);
    } catch (const std::exception& e) {
#ifdef LLR_HAVE_OPENMP
#pragma omp critical
#endif
      error = e.what();
    }
  }
  if (!error.empty()) throw std::runtime_error("run: " + error);

  if (!config.out_dir.empty()) {
    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    {
      auto out = open_file(dir / ("samples_" + model_name(stream.kind()) + "_seed" +
                                  std::to_string(config.stream.seed) + ".csv"));
      stream.export_samples_csv(out);
    }
    for (std::size_t i = 0; i < traces.size(); ++i) {
      auto out = open_file(dir / trace_filename(config, jobs[i].algo, jobs[i].eta0));
      write_trace_csv(out, traces[i]);
      if (config.full_theta && stream.dim() > 1) {
        auto full = open_file(dir / (model_name(config.stream.kind) + "_" +
                                     algo_name(jobs[i].algo) + "_eta" + eta_tag(jobs[i].eta0) +
                                     "_theta.csv"));
        full << "t";
        for (int k = 0; k < stream.dim(); ++k) full << ",theta" << k;
        full << '\n';
        // Re-run with full parameters kept; traces stay lean by default.
        RunOptions opts = config.options;
        opts.keep_thetas = true;
        const RunTrace detailed =
            run_single(stream, ml, f, mu, jobs[i].algo, jobs[i].eta0, opts);
        for (long t = 0; t < static_cast<long>(detailed.thetas.size()); ++t) {
          full << t;
          const Vec& th = detailed.thetas[static_cast<std::size_t>(t)];
          for (int k = 0; k < th.size(); ++k) full << ',' << csv_double(th(k));
          full << '\n';
        }
      }
    }
  }
  return traces;
}

QuadraticResult quadratic_diagnostic(const QuadraticConfig& config) {
  if (!(config.alpha > 0.0)) throw std::invalid_argument("quadratic_diagnostic: alpha <= 0");
  Stream stream = quadratic_stream(config.alpha, config.steps);
  const MlPath ml(stream);
  const RateSchedule f = RateSchedule::sqrt_log();
  const RateSchedule mu = RateSchedule::sqrt_log();
  RunOptions options = config.options;
  options.theta0 = config.theta0;
  const RunTrace trace = run_single(stream, ml, f, mu, config.algo, config.eta0, options);

  QuadraticResult result;
  result.diverged = trace.diverged;
  result.diverged_at = trace.diverged_at;
  const long T = config.steps;
  result.ratio_log10.reserve(static_cast<std::size_t>(T));
  for (long t = 0; t < T; ++t) {
    const TraceRecord& r = trace.records[static_cast<std::size_t>(t)];
    result.eta.push_back(r.eta);
    result.theta.push_back(r.theta);
    result.ratio_log10.push_back(std::log10(r.eta / (2.0 * rate_f(t))));
  }

  if (!config.out_dir.empty()) {
    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    auto out = open_file(dir / ("quadratic_" + algo_name(config.algo) + "_eta" +
                                eta_tag(config.eta0) + ".csv"));
    out << "t,ratio_log10,eta,theta,diverged\n";
    for (long t = 0; t < T; ++t) {
      out << t << ',' << csv_double(result.ratio_log10[static_cast<std::size_t>(t)]) << ','
          << csv_double(result.eta[static_cast<std::size_t>(t)]) << ','
          << csv_double(result.theta[static_cast<std::size_t>(t)]) << ','
          << (result.diverged_at >= 0 && t >= result.diverged_at ? 1 : 0) << '\n';
    }
  }
  return result;
}

CompareResult compare_best_fixed(const CompareConfig& config) {
  const Stream stream(config.stream);
  const MlPath ml(stream);
  const RateSchedule f = RateSchedule::sqrt_log();
  const RateSchedule mu = RateSchedule::sqrt_log();

  const long n = static_cast<long>(config.eta0_grid.size());
  std::vector<RunTrace> base_traces(static_cast<std::size_t>(n));
#ifdef LLR_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) if (config.parallel)
#endif
  for (long i = 0; i < n; ++i)
    base_traces[static_cast<std::size_t>(i)] =
        run_single(stream, ml, f, mu, config.base, config.eta0_grid[static_cast<std::size_t>(i)],
                   config.options);

  // Winner by final cumulated regret; diverged runs rank behind all others.
  long best = -1;
  for (long i = 0; i < n; ++i) {
    const RunTrace& trace = base_traces[static_cast<std::size_t>(i)];
    if (best < 0) { best = i; continue; }
    const RunTrace& incumbent = base_traces[static_cast<std::size_t>(best)];
    const bool better = (!trace.diverged && incumbent.diverged) ||
                        (trace.diverged == incumbent.diverged &&
                         trace.final_regret() < incumbent.final_regret());
    if (better) best = i;
  }

  CompareResult result;
  result.winner_eta = config.eta0_grid[static_cast<std::size_t>(best)];
  result.winner_trace = base_traces[static_cast<std::size_t>(best)];
  result.winner_final_regret = result.winner_trace.final_regret();

  std::vector<double> starts = config.adaptive_eta0s;
  if (starts.empty()) starts = {result.winner_eta / 100.0, result.winner_eta * 100.0};
  for (double eta0 : starts)
    result.adaptive_traces.push_back(
        run_single(stream, ml, f, mu, config.adaptive, eta0, config.options));

  if (!config.out_dir.empty()) {
    const fs::path dir(config.out_dir);
    fs::create_directories(dir);
    const std::string stem = "compare_" + model_name(config.stream.kind) + "_" +
                             algo_name(config.base) + "_vs_" + algo_name(config.adaptive);
    auto out = open_file(dir / (stem + ".csv"));
    out << "run,eta0,t,theta,eta,loss,ml_loss,regret_diff,diverged,ml_defined\n";
    const auto dump = [&out](const std::string& label, const RunTrace& trace) {
      for (const TraceRecord& r : trace.records) {
        out << label << ',' << csv_double(trace.eta0) << ',' << r.t << ','
            << csv_double(r.theta) << ',' << csv_double(r.eta) << ',' << csv_double(r.loss)
            << ',' << csv_double(r.ml_loss) << ',' << csv_double(r.regret_diff) << ','
            << (r.diverged ? 1 : 0) << ',' << (r.ml_defined ? 1 : 0) << '\n';
      }
    };
    dump("best_fixed", result.winner_trace);
    for (const RunTrace& trace : result.adaptive_traces) dump("adaptive", trace);

    auto summary = open_file(dir / (stem + "_summary.csv"));
    summary << "run,eta0,final_regret,diverged\n";
    summary << "best_fixed," << csv_double(result.winner_eta) << ','
            << csv_double(result.winner_final_regret) << ','
            << (result.winner_trace.diverged ? 1 : 0) << '\n';
    for (const RunTrace& trace : result.adaptive_traces)
      summary << "adaptive," << csv_double(trace.eta0) << ','
              << csv_double(trace.final_regret()) << ',' << (trace.diverged ? 1 : 0) << '\n';
  }
  return result;
}

}  // namespace llr
