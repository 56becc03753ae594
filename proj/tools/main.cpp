#include <CLI11.hpp>
#include <map>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "llr/harness.hpp"
#include "llr/oracles.hpp"

namespace {

using namespace llr;

// Flat key=value config mirroring the CLI flags. '#' starts a comment;
// repeated keys accumulate (like repeatable flags).
std::map<std::string, std::vector<std::string>> parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  std::map<std::string, std::vector<std::string>> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty() && !value.empty()) kv[key].push_back(value);
  }
  return kv;
}

// Applies file values to every option the command line left untouched.
class ConfigOverlay {
 public:
  ConfigOverlay(const CLI::App* cmd, const std::string& path) : cmd_(cmd) {
    if (!path.empty()) kv_ = parse_config_file(path);
  }

  void apply(const char* key, std::string& value) const {
    if (const auto* v = lookup(key)) value = v->back();
  }
  void apply(const char* key, long& value) const {
    if (const auto* v = lookup(key)) value = std::stol(v->back());
  }
  void apply(const char* key, std::uint64_t& value) const {
    if (const auto* v = lookup(key)) value = std::stoull(v->back());
  }
  void apply(const char* key, double& value) const {
    if (const auto* v = lookup(key)) value = std::stod(v->back());
  }
  void apply(const char* key, bool& value) const {
    if (const auto* v = lookup(key)) value = v->back() == "true" || v->back() == "1";
  }
  void apply(const char* key, std::vector<std::string>& value) const {
    if (const auto* v = lookup(key)) value = *v;
  }
  void apply(const char* key, std::vector<double>& value) const {
    if (const auto* v = lookup(key)) {
      value.clear();
      for (const std::string& s : *v) value.push_back(std::stod(s));
    }
  }

 private:
  const std::vector<std::string>* lookup(const char* key) const {
    if (cmd_->count("--" + std::string(key)) > 0) return nullptr;  // CLI wins
    const auto it = kv_.find(key);
    return it == kv_.end() ? nullptr : &it->second;
  }

  const CLI::App* cmd_;
  std::map<std::string, std::vector<std::string>> kv_;
};

StreamConfig make_stream_config(const std::string& model, std::uint64_t seed, long steps,
                                double alpha) {
  StreamConfig config;
  config.kind = model_from_name(model);
  config.seed = seed;
  config.quadratic_alpha = alpha;
  if (steps > 0) {
    config.horizon = steps;
  } else {
    config.horizon = config.kind == ModelKind::kRegression ? 7500 : 2500;
  }
  return config;
}

int cmd_run(const std::string& model, const std::vector<std::string>& algos,
            std::vector<double> eta0s, long steps, std::uint64_t seed,
            const std::string& hessian, double tau, double theta0, double alpha,
            const std::string& out, bool serial, bool full_theta) {
  ExperimentConfig config;
  config.stream = make_stream_config(model, seed, steps, alpha);
  config.algos.clear();
  for (const std::string& name : algos) config.algos.push_back(algo_from_name(name));
  if (!eta0s.empty()) config.eta0_grid = std::move(eta0s);
  config.options.hessian = hessian == "exact" ? HessianMode::kExact : HessianMode::kFree;
  config.options.tau = tau;
  config.options.theta0 = theta0;
  config.out_dir = out;
  config.parallel = !serial;
  config.full_theta = full_theta;
  const auto traces = run(config);
  for (const RunTrace& trace : traces) {
    std::cout << trace_filename(config, trace.algo, trace.eta0) << ": final_regret="
              << trace.final_regret() << (trace.diverged ? " (diverged)" : "") << '\n';
  }
  return 0;
}

int cmd_certify(long steps, std::uint64_t seed, double theta0_quadratic,
                const std::string& out, bool serial) {
  const RateSchedule f = RateSchedule::sqrt_log();
  CertGrid grid;
  std::vector<CertCell> cells;
  for (ModelKind kind : {ModelKind::kGaussian, ModelKind::kBernoulli,
                         ModelKind::kRegression, ModelKind::kQuadratic}) {
    StreamConfig config;
    config.kind = kind;
    config.seed = seed;
    config.horizon = steps;
    const Stream stream(config);
    const double theta0 = kind == ModelKind::kQuadratic ? theta0_quadratic : 0.0;
    const auto part = certify_stream(stream, f, grid, theta0, !serial);
    cells.insert(cells.end(), part.begin(), part.end());
  }
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    std::ofstream file(std::filesystem::path(out) / "certification.csv");
    write_certification_csv(file, cells);
  }
  write_certification_csv(std::cout, cells);
  return 0;
}

int cmd_quadratic(double alpha, const std::string& algo, double eta0, double theta0,
                  long steps, const std::string& hessian, double tau,
                  const std::string& out) {
  QuadraticConfig config;
  config.alpha = alpha;
  config.algo = algo_from_name(algo);
  config.eta0 = eta0;
  config.theta0 = theta0;
  config.steps = steps;
  config.options.hessian = hessian == "exact" ? HessianMode::kExact : HessianMode::kFree;
  config.options.tau = tau;
  config.out_dir = out;
  const QuadraticResult result = quadratic_diagnostic(config);
  std::cout << "final ratio log10(eta/(2f)) = " << result.ratio_log10.back()
            << (result.diverged ? " (diverged at t=" + std::to_string(result.diverged_at) + ")"
                                : "")
            << '\n';
  return 0;
}

int cmd_compare(const std::string& model, const std::string& base, const std::string& adaptive,
                std::vector<double> grid, std::vector<double> starts, long steps,
                std::uint64_t seed, const std::string& hessian, double tau,
                const std::string& out, bool serial) {
  CompareConfig config;
  config.stream = make_stream_config(model, seed, steps, 1.0);
  config.base = algo_from_name(base);
  config.adaptive = algo_from_name(adaptive);
  if (!grid.empty()) config.eta0_grid = std::move(grid);
  config.adaptive_eta0s = std::move(starts);
  config.options.hessian = hessian == "exact" ? HessianMode::kExact : HessianMode::kFree;
  config.options.tau = tau;
  config.out_dir = out;
  config.parallel = !serial;
  const CompareResult result = compare_best_fixed(config);
  std::cout << "best fixed " << base << ": eta=" << result.winner_eta
            << " final_regret=" << result.winner_final_regret << '\n';
  for (const RunTrace& trace : result.adaptive_traces)
    std::cout << adaptive << " from eta0=" << trace.eta0
              << ": final_regret=" << trace.final_regret()
              << (trace.diverged ? " (diverged)" : "") << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online step-size adaptation for stochastic gradient ascent"};
  app.require_subcommand(1);

  std::string model = "gaussian";
  std::vector<std::string> algos = {"sgag"};
  std::vector<double> eta0s;
  long steps = 0;
  std::uint64_t seed = 1;
  std::string hessian = "free";
  double tau = 100.0;
  double theta0 = 0.0;
  double alpha = 1e8;
  std::string out;
  bool serial = false;
  bool full_theta = false;

  std::string config_path;

  auto* run_cmd = app.add_subcommand("run", "Sweep algorithms over an eta0 grid");
  run_cmd->add_option("--config", config_path, "flat key=value file; command line overrides it");
  run_cmd->add_option("--model", model, "gaussian|bernoulli|regression|quadratic");
  run_cmd->add_option("--algo", algos, "sg|svrg|sgsg|sgag|svrgag|gensg|memory (repeatable)");
  run_cmd->add_option("--eta0", eta0s, "initial step sizes (repeatable)");
  run_cmd->add_option("--steps", steps, "horizon (default 2500; regression 7500)");
  run_cmd->add_option("--seed", seed, "stream seed");
  run_cmd->add_option("--hessian", hessian, "free|exact")
      ->check(CLI::IsMember({"free", "exact"}));
  run_cmd->add_option("--tau", tau, "memory length for the memory algorithm");
  run_cmd->add_option("--theta0", theta0, "initial parameter (broadcast)");
  run_cmd->add_option("--alpha", alpha, "quadratic curvature");
  run_cmd->add_option("--out", out, "output directory for CSV traces");
  run_cmd->add_flag("--serial", serial, "disable the parallel sweep");
  run_cmd->add_flag("--full-theta", full_theta, "also dump full parameter vectors");

  auto* certify_cmd = app.add_subcommand("certify", "Derivative-oracle certification sweep");
  certify_cmd->add_option("--config", config_path, "flat key=value file; command line overrides it");
  long cert_steps = 1000;
  double cert_theta0 = 1.0;
  certify_cmd->add_option("--steps", cert_steps, "stream horizon (>= largest grid t)");
  certify_cmd->add_option("--seed", seed, "stream seed");
  certify_cmd->add_option("--theta0", cert_theta0, "quadratic replay start");
  certify_cmd->add_option("--out", out, "output directory");
  certify_cmd->add_flag("--serial", serial, "disable the parallel sweep");

  auto* quad_cmd = app.add_subcommand("quadratic", "Step-size stability diagnostic");
  quad_cmd->add_option("--config", config_path, "flat key=value file; command line overrides it");
  std::string quad_algo = "sgag";
  double quad_eta0 = 1.0;
  double quad_theta0 = 1.0;
  long quad_steps = 5000;
  quad_cmd->add_option("--alpha", alpha, "curvature of the quadratic");
  quad_cmd->add_option("--algo", quad_algo, "algorithm");
  quad_cmd->add_option("--eta0", quad_eta0, "initial step size");
  quad_cmd->add_option("--theta0", quad_theta0, "initial parameter");
  quad_cmd->add_option("--steps", quad_steps, "run length");
  quad_cmd->add_option("--hessian", hessian, "free|exact")
      ->check(CLI::IsMember({"free", "exact"}));
  quad_cmd->add_option("--tau", tau, "memory length");
  quad_cmd->add_option("--out", out, "output directory");

  auto* compare_cmd =
      app.add_subcommand("compare", "Best fixed step size versus adaptive restarts");
  compare_cmd->add_option("--config", config_path, "flat key=value file; command line overrides it");
  std::string base = "sg";
  std::string adaptive = "sgag";
  std::vector<double> starts;
  compare_cmd->add_option("--model", model, "model");
  compare_cmd->add_option("--base", base, "grid-searched base algorithm");
  compare_cmd->add_option("--adaptive", adaptive, "adaptive algorithm");
  compare_cmd->add_option("--eta0", eta0s, "grid for the base search (repeatable)");
  compare_cmd->add_option("--start", starts, "adaptive eta0 values (default winner/100, winner*100)");
  compare_cmd->add_option("--steps", steps, "horizon");
  compare_cmd->add_option("--seed", seed, "stream seed");
  compare_cmd->add_option("--hessian", hessian, "free|exact")
      ->check(CLI::IsMember({"free", "exact"}));
  compare_cmd->add_option("--tau", tau, "memory length");
  compare_cmd->add_option("--out", out, "output directory");
  compare_cmd->add_flag("--serial", serial, "disable the parallel sweep");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const ConfigOverlay file(run_cmd, config_path);
      file.apply("model", model);
      file.apply("algo", algos);
      file.apply("eta0", eta0s);
      file.apply("steps", steps);
      file.apply("seed", seed);
      file.apply("hessian", hessian);
      file.apply("tau", tau);
      file.apply("theta0", theta0);
      file.apply("alpha", alpha);
      file.apply("out", out);
      file.apply("serial", serial);
      file.apply("full-theta", full_theta);
      return cmd_run(model, algos, eta0s, steps, seed, hessian, tau, theta0, alpha, out,
                     serial, full_theta);
    }
    if (certify_cmd->parsed()) {
      const ConfigOverlay file(certify_cmd, config_path);
      file.apply("steps", cert_steps);
      file.apply("seed", seed);
      file.apply("theta0", cert_theta0);
      file.apply("out", out);
      file.apply("serial", serial);
      return cmd_certify(cert_steps, seed, cert_theta0, out, serial);
    }
    if (quad_cmd->parsed()) {
      const ConfigOverlay file(quad_cmd, config_path);
      file.apply("alpha", alpha);
      file.apply("algo", quad_algo);
      file.apply("eta0", quad_eta0);
      file.apply("theta0", quad_theta0);
      file.apply("steps", quad_steps);
      file.apply("hessian", hessian);
      file.apply("tau", tau);
      file.apply("out", out);
      return cmd_quadratic(alpha, quad_algo, quad_eta0, quad_theta0, quad_steps, hessian, tau,
                           out);
    }
    if (compare_cmd->parsed()) {
      const ConfigOverlay file(compare_cmd, config_path);
      file.apply("model", model);
      file.apply("base", base);
      file.apply("adaptive", adaptive);
      file.apply("eta0", eta0s);
      file.apply("start", starts);
      file.apply("steps", steps);
      file.apply("seed", seed);
      file.apply("hessian", hessian);
      file.apply("tau", tau);
      file.apply("out", out);
      file.apply("serial", serial);
      return cmd_compare(model, base, adaptive, eta0s, starts, steps, seed, hessian, tau, out,
                         serial);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
