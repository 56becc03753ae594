#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "llr/harness.hpp"
#include "llr/oracles.hpp"

using namespace llr;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("parallel certification equals the serial reference") {
  StreamConfig sc;
  sc.kind = ModelKind::kRegression;
  sc.horizon = 500;
  const Stream stream(sc);
  const RateSchedule f = RateSchedule::sqrt_log();
  CertGrid grid;
  grid.ts = {10, 100, 500};
  const auto serial = certify_stream(stream, f, grid, 0.0, false);
  const auto parallel = certify_stream(stream, f, grid, 0.0, true);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    REQUIRE(serial[i].eta == parallel[i].eta);
    REQUIRE(serial[i].t == parallel[i].t);
    REQUIRE(serial[i].norm_a == parallel[i].norm_a);
    REQUIRE(serial[i].rel_err_fd == parallel[i].rel_err_fd);
    REQUIRE(serial[i].rel_err_pathwise == parallel[i].rel_err_pathwise);
    REQUIRE(serial[i].diverged == parallel[i].diverged);
  }
}

TEST_CASE("parallel sweep output is byte-identical to the serial reference") {
  ExperimentConfig config;
  config.stream.kind = ModelKind::kBernoulli;
  config.stream.horizon = 800;
  config.algos = {Algo::kSg, Algo::kSvrg, Algo::kSgAg, Algo::kSvrgAg};
  config.eta0_grid = {1e-3, 1e-1, 1.0};

  const fs::path serial_dir = fs::temp_directory_path() / "llr_tests" / "par_serial";
  const fs::path parallel_dir = fs::temp_directory_path() / "llr_tests" / "par_parallel";
  fs::remove_all(serial_dir);
  fs::remove_all(parallel_dir);

  config.out_dir = serial_dir.string();
  config.parallel = false;
  run(config);
  config.out_dir = parallel_dir.string();
  config.parallel = true;
  run(config);

  int files = 0;
  for (const auto& entry : fs::directory_iterator(serial_dir)) {
    ++files;
    REQUIRE(slurp(entry.path()) == slurp(parallel_dir / entry.path().filename()));
  }
  CHECK(files == 13);  // 12 traces plus the samples file
}
