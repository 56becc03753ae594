#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "llr/optim.hpp"

using namespace llr;

TEST_CASE("sg step hand value") {
  const Stream stream = Stream::with_scalar_samples(ModelKind::kGaussian, {2.0});
  const RateSchedule f = RateSchedule::sqrt_log();
  const SgState next = sg_step(sg_init(scalar_vec(0.0), 1.0), stream, f);
  CHECK(next.theta(0) == doctest::Approx(2.0 / rate_f(0)).epsilon(1e-15));
  CHECK(next.theta(0) == doctest::Approx(1.28727).epsilon(1e-4));
  CHECK(next.t == 1);
  CHECK(next.eta == 1.0);
}

TEST_CASE("sg fixed point at the datum") {
  const Stream stream = Stream::with_scalar_samples(ModelKind::kGaussian, {3.25});
  const SgState next = sg_step(sg_init(scalar_vec(3.25), 0.7), stream, RateSchedule::sqrt_log());
  CHECK(next.theta(0) == 3.25);
}

TEST_CASE("sg oscillates with period two at the stability boundary") {
  // alpha = 1, constant f = 1, eta = 2: theta' = theta - 2*theta = -theta.
  const Stream quad = quadratic_stream(1.0, 10);
  const RateSchedule f = RateSchedule::constant(1.0);
  SgState s = sg_init(scalar_vec(0.8), 2.0);
  for (int i = 0; i < 10; ++i) {
    const SgState next = sg_step(s, quad, f);
    CHECK(next.theta(0) == -s.theta(0));
    s = next;
  }
}

TEST_CASE("sg contracts the quadratic below the edge") {
  // eta/f(t) < 1/alpha for every t, so |theta| shrinks monotonically.
  const Stream quad = quadratic_stream(1.0, 100);
  const RateSchedule f = RateSchedule::sqrt_log();
  SgState s = sg_init(scalar_vec(5.0), 1.0);
  for (int i = 0; i < 100; ++i) {
    const SgState next = sg_step(s, quad, f);
    REQUIRE(std::abs(next.theta(0)) < std::abs(s.theta(0)));
    s = next;
  }
}

TEST_CASE("sg replay determinism") {
  StreamConfig config;
  config.kind = ModelKind::kGaussian;
  config.horizon = 100;
  const Stream stream(config);
  const RateSchedule f = RateSchedule::sqrt_log();
  SgState a = sg_init(scalar_vec(0.0), 0.5);
  SgState b = sg_init(scalar_vec(0.0), 0.5);
  for (int i = 0; i < 100; ++i) {
    a = sg_step(a, stream, f);
    b = sg_step(b, stream, f);
    REQUIRE(a.theta(0) == b.theta(0));
  }
}

TEST_CASE("sg divergence freezes the state") {
  const Stream quad = quadratic_stream(1.0, 5000);
  const RateSchedule f = RateSchedule::constant(1.0);
  SgState s = sg_init(scalar_vec(1.0), 1e8);  // wildly unstable
  for (int i = 0; i < 5000 && !s.diverged; ++i) s = sg_step(s, quad, f);
  REQUIRE(s.diverged);
  const SgState frozen = sg_step(s, quad, f);
  CHECK(frozen.theta(0) == s.theta(0));
  CHECK(frozen.t == s.t);
  CHECK(std::isfinite(s.theta(0)));
}

TEST_CASE("svrg step hand value") {
  const Stream stream = Stream::with_scalar_samples(ModelKind::kGaussian, {2.0});
  SvrgState s = svrg_init(scalar_vec(0.0), 0.1);
  s = svrg_step(s, stream);
  CHECK(s.grad_sum_base(0) == 2.0);
  CHECK(s.theta(0) == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(s.base_samples == 1);
}

TEST_CASE("svrg instantaneous gradients cancel when base equals current") {
  const Stream stream = Stream::with_scalar_samples(ModelKind::kGaussian, {4.0, 4.5, 3.0});
  SvrgState s = svrg_init(scalar_vec(1.5), 0.25);
  s.theta_base = s.theta;  // exact cancellation of the two gradient terms
  s.grad_sum_base = scalar_vec(0.6);
  const SvrgState next = svrg_step(s, stream);
  const double sum_next = 0.6 + stream.grad(0, s.theta)(0);
  CHECK(next.theta(0) == s.theta(0) + 0.25 * (sum_next / 1.0));
}

TEST_CASE("svrg with zero step size still accumulates the base sum") {
  const Stream stream = Stream::with_scalar_samples(ModelKind::kGaussian, {2.0, 3.0});
  SvrgState s = svrg_init(scalar_vec(1.0), 0.0);
  s = svrg_step(s, stream);
  s = svrg_step(s, stream);
  CHECK(s.theta(0) == 1.0);
  CHECK(s.grad_sum_base(0) == 5.0);  // gradients at the zero base: 2 + 3
}

TEST_CASE("svrg base sum replays exactly") {
  StreamConfig config;
  config.kind = ModelKind::kBernoulli;
  config.horizon = 50;
  const Stream stream(config);
  SvrgState s = svrg_init(scalar_vec(0.0), 0.05);
  for (int i = 0; i < 50; ++i) s = svrg_step(s, stream);
  Vec replay = Vec::Zero(1);
  for (long t = 0; t < 50; ++t) replay += stream.grad(t, Vec::Zero(1));
  CHECK(s.grad_sum_base(0) == replay(0));
}

TEST_CASE("svrg optional base refresh") {
  StreamConfig config;
  config.kind = ModelKind::kGaussian;
  config.horizon = 25;
  const Stream stream(config);
  SvrgState s = svrg_init(scalar_vec(0.0), 0.05);
  Vec theta_at_20;
  for (int i = 0; i < 25; ++i) {
    if (s.t == 20) theta_at_20 = s.theta;  // the last refresh point
    s = svrg_step(s, stream, 10);
  }
  CHECK(s.theta_base == theta_at_20);
  CHECK(s.base_samples == 5);
}

TEST_CASE("svrg divergence freezes") {
  StreamConfig config;
  config.kind = ModelKind::kGaussian;
  config.horizon = 2000;
  const Stream stream(config);
  SvrgState s = svrg_init(scalar_vec(0.0), 10.0);  // -9x contraction factor
  for (int i = 0; i < 2000 && !s.diverged; ++i) s = svrg_step(s, stream);
  REQUIRE(s.diverged);
  CHECK(s.theta.allFinite());
  const SvrgState frozen = svrg_step(s, stream);
  CHECK(frozen.theta(0) == s.theta(0));
  CHECK(frozen.grad_sum_base(0) == s.grad_sum_base(0));
}
