#include "llr/optim.hpp"

#include <cmath>

namespace llr {

namespace {
bool finite(const Vec& v) { return v.allFinite(); }
}  // namespace

SgState sg_init(Vec theta0, double eta) {
  SgState s;
  s.theta = std::move(theta0);
  s.eta = eta;
  return s;
}

SgState sg_step(const SgState& state, const Stream& stream, const RateSchedule& f) {
  if (state.diverged) return state;
  SgState next = state;
  const Vec g = stream.grad(state.t, state.theta);
  next.theta = state.theta + (state.eta / f(state.t)) * g;
  next.t = state.t + 1;
  if (!finite(next.theta)) {
    next = state;  // freeze at the divergence time
    next.diverged = true;
  }
  return next;
}

SvrgState svrg_init(Vec theta0, double eta) {
  SvrgState s;
  s.theta_base = Vec::Zero(theta0.size());
  s.grad_sum_base = Vec::Zero(theta0.size());
  s.theta = std::move(theta0);
  s.eta = eta;
  return s;
}

SvrgState svrg_step(const SvrgState& state, const Stream& stream, long refresh_every) {
  if (state.diverged) return state;
  SvrgState next = state;
  if (refresh_every > 0 && state.t > 0 && state.t % refresh_every == 0) {
    next.theta_base = state.theta;
    next.grad_sum_base.setZero();
    next.base_samples = 0;
  }
  next.grad_sum_base += stream.grad(state.t, next.theta_base);
  next.base_samples += 1;
  const Vec direction = stream.grad(state.t, state.theta) -
                        stream.grad(state.t, next.theta_base) +
                        next.grad_sum_base / static_cast<double>(next.base_samples);
  next.theta = state.theta + state.eta * direction;
  next.t = state.t + 1;
  if (!finite(next.theta) || !finite(next.grad_sum_base)) {
    next = state;
    next.diverged = true;
  }
  return next;
}

}  // namespace llr
