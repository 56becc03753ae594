#pragma once

#include "llr/models.hpp"
#include "llr/schedule.hpp"

namespace llr {

/// Fixed-step-size stochastic gradient ascent state.
struct SgState {
  Vec theta;
  double eta = 0.1;  // constant across the run
  long t = 0;
  bool diverged = false;
};

SgState sg_init(Vec theta0, double eta);

/// theta' = theta + (eta/f(t)) * grad l_t(theta). A non-finite result
/// freezes the state and sets the diverged flag; further steps are no-ops.
SgState sg_step(const SgState& state, const Stream& stream, const RateSchedule& f);

/// Online SVRG state. The base parameter starts at 0 and, unless a refresh
/// interval is set, is never moved; grad_sum_base accumulates the gradients
/// of every l_s at the base parameter.
struct SvrgState {
  Vec theta;
  Vec theta_base;
  Vec grad_sum_base;
  long base_samples = 0;  // gradients accumulated since the last refresh
  double eta = 0.1;
  long t = 0;
  bool diverged = false;
};

SvrgState svrg_init(Vec theta0, double eta);

/// s' = s + grad l_t(base); theta' = theta + eta*(grad l_t(theta)
/// - grad l_t(base) + s'/count). No rate schedule divides the update.
/// refresh_every > 0 re-bases at theta and clears the sum every so many
/// steps (off by default).
SvrgState svrg_step(const SvrgState& state, const Stream& stream, long refresh_every = 0);

}  // namespace llr
