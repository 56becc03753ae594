#pragma once

#include <functional>

#include "llr/models.hpp"
#include "llr/schedule.hpp"

namespace llr {

enum class HessianMode {
  kFree,   // single-gradient surrogate: grad evaluated at theta + h
  kExact,  // grad(theta) plus an exact Hessian-vector product
};

/// State of the self-tuning SG algorithms (SG/SG and SG/AG).
///
/// h approximates the derivative of theta_t with respect to log(eta),
/// maintained online; n is the running root-mean-square of the
/// hypergradient lambda and d its renormaliser (both start at 0 and are
/// only used by the AdaGrad-style update).
struct LlrState {
  Vec theta;
  double log_eta = 0.0;
  Vec h;
  double n = 0.0;
  double d = 0.0;
  long t = 0;
  bool diverged = false;

  double eta() const;
};

LlrState llr_init(Vec theta0, double eta0);

/// h' = h + (eta_next/f(t)) * grad l_t(theta + h). The single evaluation
/// folds the finite-difference Hessian surrogate with the gradient term.
Vec h_update_hessian_free(const LlrState& state, const Stream& stream,
                          const RateSchedule& f, double eta_next);

/// h' = h + (eta_next/f(t)) * grad l_t(theta)
///        + (eta_next/f(t)) * d^2 l_t(theta) . h.
Vec h_update_exact(const LlrState& state, const Stream& stream,
                   const RateSchedule& f, double eta_next);

/// One step of SG/SG: ascend log(eta) by (1/mu_t) * <grad, h>, then update
/// h and theta with the fresh step size. gamma < 1 applies the
/// memory-discounted h update (see gamma_from_tau).
LlrState sgsg_step(const LlrState& state, const Stream& stream, const RateSchedule& f,
                   const RateSchedule& mu, HessianMode mode = HessianMode::kFree,
                   double gamma = 1.0);

/// One step of SG/AG: as SG/SG but the log(eta) increment is normalised by
/// the running RMS of the hypergradient. The increment is skipped while the
/// RMS is exactly zero, and the whole (d, n, log eta) update is skipped for
/// a non-finite hypergradient.
LlrState sgag_step(const LlrState& state, const Stream& stream, const RateSchedule& f,
                   const RateSchedule& mu, HessianMode mode = HessianMode::kFree,
                   double gamma = 1.0);

/// State of SVRG/AG: the SVRG quantities plus the self-tuning ones.
/// eta is maintained directly (the update is multiplicative).
struct SvrgLlrState {
  Vec theta;
  Vec theta_base;
  Vec grad_sum_base;
  long base_samples = 0;
  double eta = 0.1;
  Vec h;
  double n = 0.0;
  double d = 0.0;
  long t = 0;
  bool diverged = false;
};

SvrgLlrState svrg_llr_init(Vec theta0, double eta0);

/// One step of SVRG/AG. No rate schedule divides the parameter update;
/// eta' = eta * exp(normalised hypergradient). kExact replaces the shifted
/// gradient with grad(theta) + Hessian.h.
SvrgLlrState svrgag_step(const SvrgLlrState& state, const Stream& stream,
                         const RateSchedule& mu, HessianMode mode = HessianMode::kFree,
                         long refresh_every = 0);

/// Memory factor gamma = exp(-1/tau); tau > 0 is the number of recent
/// samples kept in memory. Throws std::domain_error for tau <= 0.
double gamma_from_tau(double tau);

/// Discounted pathwise-derivative state for the memory variant.
struct MemoryState {
  Vec h;         // discounted derivative, replaces LlrState::h
  double gamma;  // exp(-1/tau)
  double tau;
};

MemoryState memory_init(int dim, double tau);

/// H' = gamma * (H + (eta_next/f(t)) * grad + (eta_next/f(t)) * Hessian.H),
/// the discounted analogue of h_update_exact (or of the hessian-free
/// surrogate with kFree). Reads theta and t from state, the derivative
/// from mem.
Vec memory_h_update(const MemoryState& mem, const LlrState& state, const Stream& stream,
                    const RateSchedule& f, double eta_next,
                    HessianMode mode = HessianMode::kExact);

/// An arbitrary one-step update map theta' = F(theta, eta) with its
/// partial derivatives, for the generic self-tuning wrapper. Missing
/// partials fall back to central finite differences of apply.
struct GenUpdateMap {
  std::function<Vec(long t, const Vec& theta, double eta)> apply;
  // Directional derivative of F in theta: dF(theta,eta).v
  std::function<Vec(long t, const Vec& theta, double eta, const Vec& v)> partial_theta;
  // Derivative of F in eta.
  std::function<Vec(long t, const Vec& theta, double eta)> partial_eta;
  // Hyper step size alpha_t; defaults to 1/mu_t with the sqrt-log rate.
  std::function<double(long t)> hyper_rate;
  // Ascend log(eta) (multiplicative on eta) instead of eta itself.
  bool ascend_log_eta = true;
  double fd_epsilon = 1e-6;
};

/// The plain SG update map theta' = theta + (eta/f(t)) grad l_t(theta),
/// with exact partials (kExact) or the finite-difference defaults (kFree).
GenUpdateMap sg_update_map(const Stream& stream, const RateSchedule& f,
                           HessianMode mode = HessianMode::kExact);

struct GenState {
  Vec theta;
  double eta = 0.1;
  Vec h;
  long t = 0;
  bool diverged = false;
};

GenState gen_init(Vec theta0, double eta0);

/// One step of the generic wrapper: ascend the hyperparameter along
/// <grad l_t(theta), h>, propagate h through the partials of F evaluated
/// at the fresh hyperparameter, then apply F.
GenState gensg_step(const GenState& state, const GenUpdateMap& map, const Stream& stream);

/// Shared AdaGrad-style normaliser update:
///   d' = (1 - 1/mu) d + 1/mu
///   n'^2 = ((1 - 1/mu) n^2 + (1/mu) lambda^2) / d'
///   increment = (lambda / n') / mu, skipped while n' == 0.
/// The RMS is evaluated in rescaled form so that lambda far beyond the
/// square-root of the double range still normalises correctly.
struct AgUpdate {
  double n_next = 0.0;
  double d_next = 0.0;
  double increment = 0.0;
  bool skipped = false;  // lambda non-finite or n' == 0
};

AgUpdate ag_normalized_increment(double n, double d, double lambda, double mu);

}  // namespace llr
