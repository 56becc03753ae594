#include "llr/adapt.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace llr {

namespace {

bool finite(const Vec& v) { return v.allFinite(); }

Vec discounted(Vec h, double gamma) {
  if (gamma != 1.0) h *= gamma;
  return h;
}

}  // namespace

double LlrState::eta() const { return std::exp(log_eta); }

LlrState llr_init(Vec theta0, double eta0) {
  if (!(eta0 > 0.0)) throw std::invalid_argument("llr_init: eta0 must be positive");
  LlrState s;
  s.h = Vec::Zero(theta0.size());
  s.theta = std::move(theta0);
  s.log_eta = std::log(eta0);
  return s;
}

Vec h_update_hessian_free(const LlrState& state, const Stream& stream,
                          const RateSchedule& f, double eta_next) {
  const double c = eta_next / f(state.t);
  return state.h + c * stream.grad(state.t, state.theta + state.h);
}

Vec h_update_exact(const LlrState& state, const Stream& stream,
                   const RateSchedule& f, double eta_next) {
  const double c = eta_next / f(state.t);
  const Vec g = stream.grad(state.t, state.theta);
  const Vec hv = stream.hessian_vec(state.t, state.theta, state.h);
  return state.h + c * g + c * hv;
}

AgUpdate ag_normalized_increment(double n, double d, double lambda, double mu) {
  AgUpdate out;
  if (!std::isfinite(lambda)) {
    out.n_next = n;
    out.d_next = d;
    out.skipped = true;
    return out;
  }
  const double w = 1.0 / mu;
  out.d_next = (1.0 - w) * d + w;
  const double scale = std::max(n, std::abs(lambda));
  if (scale == 0.0) {
    out.n_next = 0.0;
    out.skipped = true;  // n' == 0: the 0/0 increment is skipped
    return out;
  }
  // Rescaled RMS recursion: algebraically ((1-w)n^2 + w*lambda^2)/d',
  // but safe when lambda^2 would overflow.
  const double a = n / scale;
  const double b = lambda / scale;
  const double n_next = scale * std::sqrt(((1.0 - w) * a * a + w * b * b) / out.d_next);
  if (!std::isfinite(n_next)) {
    out.n_next = n;
    out.d_next = d;
    out.skipped = true;
    return out;
  }
  out.n_next = n_next;
  out.increment = (lambda / n_next) / mu;
  return out;
}

namespace {

Vec next_h(const LlrState& state, const Stream& stream, const RateSchedule& f,
           double eta_next, HessianMode mode, double gamma) {
  Vec h = mode == HessianMode::kExact ? h_update_exact(state, stream, f, eta_next)
                                      : h_update_hessian_free(state, stream, f, eta_next);
  return discounted(std::move(h), gamma);
}

}  // namespace

LlrState sgsg_step(const LlrState& state, const Stream& stream, const RateSchedule& f,
                   const RateSchedule& mu, HessianMode mode, double gamma) {
  if (state.diverged) return state;
  LlrState next = state;
  const Vec g = stream.grad(state.t, state.theta);
  const double lambda = g.dot(state.h);
  next.log_eta = state.log_eta + lambda / mu(state.t);
  const double eta_next = std::exp(next.log_eta);
  next.h = next_h(state, stream, f, eta_next, mode, gamma);
  next.theta = state.theta + (eta_next / f(state.t)) * g;
  next.t = state.t + 1;
  if (!std::isfinite(next.log_eta) || !finite(next.h) || !finite(next.theta)) {
    next = state;
    next.diverged = true;
  }
  return next;
}

LlrState sgag_step(const LlrState& state, const Stream& stream, const RateSchedule& f,
                   const RateSchedule& mu, HessianMode mode, double gamma) {
  if (state.diverged) return state;
  LlrState next = state;
  const double mu_t = mu(state.t);
  const Vec g = stream.grad(state.t, state.theta);
  const double lambda = g.dot(state.h);
  const AgUpdate ag = ag_normalized_increment(state.n, state.d, lambda, mu_t);
  next.n = ag.n_next;
  next.d = ag.d_next;
  next.log_eta = ag.skipped ? state.log_eta : state.log_eta + ag.increment;
  const double eta_next = std::exp(next.log_eta);
  next.h = next_h(state, stream, f, eta_next, mode, gamma);
  next.theta = state.theta + (eta_next / f(state.t)) * g;
  next.t = state.t + 1;
  if (!std::isfinite(next.log_eta) || !finite(next.h) || !finite(next.theta)) {
    next = state;
    next.diverged = true;
  }
  return next;
}

SvrgLlrState svrg_llr_init(Vec theta0, double eta0) {
  if (!(eta0 > 0.0)) throw std::invalid_argument("svrg_llr_init: eta0 must be positive");
  SvrgLlrState s;
  s.theta_base = Vec::Zero(theta0.size());
  s.grad_sum_base = Vec::Zero(theta0.size());
  s.h = Vec::Zero(theta0.size());
  s.theta = std::move(theta0);
  s.eta = eta0;
  return s;
}

SvrgLlrState svrgag_step(const SvrgLlrState& state, const Stream& stream,
                         const RateSchedule& mu, HessianMode mode, long refresh_every) {
  if (state.diverged) return state;
  SvrgLlrState next = state;
  const double mu_t = mu(state.t);
  const Vec g = stream.grad(state.t, state.theta);
  const double lambda = g.dot(state.h);
  const AgUpdate ag = ag_normalized_increment(state.n, state.d, lambda, mu_t);
  next.n = ag.n_next;
  next.d = ag.d_next;
  next.eta = ag.skipped ? state.eta : state.eta * std::exp(ag.increment);

  if (refresh_every > 0 && state.t > 0 && state.t % refresh_every == 0) {
    next.theta_base = state.theta;
    next.grad_sum_base.setZero();
    next.base_samples = 0;
  }
  const Vec g_base = stream.grad(state.t, next.theta_base);
  next.grad_sum_base += g_base;
  next.base_samples += 1;
  const Vec mean_term = next.grad_sum_base / static_cast<double>(next.base_samples);

  if (mode == HessianMode::kExact) {
    next.h = state.h + next.eta * (g + stream.hessian_vec(state.t, state.theta, state.h) -
                                   g_base + mean_term);
  } else {
    next.h = state.h +
             next.eta * (stream.grad(state.t, state.theta + state.h) - g_base + mean_term);
  }
  next.theta = state.theta + next.eta * (g - g_base + mean_term);
  next.t = state.t + 1;
  if (!std::isfinite(next.eta) || !finite(next.h) || !finite(next.theta) ||
      !finite(next.grad_sum_base)) {
    next = state;
    next.diverged = true;
  }
  return next;
}

double gamma_from_tau(double tau) {
  if (!(tau > 0.0)) throw std::domain_error("gamma_from_tau: tau must be positive");
  return std::exp(-1.0 / tau);
}

MemoryState memory_init(int dim, double tau) {
  return MemoryState{Vec::Zero(dim), gamma_from_tau(tau), tau};
}

Vec memory_h_update(const MemoryState& mem, const LlrState& state, const Stream& stream,
                    const RateSchedule& f, double eta_next, HessianMode mode) {
  LlrState at = state;
  at.h = mem.h;
  Vec h = mode == HessianMode::kExact ? h_update_exact(at, stream, f, eta_next)
                                      : h_update_hessian_free(at, stream, f, eta_next);
  return discounted(std::move(h), mem.gamma);
}

GenUpdateMap sg_update_map(const Stream& stream, const RateSchedule& f, HessianMode mode) {
  GenUpdateMap map;
  map.apply = [&stream, f](long t, const Vec& theta, double eta) {
    return Vec(theta + (eta / f(t)) * stream.grad(t, theta));
  };
  if (mode == HessianMode::kExact) {
    map.partial_theta = [&stream, f](long t, const Vec& theta, double eta, const Vec& v) {
      return Vec(v + (eta / f(t)) * stream.hessian_vec(t, theta, v));
    };
    map.partial_eta = [&stream, f](long t, const Vec& theta, double /*eta*/) {
      return Vec((1.0 / f(t)) * stream.grad(t, theta));
    };
  }
  return map;
}

GenState gen_init(Vec theta0, double eta0) {
  if (!(eta0 > 0.0)) throw std::invalid_argument("gen_init: eta0 must be positive");
  GenState s;
  s.h = Vec::Zero(theta0.size());
  s.theta = std::move(theta0);
  s.eta = eta0;
  return s;
}

GenState gensg_step(const GenState& state, const GenUpdateMap& map, const Stream& stream) {
  if (state.diverged) return state;
  GenState next = state;
  const Vec g = stream.grad(state.t, state.theta);
  const double lambda = g.dot(state.h);
  const double alpha = map.hyper_rate ? map.hyper_rate(state.t) : 1.0 / rate_f(state.t);
  next.eta = map.ascend_log_eta ? state.eta * std::exp(alpha * lambda)
                                : state.eta + alpha * lambda;

  // Partials of F are taken at the fresh hyperparameter: that is the value
  // the t -> t+1 transition actually applies.
  Vec dtheta_h;
  if (map.partial_theta) {
    dtheta_h = map.partial_theta(state.t, state.theta, next.eta, state.h);
  } else {
    const double step = map.fd_epsilon / std::max(1.0, state.h.norm());
    dtheta_h = (map.apply(state.t, state.theta + step * state.h, next.eta) -
                map.apply(state.t, state.theta - step * state.h, next.eta)) /
               (2.0 * step);
  }
  Vec deta;
  if (map.partial_eta) {
    deta = map.partial_eta(state.t, state.theta, next.eta);
  } else {
    const double step = map.fd_epsilon * std::max(1.0, std::abs(next.eta));
    deta = (map.apply(state.t, state.theta, next.eta + step) -
            map.apply(state.t, state.theta, next.eta - step)) /
           (2.0 * step);
  }
  const double direction = map.ascend_log_eta ? next.eta : 1.0;
  next.h = dtheta_h + direction * deta;
  next.theta = map.apply(state.t, state.theta, next.eta);
  next.t = state.t + 1;
  if (!std::isfinite(next.eta) || !finite(next.h) || !finite(next.theta)) {
    next = state;
    next.diverged = true;
  }
  return next;
}

}  // namespace llr
