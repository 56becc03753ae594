#pragma once

#include <span>
#include <vector>

#include "llr/models.hpp"
#include "llr/schedule.hpp"

namespace llr {

struct OracleResult {
  Vec value;
  bool diverged = false;
};

/// Recompute theta_t from theta0 by t applications of the fixed-eta SG
/// update. O(t) per call; this is the replay cost the online algorithms
/// avoid.
OracleResult replay_T(double eta, const Stream& stream, const RateSchedule& f, long t,
                      const Vec& theta0);

struct ExactAResult {
  Vec a;      // dT_t(eta)/dlog(eta)
  Vec theta;  // T_t(eta), carried alongside
  bool diverged = false;
};

/// The exact derivative of the fixed-eta trajectory with respect to
/// log(eta), via the forward recursion
///   A' = A + (eta/f(t)) grad + (eta/f(t)) Hessian.A,  A_0 = 0.
ExactAResult exact_A(double eta, const Stream& stream, const RateSchedule& f, long t,
                     const Vec& theta0);

/// Central difference of replay_T on log(eta):
///   (T_t(exp(log eta + eps)) - T_t(exp(log eta - eps))) / (2 eps).
/// eps must lie in [1e-7, 1e-3].
OracleResult fd_hypergrad(double eta, const Stream& stream, const RateSchedule& f, long t,
                          double eps, const Vec& theta0);

/// Pathwise derivative of the trajectory along the all-ones direction in
/// log-step-size space, over a realized step-size sequence: eta_seq[s] is
/// the value applied in the s -> s+1 transition. gamma < 1 discounts old
/// coordinates (the memory direction); gamma = 1 is the plain recursion.
OracleResult pathwise_H(std::span<const double> eta_seq, const Stream& stream,
                        const RateSchedule& f, long t, const Vec& theta0,
                        double gamma = 1.0);

struct CertCell {
  ModelKind model;
  double eta;
  long t;
  double norm_a = 0.0;          // |exact_A|
  double rel_err_fd = 0.0;      // |exact_A - fd_hypergrad| / (tiny + |exact_A|)
  double rel_err_pathwise = 0.0;  // same against pathwise_H with constant sequence
  bool diverged = false;
};

struct CertGrid {
  std::vector<double> etas = {1e-3, 1e-1, 1.0};
  std::vector<long> ts = {10, 100, 1000};
  double fd_eps = 1e-5;
};

/// Evaluate every (eta, t) cell of the grid for one stream. theta0 is the
/// replay start (broadcast scalar). Grid times are capped at 2000.
std::vector<CertCell> certify_stream(const Stream& stream, const RateSchedule& f,
                                     const CertGrid& grid, double theta0,
                                     bool parallel = true);

void write_certification_csv(std::ostream& out, const std::vector<CertCell>& cells);

}  // namespace llr
