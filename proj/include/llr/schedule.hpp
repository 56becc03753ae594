#pragma once

#include <vector>

namespace llr {

/// Dampening rate f(t) dividing the step size in parameter updates, and
/// mu_t dividing the hyper-updates on log(eta). Values are positive for
/// every t >= 0; t is 0-based.
class RateSchedule {
 public:
  /// sqrt(t+2)*log(t+3), natural log. The default everywhere.
  static RateSchedule sqrt_log();
  /// Fixed rate c > 0. Used by the quadratic stability analysis and tests.
  static RateSchedule constant(double c);
  /// Explicit per-step values; reads past the end clamp to the last entry.
  static RateSchedule table(std::vector<double> values);

  double operator()(long t) const;

 private:
  enum class Kind { kSqrtLog, kConstant, kTable };
  RateSchedule() = default;
  Kind kind_ = Kind::kSqrtLog;
  double c_ = 1.0;
  std::vector<double> table_;
};

/// The default rate sqrt(t+2)*log(t+3).
double rate_f(long t);

struct PartialSums {
  double sum_inv;     // sum_{t<T} 1/f(t)
  double sum_inv_sq;  // sum_{t<T} 1/f(t)^2
};

/// Partial sums entering the Robbins-Monro admissibility conditions:
/// the first should grow without bound, the second should flatten out.
PartialSums robbins_monro_partial_sums(const RateSchedule& f, long horizon);

}  // namespace llr
