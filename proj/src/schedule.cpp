#include "llr/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace llr {

RateSchedule RateSchedule::sqrt_log() { return RateSchedule(); }

RateSchedule RateSchedule::constant(double c) {
  if (!(c > 0.0)) throw std::invalid_argument("RateSchedule: constant rate must be positive");
  RateSchedule s;
  s.kind_ = Kind::kConstant;
  s.c_ = c;
  return s;
}

RateSchedule RateSchedule::table(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("RateSchedule: empty table");
  for (double v : values)
    if (!(v > 0.0)) throw std::invalid_argument("RateSchedule: table entries must be positive");
  RateSchedule s;
  s.kind_ = Kind::kTable;
  s.table_ = std::move(values);
  return s;
}

double RateSchedule::operator()(long t) const {
  switch (kind_) {
    case Kind::kSqrtLog:
      return rate_f(t);
    case Kind::kConstant:
      return c_;
    case Kind::kTable: {
      const std::size_t i = static_cast<std::size_t>(t);
      return i < table_.size() ? table_[i] : table_.back();
    }
  }
  return 1.0;  // unreachable
}

double rate_f(long t) {
  const double td = static_cast<double>(t);
  return std::sqrt(td + 2.0) * std::log(td + 3.0);
}

PartialSums robbins_monro_partial_sums(const RateSchedule& f, long horizon) {
  PartialSums sums{0.0, 0.0};
  for (long t = 0; t < horizon; ++t) {
    const double inv = 1.0 / f(t);
    sums.sum_inv += inv;
    sums.sum_inv_sq += inv * inv;
  }
  return sums;
}

}  // namespace llr
