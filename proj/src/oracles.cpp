#include "llr/oracles.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "llr/csv.hpp"

namespace llr {

namespace {
constexpr long kCertTimeCap = 2000;
constexpr double kRelErrFloor = 1e-12;
}  // namespace

OracleResult replay_T(double eta, const Stream& stream, const RateSchedule& f, long t,
                      const Vec& theta0) {
  if (t > stream.horizon()) throw std::invalid_argument("replay_T: t beyond horizon");
  Vec theta = theta0;
  for (long s = 0; s < t; ++s) {
    const Vec g = stream.grad(s, theta);
    Vec next = theta + (eta / f(s)) * g;
    if (!next.allFinite()) return {std::move(theta), true};
    theta = std::move(next);
  }
  return {std::move(theta), false};
}

ExactAResult exact_A(double eta, const Stream& stream, const RateSchedule& f, long t,
                     const Vec& theta0) {
  if (t > stream.horizon()) throw std::invalid_argument("exact_A: t beyond horizon");
  Vec theta = theta0;
  Vec a = Vec::Zero(theta0.size());
  for (long s = 0; s < t; ++s) {
    const double c = eta / f(s);
    const Vec g = stream.grad(s, theta);
    const Vec hv = stream.hessian_vec(s, theta, a);
    Vec a_next = a + c * g + c * hv;
    Vec theta_next = theta + c * g;
    if (!a_next.allFinite() || !theta_next.allFinite())
      return {std::move(a), std::move(theta), true};
    a = std::move(a_next);
    theta = std::move(theta_next);
  }
  return {std::move(a), std::move(theta), false};
}

OracleResult fd_hypergrad(double eta, const Stream& stream, const RateSchedule& f, long t,
                          double eps, const Vec& theta0) {
  if (!(eps >= 1e-7 && eps <= 1e-3))
    throw std::invalid_argument("fd_hypergrad: eps outside [1e-7, 1e-3]");
  const double log_eta = std::log(eta);
  const OracleResult hi = replay_T(std::exp(log_eta + eps), stream, f, t, theta0);
  const OracleResult lo = replay_T(std::exp(log_eta - eps), stream, f, t, theta0);
  if (hi.diverged || lo.diverged) return {Vec::Zero(theta0.size()), true};
  return {(hi.value - lo.value) / (2.0 * eps), false};
}

OracleResult pathwise_H(std::span<const double> eta_seq, const Stream& stream,
                        const RateSchedule& f, long t, const Vec& theta0, double gamma) {
  if (t > static_cast<long>(eta_seq.size()))
    throw std::invalid_argument("pathwise_H: eta sequence shorter than t");
  if (t > stream.horizon()) throw std::invalid_argument("pathwise_H: t beyond horizon");
  Vec theta = theta0;
  Vec h = Vec::Zero(theta0.size());
  for (long s = 0; s < t; ++s) {
    const double c = eta_seq[static_cast<std::size_t>(s)] / f(s);
    const Vec g = stream.grad(s, theta);
    const Vec hv = stream.hessian_vec(s, theta, h);
    Vec h_next = h + c * g + c * hv;
    if (gamma != 1.0) h_next *= gamma;
    Vec theta_next = theta + c * g;
    if (!h_next.allFinite() || !theta_next.allFinite()) return {std::move(h), true};
    h = std::move(h_next);
    theta = std::move(theta_next);
  }
  return {std::move(h), false};
}

std::vector<CertCell> certify_stream(const Stream& stream, const RateSchedule& f,
                                     const CertGrid& grid, double theta0, bool parallel) {
  std::vector<CertCell> cells;
  for (double eta : grid.etas)
    for (long t : grid.ts) {
      if (t > kCertTimeCap) throw std::invalid_argument("certify_stream: t capped at 2000");
      cells.push_back({stream.kind(), eta, t});
    }
  const long n = static_cast<long>(cells.size());
  const Vec start = Vec::Constant(stream.dim(), theta0);

#ifdef LLR_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (long i = 0; i < n; ++i) {
    CertCell& cell = cells[static_cast<std::size_t>(i)];
    const ExactAResult exact = exact_A(cell.eta, stream, f, cell.t, start);
    const OracleResult fd = fd_hypergrad(cell.eta, stream, f, cell.t, grid.fd_eps, start);
    const std::vector<double> const_seq(static_cast<std::size_t>(cell.t), cell.eta);
    const OracleResult path = pathwise_H(const_seq, stream, f, cell.t, start);
    cell.diverged = exact.diverged || fd.diverged || path.diverged;
    if (cell.diverged) continue;
    cell.norm_a = exact.a.norm();
    cell.rel_err_fd = (exact.a - fd.value).norm() / (kRelErrFloor + cell.norm_a);
    cell.rel_err_pathwise = (exact.a - path.value).norm() / (kRelErrFloor + cell.norm_a);
  }
  return cells;
}

void write_certification_csv(std::ostream& out, const std::vector<CertCell>& cells) {
  out << "model,eta,t,norm_A,rel_err_fd,rel_err_pathwise,diverged\n";
  for (const CertCell& c : cells) {
    out << model_name(c.model) << ',' << csv_double(c.eta) << ',' << c.t << ','
        << csv_double(c.norm_a) << ',' << csv_double(c.rel_err_fd) << ','
        << csv_double(c.rel_err_pathwise) << ',' << (c.diverged ? 1 : 0) << '\n';
  }
}

}  // namespace llr
