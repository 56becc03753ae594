#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace llr {

using Vec = Eigen::VectorXd;

/// Size-1 vector, the parameter type of the one-dimensional models.
inline Vec scalar_vec(double x) { return Vec::Constant(1, x); }

enum class ModelKind { kGaussian, kBernoulli, kRegression, kQuadratic };

std::string model_name(ModelKind kind);
ModelKind model_from_name(const std::string& name);

struct StreamConfig {
  ModelKind kind = ModelKind::kGaussian;
  std::uint64_t seed = 1;
  long horizon = 2500;
  // Generative parameters.
  double gaussian_mean = 5.0;
  double gaussian_stddev = 2.0;
  double bernoulli_p = 0.3;
  int regression_dim = 50;
  double quadratic_alpha = 1.0;
  // Uniform scaling of every l_t; diagnostic knob for invariance tests.
  double loss_scale = 1.0;
};

/// A materialized stream of per-step objectives l_t to be maximised, with
/// closed-form gradients and exact Hessian-vector products.
///
/// Samples are drawn once at construction and held fixed, so replaying a
/// trajectory sees bit-identical data. (kind, parameters, seed, horizon)
/// determines every sample exactly; the generator is mt19937_64 with
/// Box-Muller normals, independent of any library distribution.
class Stream {
 public:
  explicit Stream(const StreamConfig& config);

  /// Fixture stream with prescribed scalar samples (1-d kinds only).
  static Stream with_scalar_samples(ModelKind kind, std::vector<double> samples,
                                    double quadratic_alpha = 1.0);

  const StreamConfig& config() const { return config_; }
  ModelKind kind() const { return config_.kind; }
  long horizon() const { return config_.horizon; }
  int dim() const;

  double loss(long t, const Vec& theta) const;
  Vec grad(long t, const Vec& theta) const;
  std::pair<double, Vec> loss_and_grad(long t, const Vec& theta) const;
  /// Exact d^2 l_t(theta) . v.
  Vec hessian_vec(long t, const Vec& theta, const Vec& v) const;

  /// Scalar payload: Gaussian x_t, Bernoulli bit, quadratic 0.
  double scalar_sample(long t) const;
  /// Regression payloads.
  const Eigen::MatrixXd& regressors() const { return x_; }      // dim x T
  const Vec& targets() const { return y_; }
  const Eigen::MatrixXd& mixing_matrix() const { return mix_; }
  /// First row of the inverse of the mixing matrix: the exact optimum.
  Vec regression_optimum() const;

  /// One row per t; regression rows are the regressor columns then y.
  void export_samples_csv(std::ostream& out) const;

 private:
  Stream() = default;
  void check_dim(const Vec& theta) const;

  StreamConfig config_;
  std::vector<double> scalar_;  // gaussian / bernoulli samples
  Eigen::MatrixXd x_;           // regression inputs, one column per t
  Vec y_;                       // regression targets
  Eigen::MatrixXd mix_;         // regression mixing matrix
};

/// Deterministic stream with l_t(theta) = -alpha*theta^2/2 for every t.
Stream quadratic_stream(double alpha, long horizon = 5000);

struct MlEstimate {
  Vec theta;
  // False while the estimate has no proper maximiser: Bernoulli empirical
  // frequency at 0 or 1 (value is the clamped logit), or a singular
  // regression Gram matrix (value is a ridge solve).
  bool defined = true;
};

/// Running maximum-likelihood baseline, one estimate per step, fitted on
/// samples 0..t inclusive.
class MlPath {
 public:
  explicit MlPath(const Stream& stream);
  const MlEstimate& at(long t) const { return estimates_.at(static_cast<std::size_t>(t)); }
  long size() const { return static_cast<long>(estimates_.size()); }

 private:
  std::vector<MlEstimate> estimates_;
};

/// Convenience single-point version of MlPath.
MlEstimate running_ml(const Stream& stream, long t);

}  // namespace llr
