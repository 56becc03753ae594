#include "llr/models.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "llr/csv.hpp"

namespace llr {
namespace {

constexpr double kLogitClamp = 1e-6;        // clamp on the Bernoulli ML frequency
constexpr double kGramRidgeScale = 1e-10;   // ridge for under-determined Gram solves
constexpr double kGramResidualTol = 1e-8;   // relative residual accepted as a solve
constexpr int kMaxMatrixDraws = 100;
constexpr double kMaxConditionNumber = 1e6;

double uniform01(std::mt19937_64& gen) {
  // 53-bit mantissa in [0,1).
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& gen) {
  // Box-Muller, cosine branch only, so the draw sequence is pinned down
  // by the engine alone.
  const double u1 = 1.0 - uniform01(gen);  // (0,1], keeps the log finite
  const double u2 = uniform01(gen);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return r * std::cos(2.0 * M_PI * u2);
}

double sigmoid(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) {
  // log(1 + e^z) without overflow in either tail.
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

std::string model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::kGaussian: return "gaussian";
    case ModelKind::kBernoulli: return "bernoulli";
    case ModelKind::kRegression: return "regression";
    case ModelKind::kQuadratic: return "quadratic";
  }
  return "unknown";
}

ModelKind model_from_name(const std::string& name) {
  if (name == "gaussian") return ModelKind::kGaussian;
  if (name == "bernoulli") return ModelKind::kBernoulli;
  if (name == "regression") return ModelKind::kRegression;
  if (name == "quadratic") return ModelKind::kQuadratic;
  throw std::invalid_argument("unknown model: " + name);
}

Stream::Stream(const StreamConfig& config) : config_(config) {
  if (config_.horizon < 1) throw std::invalid_argument("Stream: horizon must be >= 1");
  std::mt19937_64 gen(config_.seed);
  const long T = config_.horizon;

  switch (config_.kind) {
    case ModelKind::kGaussian: {
      scalar_.resize(static_cast<std::size_t>(T));
      for (long t = 0; t < T; ++t)
        scalar_[static_cast<std::size_t>(t)] =
            config_.gaussian_mean + config_.gaussian_stddev * standard_normal(gen);
      break;
    }
    case ModelKind::kBernoulli: {
      scalar_.resize(static_cast<std::size_t>(T));
      for (long t = 0; t < T; ++t)
        scalar_[static_cast<std::size_t>(t)] = uniform01(gen) < config_.bernoulli_p ? 1.0 : 0.0;
      break;
    }
    case ModelKind::kRegression: {
      const int n = config_.regression_dim;
      int draws = 0;
      for (;;) {
        if (++draws > kMaxMatrixDraws)
          throw std::runtime_error("Stream: no well-conditioned mixing matrix in 100 draws");
        mix_.resize(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) mix_(i, j) = standard_normal(gen);
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(mix_);
        const double cond =
            svd.singularValues()(0) / svd.singularValues()(n - 1);
        if (std::isfinite(cond) && cond <= kMaxConditionNumber) break;
      }
      x_.resize(n, T);
      y_.resize(T);
      Vec z(n);
      for (long t = 0; t < T; ++t) {
        for (int i = 0; i < n; ++i) z(i) = standard_normal(gen);
        x_.col(t) = mix_ * z;
        y_(t) = z(0);
      }
      break;
    }
    case ModelKind::kQuadratic:
      if (!(config_.quadratic_alpha > 0.0))
        throw std::invalid_argument("Stream: quadratic alpha must be positive");
      break;
  }
}

Stream Stream::with_scalar_samples(ModelKind kind, std::vector<double> samples,
                                   double quadratic_alpha) {
  if (kind == ModelKind::kRegression)
    throw std::invalid_argument("with_scalar_samples: regression is not scalar");
  if (samples.empty()) throw std::invalid_argument("with_scalar_samples: empty");
  Stream s;
  s.config_.kind = kind;
  s.config_.horizon = static_cast<long>(samples.size());
  s.config_.quadratic_alpha = quadratic_alpha;
  s.scalar_ = std::move(samples);
  return s;
}

int Stream::dim() const {
  return config_.kind == ModelKind::kRegression ? config_.regression_dim : 1;
}

void Stream::check_dim(const Vec& theta) const {
  if (theta.size() != dim())
    throw std::invalid_argument("Stream: parameter dimension mismatch");
}

double Stream::loss(long t, const Vec& theta) const {
  check_dim(theta);
  const double s = config_.loss_scale;
  switch (config_.kind) {
    case ModelKind::kGaussian: {
      const double r = scalar_[static_cast<std::size_t>(t)] - theta(0);
      return -0.5 * r * r * s;
    }
    case ModelKind::kBernoulli:
      return (theta(0) * scalar_[static_cast<std::size_t>(t)] - softplus(theta(0))) * s;
    case ModelKind::kRegression: {
      const double r = y_(t) - theta.dot(x_.col(t));
      return -0.5 * r * r * s;
    }
    case ModelKind::kQuadratic:
      return -0.5 * config_.quadratic_alpha * theta(0) * theta(0) * s;
  }
  return 0.0;
}

Vec Stream::grad(long t, const Vec& theta) const {
  check_dim(theta);
  const double s = config_.loss_scale;
  switch (config_.kind) {
    case ModelKind::kGaussian:
      return scalar_vec((scalar_[static_cast<std::size_t>(t)] - theta(0)) * s);
    case ModelKind::kBernoulli:
      return scalar_vec((scalar_[static_cast<std::size_t>(t)] - sigmoid(theta(0))) * s);
    case ModelKind::kRegression: {
      const double r = y_(t) - theta.dot(x_.col(t));
      return (r * s) * x_.col(t);
    }
    case ModelKind::kQuadratic:
      return scalar_vec(-config_.quadratic_alpha * theta(0) * s);
  }
  return Vec();
}

std::pair<double, Vec> Stream::loss_and_grad(long t, const Vec& theta) const {
  return {loss(t, theta), grad(t, theta)};
}

Vec Stream::hessian_vec(long t, const Vec& theta, const Vec& v) const {
  check_dim(theta);
  check_dim(v);
  const double s = config_.loss_scale;
  switch (config_.kind) {
    case ModelKind::kGaussian:
      return scalar_vec(-v(0) * s);
    case ModelKind::kBernoulli: {
      const double p = sigmoid(theta(0));
      return scalar_vec(-p * (1.0 - p) * v(0) * s);
    }
    case ModelKind::kRegression:
      return (-(x_.col(t).dot(v)) * s) * x_.col(t);
    case ModelKind::kQuadratic:
      return scalar_vec(-config_.quadratic_alpha * v(0) * s);
  }
  return Vec();
}

double Stream::scalar_sample(long t) const {
  if (config_.kind == ModelKind::kQuadratic) return 0.0;
  if (config_.kind == ModelKind::kRegression)
    throw std::invalid_argument("scalar_sample: regression samples are vectors");
  return scalar_[static_cast<std::size_t>(t)];
}

Vec Stream::regression_optimum() const {
  if (config_.kind != ModelKind::kRegression)
    throw std::invalid_argument("regression_optimum: not a regression stream");
  Vec e1 = Vec::Zero(config_.regression_dim);
  e1(0) = 1.0;
  return mix_.transpose().partialPivLu().solve(e1);
}

void Stream::export_samples_csv(std::ostream& out) const {
  if (config_.kind == ModelKind::kRegression) {
    out << "t";
    for (int i = 0; i < config_.regression_dim; ++i) out << ",x" << i;
    out << ",y\n";
    for (long t = 0; t < config_.horizon; ++t) {
      out << t;
      for (int i = 0; i < config_.regression_dim; ++i) out << ',' << csv_double(x_(i, t));
      out << ',' << csv_double(y_(t)) << '\n';
    }
    return;
  }
  out << "t,x\n";
  for (long t = 0; t < config_.horizon; ++t)
    out << t << ',' << csv_double(scalar_sample(t)) << '\n';
}

Stream quadratic_stream(double alpha, long horizon) {
  StreamConfig config;
  config.kind = ModelKind::kQuadratic;
  config.quadratic_alpha = alpha;
  config.horizon = horizon;
  return Stream(config);
}

MlPath::MlPath(const Stream& stream) {
  const long T = stream.horizon();
  estimates_.reserve(static_cast<std::size_t>(T));
  switch (stream.kind()) {
    case ModelKind::kGaussian: {
      double sum = 0.0;
      for (long t = 0; t < T; ++t) {
        sum += stream.scalar_sample(t);
        estimates_.push_back({scalar_vec(sum / static_cast<double>(t + 1)), true});
      }
      break;
    }
    case ModelKind::kBernoulli: {
      double ones = 0.0;
      for (long t = 0; t < T; ++t) {
        ones += stream.scalar_sample(t);
        const double freq = ones / static_cast<double>(t + 1);
        const bool defined = freq > 0.0 && freq < 1.0;
        const double clamped = std::min(1.0 - kLogitClamp, std::max(kLogitClamp, freq));
        estimates_.push_back({scalar_vec(logit(clamped)), defined});
      }
      break;
    }
    case ModelKind::kRegression: {
      const int n = stream.dim();
      Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
      Vec rhs = Vec::Zero(n);
      for (long t = 0; t < T; ++t) {
        const auto x = stream.regressors().col(t);
        gram.noalias() += x * x.transpose();
        rhs.noalias() += stream.targets()(t) * x;
        const double ridge = kGramRidgeScale * gram.trace() / n;
        bool defined = false;
        Vec theta;
        if (t + 1 >= n) {
          theta = gram.ldlt().solve(rhs);
          const double resid = (gram * theta - rhs).norm();
          defined = resid <= kGramResidualTol * rhs.norm();
        }
        if (!defined) {
          Eigen::MatrixXd damped = gram;
          damped.diagonal().array() += ridge;
          theta = damped.ldlt().solve(rhs);
        }
        estimates_.push_back({std::move(theta), defined});
      }
      break;
    }
    case ModelKind::kQuadratic:
      // The objective is deterministic with maximiser 0; use it as baseline.
      for (long t = 0; t < T; ++t) estimates_.push_back({scalar_vec(0.0), true});
      break;
  }
}

MlEstimate running_ml(const Stream& stream, long t) {
  if (t < 0 || t >= stream.horizon())
    throw std::invalid_argument("running_ml: t out of range");
  MlPath path(stream);
  return path.at(t);
}

}  // namespace llr
