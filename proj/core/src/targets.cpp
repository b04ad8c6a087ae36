#include "taumax/targets.hpp"

#include <cmath>
#include <utility>

#include "taumax/errors.hpp"

namespace taumax {

double Target::evaluate(std::span<const double> q, std::span<double> gradient) const {
  const std::size_t d = dimension();
  if (q.size() != d || gradient.size() != d) {
    throw DimensionError("target '" + label() + "' expects dimension " + std::to_string(d) +
                         ", got " + std::to_string(q.size()));
  }
  return evaluate_unchecked(q, gradient);
}

Evaluation Target::evaluate(const Eigen::VectorXd& q) const {
  Evaluation out;
  out.gradient.resize(q.size());
  out.energy = evaluate(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())),
                        std::span<double>(out.gradient.data(), static_cast<std::size_t>(q.size())));
  return out;
}

double Target::potential(std::span<const double> q) const {
  std::vector<double> scratch(q.size());
  return evaluate(q, scratch);
}

double log_density_unnormalized(const Target& target, const Eigen::VectorXd& q) {
  return -target.evaluate(q).energy;
}

// --- StdGaussianTarget ------------------------------------------------------

StdGaussianTarget::StdGaussianTarget(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw DimensionError("gaussian target needs dimension >= 1");
}

std::string StdGaussianTarget::label() const { return "gaussian" + std::to_string(dimension_) + "d"; }

double StdGaussianTarget::evaluate_unchecked(std::span<const double> q, std::span<double> gradient) const {
  double energy = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    energy += q[i] * q[i];
    gradient[i] = q[i];
  }
  return 0.5 * energy;
}

// --- LMixtureTarget ---------------------------------------------------------

double LMixtureTarget::evaluate_unchecked(std::span<const double> q, std::span<double> gradient) const {
  const double dx1 = q[0] + 1.0, dy1 = q[1] - 3.0;
  const double dx2 = q[0] - 2.0, dy2 = q[1];
  const double a1 = 0.5 * (36.0 * dx1 * dx1 + dy1 * dy1);
  const double a2 = 0.5 * (dx2 * dx2 + 36.0 * dy2 * dy2);

  // U = -log(e^{-a1} + e^{-a2}) = amin - log(1 + e^{-(amax - amin)})
  const double amin = std::min(a1, a2);
  const double e = std::exp(-(std::max(a1, a2) - amin));
  const double energy = amin - std::log1p(e);

  // Responsibilities of the two components.
  const double w_min = 1.0 / (1.0 + e);
  const double w1 = a1 <= a2 ? w_min : 1.0 - w_min;
  const double w2 = 1.0 - w1;
  gradient[0] = w1 * 36.0 * dx1 + w2 * dx2;
  gradient[1] = w1 * dy1 + w2 * 36.0 * dy2;
  return energy;
}

// --- OneNodeNNTarget --------------------------------------------------------

OneNodeNNTarget::OneNodeNNTarget(std::vector<double> x, std::vector<double> y, double beta, double alpha)
    : x_(std::move(x)), y_(std::move(y)), beta_(beta), alpha_(alpha) {
  if (x_.size() != y_.size()) throw DimensionError("nn1 data: x and y lengths differ");
  if (x_.empty()) throw DimensionError("nn1 data: no data points");
}

double OneNodeNNTarget::predict(std::span<const double> q, double x) {
  return q[2] * std::tanh(q[0] * x + q[1]) + q[3];
}

double OneNodeNNTarget::evaluate_unchecked(std::span<const double> q, std::span<double> gradient) const {
  double sse = 0.0;
  double g0 = 0.0, g1 = 0.0, g2 = 0.0, g3 = 0.0;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const double t = std::tanh(q[0] * x_[i] + q[1]);
    const double r = y_[i] - (q[2] * t + q[3]);
    sse += r * r;
    const double dt = q[2] * (1.0 - t * t);  // d u / d(q1 x + q2)
    g0 -= r * dt * x_[i];
    g1 -= r * dt;
    g2 -= r * t;
    g3 -= r;
  }
  const double q2 = q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3];
  gradient[0] = beta_ * g0 + alpha_ * q[0];
  gradient[1] = beta_ * g1 + alpha_ * q[1];
  gradient[2] = beta_ * g2 + alpha_ * q[2];
  gradient[3] = beta_ * g3 + alpha_ * q[3];
  return 0.5 * beta_ * sse + 0.5 * alpha_ * q2;
}

// --- LogisticTarget ---------------------------------------------------------

LogisticTarget::LogisticTarget(Eigen::MatrixXd features, Eigen::VectorXd labels, double beta, double alpha)
    : features_(std::move(features)), labels_(std::move(labels)), beta_(beta), alpha_(alpha) {
  if (features_.rows() != labels_.size()) throw DimensionError("logistic data: row count mismatch");
  if (features_.cols() == 0) throw DimensionError("logistic data: no features");
}

double LogisticTarget::sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double LogisticTarget::evaluate_unchecked(std::span<const double> q, std::span<double> gradient) const {
  const auto p = static_cast<Eigen::Index>(q.size());
  const Eigen::Map<const Eigen::VectorXd> qv(q.data(), p);
  Eigen::Map<Eigen::VectorXd> g(gradient.data(), p);

  const Eigen::VectorXd z = features_ * qv;
  Eigen::VectorXd residual(z.size());
  double nll = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    // -(y log σ + (1-y) log(1-σ)) = softplus(z) - y z
    nll += softplus(z[i]) - labels_[i] * z[i];
    residual[i] = sigmoid(z[i]) - labels_[i];
  }
  g.noalias() = beta_ * (features_.transpose() * residual) + alpha_ * qv;
  return beta_ * nll + 0.5 * alpha_ * qv.squaredNorm();
}

// --- FunctionTarget ---------------------------------------------------------

FunctionTarget::FunctionTarget(std::size_t dimension, std::string label, Potential potential, Gradient gradient)
    : dimension_(dimension), label_(std::move(label)), potential_(std::move(potential)),
      gradient_(std::move(gradient)) {
  if (dimension_ == 0) throw DimensionError("function target needs dimension >= 1");
  if (!potential_ || !gradient_) throw ConfigError("function target needs both potential and gradient");
}

double FunctionTarget::evaluate_unchecked(std::span<const double> q, std::span<double> gradient) const {
  gradient_(q, gradient);
  return potential_(q);
}

}  // namespace taumax
