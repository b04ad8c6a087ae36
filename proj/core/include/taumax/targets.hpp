#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace taumax {

/// Energy and gradient of a potential at one state.
struct Evaluation {
  double energy = 0.0;
  Eigen::VectorXd gradient;
};

/// A target density rho(q) ∝ exp(-U(q)) described by its potential U and ∇U.
///
/// Targets are immutable after construction; evaluate() is safe to call from
/// several threads at once.
class Target {
 public:
  virtual ~Target() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::string label() const = 0;

  /// Returns U(q) and writes ∇U(q) into `gradient`.
  /// Throws DimensionError if either span has the wrong length.
  double evaluate(std::span<const double> q, std::span<double> gradient) const;

  Evaluation evaluate(const Eigen::VectorXd& q) const;

  double potential(std::span<const double> q) const;

 protected:
  /// Unchecked implementation; spans are already the right length.
  virtual double evaluate_unchecked(std::span<const double> q, std::span<double> gradient) const = 0;
};

/// -U(q): the log density up to its normalising constant.
double log_density_unnormalized(const Target& target, const Eigen::VectorXd& q);

/// U(q) = ½‖q‖².
class StdGaussianTarget final : public Target {
 public:
  explicit StdGaussianTarget(std::size_t dimension);
  std::size_t dimension() const override { return dimension_; }
  std::string label() const override;

 protected:
  double evaluate_unchecked(std::span<const double> q, std::span<double> gradient) const override;

 private:
  std::size_t dimension_;
};

/// Equal-weight mixture of two anisotropic Gaussians forming an L-shaped basin:
///   U(q) = -log( exp(-½(36(q1+1)² + (q2-3)²)) + exp(-½((q1-2)² + 36 q2²)) ).
/// The first component is the vertical leg centred at (-1, 3), the second the
/// horizontal leg centred at (2, 0). Evaluated with log-sum-exp.
class LMixtureTarget final : public Target {
 public:
  std::size_t dimension() const override { return 2; }
  std::string label() const override { return "lmixture"; }

 protected:
  double evaluate_unchecked(std::span<const double> q, std::span<double> gradient) const override;
};

/// Bayesian one-hidden-node regression u(q; x) = q3 tanh(q1 x + q2) + q4 with
///   U(q) = ½β Σ (y_i - u(q; x_i))² + ½α‖q‖².
class OneNodeNNTarget final : public Target {
 public:
  static constexpr double kDefaultBeta = 2.5;
  static constexpr double kDefaultAlpha = 0.8;

  OneNodeNNTarget(std::vector<double> x, std::vector<double> y, double beta = kDefaultBeta,
                  double alpha = kDefaultAlpha);

  std::size_t dimension() const override { return 4; }
  std::string label() const override { return "nn1"; }

  /// The network output at input x.
  static double predict(std::span<const double> q, double x);

  const std::vector<double>& x() const { return x_; }
  const std::vector<double>& y() const { return y_; }

 protected:
  double evaluate_unchecked(std::span<const double> q, std::span<double> gradient) const override;

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  double beta_;
  double alpha_;
};

/// Bayesian logistic regression with Gaussian prior:
///   U(q) = -β Σ (y_i log σ_i + (1 - y_i) log(1 - σ_i)) + ½α‖q‖²,  σ_i = 1/(1 + exp(-qᵀx_i)).
class LogisticTarget final : public Target {
 public:
  static constexpr double kDefaultBeta = 1.0;
  static constexpr double kDefaultAlpha = 0.1;

  /// `features` is n × p (one example per row); `labels` holds 0/1 values.
  LogisticTarget(Eigen::MatrixXd features, Eigen::VectorXd labels, double beta = kDefaultBeta,
                 double alpha = kDefaultAlpha);

  std::size_t dimension() const override { return static_cast<std::size_t>(features_.cols()); }
  std::string label() const override { return "logistic"; }

  static double sigmoid(double z);

  const Eigen::MatrixXd& features() const { return features_; }
  const Eigen::VectorXd& labels() const { return labels_; }
  double beta() const { return beta_; }
  double alpha() const { return alpha_; }

 protected:
  double evaluate_unchecked(std::span<const double> q, std::span<double> gradient) const override;

 private:
  Eigen::MatrixXd features_;
  Eigen::VectorXd labels_;
  double beta_;
  double alpha_;
};

/// A user-supplied potential/gradient pair.
class FunctionTarget final : public Target {
 public:
  using Potential = std::function<double(std::span<const double>)>;
  using Gradient = std::function<void(std::span<const double>, std::span<double>)>;

  FunctionTarget(std::size_t dimension, std::string label, Potential potential, Gradient gradient);

  std::size_t dimension() const override { return dimension_; }
  std::string label() const override { return label_; }

 protected:
  double evaluate_unchecked(std::span<const double> q, std::span<double> gradient) const override;

 private:
  std::size_t dimension_;
  std::string label_;
  Potential potential_;
  Gradient gradient_;
};

}  // namespace taumax
