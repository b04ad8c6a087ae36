#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "taumax/covariance.hpp"
#include "taumax/samplers.hpp"

namespace taumax {

/// A scalar function of the chain state.
struct Observable {
  std::string name;
  std::function<double(std::span<const double>)> eval;
};

/// Extra data some named observables need.
struct ObservableContext {
  /// Input of the one-node network prediction u(q; x1).
  std::optional<double> nn_x1;
  /// Feature row of the logistic prediction σ(qᵀx1).
  std::optional<Eigen::VectorXd> logistic_x1;
};

/// Parses a comma-separated list. Items:
///   q<i>              coordinate i (1-based)
///   hermite:<i>       H_i(q1)
///   hermite:<i>@<j>   H_i(qj)
///   gauss1d:u1|u2|u3  H3+H2+H1, H3-H2+H1, -H3+H2+H1 of q1; "gauss1d" expands to all three
///   coords            q1..qd
///   nn:pred           u(q; x1) of the one-node network (needs context.nn_x1)
///   logit:pred        σ(qᵀx1) (needs context.logistic_x1)
/// An empty spec means `coords`. Throws ConfigError for unknown items or
/// coordinates beyond `dimension`.
std::vector<Observable> parse_observables(std::string_view spec, std::size_t dimension,
                                          const ObservableContext& context = {});

/// q1..qd
std::vector<Observable> coordinate_observables(std::size_t dimension);

/// The three Hermite combinations of the one-dimensional Gaussian experiment.
std::vector<Observable> gauss1d_observables();

/// Evaluates every observable on every row of `states` (N × d) and centres.
ObservableSeries evaluate_observables(const RowMatrix& states, std::span<const Observable> observables);

}  // namespace taumax
