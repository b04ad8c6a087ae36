#include "taumax/observables.hpp"

#include <charconv>

#include "taumax/errors.hpp"
#include "taumax/hermite.hpp"
#include "taumax/targets.hpp"

namespace taumax {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

int parse_index(std::string_view text, std::string_view item) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("bad index in observable '" + std::string(item) + "'");
  }
  return value;
}

std::size_t coordinate(int one_based, std::size_t dimension, std::string_view item) {
  if (one_based < 1 || static_cast<std::size_t>(one_based) > dimension) {
    throw ConfigError("observable '" + std::string(item) + "' refers to a coordinate outside 1.." +
                      std::to_string(dimension));
  }
  return static_cast<std::size_t>(one_based - 1);
}

Observable hermite_combo(std::string name, double s3, double s2, double s1) {
  return {std::move(name), [=](std::span<const double> q) {
            return s3 * hermite_eval(3, q[0]) + s2 * hermite_eval(2, q[0]) + s1 * hermite_eval(1, q[0]);
          }};
}

}  // namespace

std::vector<Observable> coordinate_observables(std::size_t dimension) {
  std::vector<Observable> out;
  for (std::size_t i = 0; i < dimension; ++i) {
    out.push_back({"q" + std::to_string(i + 1), [i](std::span<const double> q) { return q[i]; }});
  }
  return out;
}

std::vector<Observable> gauss1d_observables() {
  return {hermite_combo("u1", 1.0, 1.0, 1.0), hermite_combo("u2", 1.0, -1.0, 1.0),
          hermite_combo("u3", -1.0, 1.0, 1.0)};
}

std::vector<Observable> parse_observables(std::string_view spec, std::size_t dimension,
                                          const ObservableContext& context) {
  std::vector<Observable> out;
  if (trim(spec).empty()) return coordinate_observables(dimension);

  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string_view item = trim(spec.substr(start, comma == std::string_view::npos ? spec.npos : comma - start));
    start = comma == std::string_view::npos ? spec.size() + 1 : comma + 1;
    if (item.empty()) throw ConfigError("empty item in observable list");

    if (item == "coords") {
      for (auto& o : coordinate_observables(dimension)) out.push_back(std::move(o));
    } else if (item.starts_with("gauss1d")) {
      auto all = gauss1d_observables();
      if (item == "gauss1d") {
        for (auto& o : all) out.push_back(std::move(o));
      } else if (item == "gauss1d:u1" || item == "gauss1d:u2" || item == "gauss1d:u3") {
        out.push_back(std::move(all[static_cast<std::size_t>(item.back() - '1')]));
      } else {
        throw ConfigError("unknown observable '" + std::string(item) + "'");
      }
    } else if (item.starts_with("hermite:")) {
      std::string_view rest = item.substr(8);
      std::size_t coord = 0;
      if (const auto at = rest.find('@'); at != std::string_view::npos) {
        std::string_view c = rest.substr(at + 1);
        if (c.starts_with('q')) c.remove_prefix(1);
        coord = coordinate(parse_index(c, item), dimension, item);
        rest = rest.substr(0, at);
      } else {
        coordinate(1, dimension, item);
      }
      const int order = parse_index(rest, item);
      if (order < 0) throw ConfigError("negative Hermite order in '" + std::string(item) + "'");
      out.push_back({std::string(item), [order, coord](std::span<const double> q) { return hermite_eval(order, q[coord]); }});
    } else if (item == "nn:pred") {
      if (!context.nn_x1) throw ConfigError("nn:pred needs the one-node network data");
      if (dimension != 4) throw ConfigError("nn:pred needs a 4-dimensional state");
      const double x1 = *context.nn_x1;
      out.push_back({"nn_pred_x1", [x1](std::span<const double> q) { return OneNodeNNTarget::predict(q, x1); }});
    } else if (item == "logit:pred") {
      if (!context.logistic_x1) throw ConfigError("logit:pred needs the logistic data");
      const Eigen::VectorXd x1 = *context.logistic_x1;
      if (static_cast<std::size_t>(x1.size()) != dimension) throw ConfigError("logit:pred feature size mismatch");
      out.push_back({"logit_pred_x1", [x1](std::span<const double> q) {
                       double z = 0.0;
                       for (std::size_t i = 0; i < q.size(); ++i) z += q[i] * x1(static_cast<Eigen::Index>(i));
                       return LogisticTarget::sigmoid(z);
                     }});
    } else if (item.starts_with('q')) {
      const std::size_t i = coordinate(parse_index(item.substr(1), item), dimension, item);
      out.push_back({std::string(item), [i](std::span<const double> q) { return q[i]; }});
    } else {
      throw ConfigError("unknown observable '" + std::string(item) + "'");
    }
  }
  return out;
}

ObservableSeries evaluate_observables(const RowMatrix& states, std::span<const Observable> observables) {
  if (observables.empty()) throw ConfigError("no observables given");
  const auto n = states.rows();
  const auto d = static_cast<std::size_t>(states.cols());
  RowMatrix values(static_cast<Eigen::Index>(observables.size()), n);
  std::vector<std::string> labels;
  for (const auto& o : observables) labels.push_back(o.name);
  for (Eigen::Index t = 0; t < n; ++t) {
    const std::span<const double> q(states.row(t).data(), d);
    for (std::size_t i = 0; i < observables.size(); ++i) values(static_cast<Eigen::Index>(i), t) = observables[i].eval(q);
  }
  return ObservableSeries(std::move(values), std::move(labels));
}

}  // namespace taumax
