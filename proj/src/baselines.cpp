#include "gpattr/baselines.hpp"

#include <cmath>
#include <string>

#include "gpattr/error.hpp"

namespace gpattr {

BaselineMethod parse_baseline_method(std::string_view name) {
  if (name == "last") return BaselineMethod::Last;
  if (name == "first") return BaselineMethod::First;
  if (name == "linear") return BaselineMethod::Linear;
  if (name == "decay") return BaselineMethod::Decay;
  if (name == "u_shaped" || name == "u-shaped") return BaselineMethod::UShaped;
  if (name == "logistic") return BaselineMethod::Logistic;
  if (name == "markov") return BaselineMethod::Markov;
  throw InvalidArgument("unknown baseline method '" + std::string(name) + "'");
}

std::string_view to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::Last: return "last";
    case BaselineMethod::First: return "first";
    case BaselineMethod::Linear: return "linear";
    case BaselineMethod::Decay: return "decay";
    case BaselineMethod::UShaped: return "u_shaped";
    case BaselineMethod::Logistic: return "logistic";
    case BaselineMethod::Markov: return "markov";
  }
  return "linear";
}

std::vector<std::size_t> touchpoints_before(const Path& path, std::size_t target) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < target && i < path.events.size(); ++i)
    if (path.events[i].type != EventCatalog::conversion()) out.push_back(i);
  return out;
}

std::map<std::size_t, double> rule_score(const Path& path, std::size_t target, const BaselineSpec& spec) {
  if (target >= path.events.size()) throw InvalidArgument("conversion position is past the end of the path");
  const auto touches = touchpoints_before(path, target);
  std::map<std::size_t, double> out;
  const std::size_t k = touches.size();
  if (k == 0) return out;
  switch (spec.method) {
    case BaselineMethod::Last: out[touches.back()] = 1.0; break;
    case BaselineMethod::First: out[touches.front()] = 1.0; break;
    case BaselineMethod::Linear:
      for (std::size_t i : touches) out[i] = 1.0 / static_cast<double>(k);
      break;
    case BaselineMethod::Decay: {
      if (!(spec.half_life > 0.0)) throw InvalidArgument("decay half-life must be positive");
      const double t_star = path.events[target].t;
      double total = 0.0;
      for (std::size_t i : touches) total += out[i] = std::exp2(-(t_star - path.events[i].t) / spec.half_life);
      for (auto& [_, w] : out) w /= total;
      break;
    }
    case BaselineMethod::UShaped:
      if (k == 1) {
        out[touches.front()] = 1.0;
      } else if (k == 2) {
        out[touches.front()] = out[touches.back()] = 0.5;
      } else {
        for (std::size_t j = 1; j + 1 < k; ++j) out[touches[j]] = 0.2 / static_cast<double>(k - 2);
        out[touches.front()] = out[touches.back()] = 0.4;
      }
      break;
    default: throw InvalidArgument("rule_score handles rule-based methods only");
  }
  return out;
}

namespace {

double sigmoid(double z) { return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

struct NewtonOutcome {
  Eigen::VectorXd beta;
  bool converged = false;
  bool separated = false;
};

// Damped Newton on the mean negative log-likelihood + (ridge/2)||beta_{1..}||^2.
NewtonOutcome newton_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double ridge) {
  const Eigen::Index n = X.rows(), d = X.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  auto loss = [&](const Eigen::VectorXd& b) {
    const Eigen::VectorXd z = X * b;
    double l = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double zi = z(i);
      const double log1pexp = zi > 0 ? zi + std::log1p(std::exp(-zi)) : std::log1p(std::exp(zi));
      l += log1pexp - y(i) * zi;
    }
    return l * inv_n + 0.5 * ridge * b.tail(d - 1).squaredNorm();
  };

  NewtonOutcome out{Eigen::VectorXd::Zero(d), false, false};
  double current = loss(out.beta);
  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::VectorXd z = X * out.beta;
    Eigen::VectorXd p(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p(i) = sigmoid(z(i));
      w(i) = p(i) * (1.0 - p(i));
    }
    Eigen::VectorXd grad = X.transpose() * (p - y) * inv_n;
    Eigen::MatrixXd hess = X.transpose() * w.asDiagonal() * X * inv_n;
    grad.tail(d - 1) += ridge * out.beta.tail(d - 1);
    hess.diagonal().tail(d - 1).array() += ridge;
    hess.diagonal().array() += 1e-12;
    const Eigen::VectorXd delta = hess.ldlt().solve(grad);
    double step = 1.0;
    Eigen::VectorXd next = out.beta - delta;
    double next_loss = loss(next);
    while (next_loss > current && step > 1e-10) {
      step *= 0.5;
      next = out.beta - step * delta;
      next_loss = loss(next);
    }
    const double change = (next - out.beta).lpNorm<Eigen::Infinity>();
    out.beta = next;
    const double improvement = current - next_loss;
    current = next_loss;
    if (out.beta.lpNorm<Eigen::Infinity>() > 30.0) {
      out.separated = true;
      return out;
    }
    if (change < 1e-10 || (improvement >= 0.0 && improvement < 1e-15)) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace

Eigen::VectorXd LogisticAttribution::counts(const Path& path) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(num_types_);
  for (const Event& ev : path.events)
    if (ev.type != EventCatalog::conversion()) c(ev.type) += 1.0;
  return c;
}

double LogisticAttribution::probability(const Eigen::VectorXd& c) const {
  double z = beta_(0);
  for (Eigen::Index k = 0; k < c.size(); ++k) z += beta_(k + 1) * c(k);
  return sigmoid(z);
}

LogisticAttribution::LogisticAttribution(std::span<const Path> paths, const EventCatalog& catalog)
    : num_types_(catalog.num_types()) {
  std::size_t positives = 0;
  for (const auto& p : paths) positives += p.is_positive() ? 1 : 0;
  if (positives == 0 || positives == paths.size())
    throw InvalidArgument("logistic baseline needs at least one positive and one negative path");

  Eigen::MatrixXd X(static_cast<Eigen::Index>(paths.size()), num_types_ + 1);
  Eigen::VectorXd y(static_cast<Eigen::Index>(paths.size()));
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    X(r, 0) = 1.0;
    X.row(r).tail(num_types_) = counts(paths[i]).transpose();
    y(r) = paths[i].is_positive() ? 1.0 : 0.0;
  }
  // The conversion column is identically zero; pin it with a tiny ridge so the Hessian stays invertible.
  auto fit = newton_logistic(X, y, 0.0);
  if (fit.separated || !fit.converged || !fit.beta.allFinite()) {
    warnings_.push_back("logistic fit did not converge (complete separation?); refitting with L2 strength 1e-4");
    ridge_ = true;
    fit = newton_logistic(X, y, 1e-4);
  }
  beta_ = fit.beta;
  beta_(1 + EventCatalog::conversion()) = 0.0;
}

std::map<std::size_t, double> LogisticAttribution::score(const Path& path, std::size_t target) const {
  const auto touches = touchpoints_before(path, target);
  std::map<std::size_t, double> out;
  if (touches.empty()) return out;
  const Eigen::VectorXd full = counts(path);
  const double p_full = probability(full);
  double total = 0.0;
  for (std::size_t i : touches) {
    Eigen::VectorXd reduced = full;
    reduced(path.events[i].type) -= 1.0;
    total += out[i] = std::max(0.0, p_full - probability(reduced));
  }
  for (auto& [_, s] : out) s = total > 0.0 ? s / total : 0.0;
  return out;
}

Eigen::VectorXd conversion_absorption(const Eigen::MatrixXd& counts, const Eigen::VectorXd& to_conv,
                                      const Eigen::VectorXd& to_null) {
  const Eigen::Index n = counts.rows();
  Eigen::MatrixXd system = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double out = counts.row(i).sum() + to_conv(i) + to_null(i);
    if (out <= 0.0) continue;  // never left: absorbed nowhere useful
    system.row(i) -= counts.row(i) / out;
    rhs(i) = to_conv(i) / out;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) throw DegenerateDesign("absorption system is singular");
  return lu.solve(rhs);
}

MarkovResult markov_removal(std::span<const Path> paths, const EventCatalog& catalog) {
  const int z_count = catalog.num_channels();
  const Eigen::Index n = z_count + 1;  // state 0 = START, 1 + z = channel z
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd to_conv = Eigen::VectorXd::Zero(n), to_null = Eigen::VectorXd::Zero(n);

  for (const auto& path : paths) {
    Eigen::Index state = 0;
    bool converted = false;
    for (const Event& ev : path.events) {
      if (ev.type == EventCatalog::conversion()) {
        converted = true;
        break;
      }
      const auto z = catalog.channel_of(ev.type);
      if (!z) continue;
      const Eigen::Index next = 1 + *z;
      counts(state, next) += 1.0;
      state = next;
    }
    (converted ? to_conv : to_null)(state) += 1.0;
  }

  MarkovResult result;
  result.removal_effect.assign(static_cast<std::size_t>(z_count), 0.0);
  double base = 0.0;
  try {
    base = conversion_absorption(counts, to_conv, to_null)(0);
  } catch (const DegenerateDesign&) {
    base = 0.0;
  }
  result.conversion_probability = base;
  if (!(base > 0.0)) {
    result.warnings.push_back("CONV is unreachable from START; all removal effects are zero");
    return result;
  }
  for (int z = 0; z < z_count; ++z) {
    Eigen::MatrixXd c = counts;
    Eigen::VectorXd conv = to_conv, null = to_null;
    const Eigen::Index s = 1 + z;
    // Redirect every transition into z to NULL; z itself becomes unreachable.
    for (Eigen::Index i = 0; i < n; ++i) {
      null(i) += c(i, s);
      c(i, s) = 0.0;
    }
    c.row(s).setZero();
    conv(s) = 0.0;
    null(s) = 0.0;
    const double off = conversion_absorption(c, conv, null)(0);
    result.removal_effect[static_cast<std::size_t>(z)] = std::clamp(1.0 - off / base, 0.0, 1.0);
  }
  return result;
}

}  // namespace gpattr
