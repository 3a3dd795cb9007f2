#include "causet/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "causet/errors.hpp"

namespace causet {

namespace {
constexpr double kGainTieTolerance = 1e-9;
}  // namespace

namespace {

void check_rows(const Design& x, std::span<const double> y,
                std::optional<std::span<const double>> weights) {
  if (x.rows() != y.size()) {
    throw DimensionMismatch("design has " + std::to_string(x.rows()) + " rows but target has " +
                            std::to_string(y.size()));
  }
  if (y.empty()) throw DimensionMismatch("cannot fit on zero rows");
  if (x.names.size() != x.cols()) throw DimensionMismatch("design names do not match its columns");
  if (weights) {
    if (weights->size() != y.size()) throw DimensionMismatch("weights length differs from target");
    double total = 0.0;
    for (double w : *weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("weights must be finite and >= 0");
      total += w;
    }
    if (!(total > 0.0)) throw InvalidArgument("weights sum to zero");
  }
}

double softplus(double v) {
  return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
}

double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

double log_likelihood(const Eigen::MatrixXd& augmented, const Eigen::VectorXd& beta,
                      std::span<const double> y) {
  const Eigen::VectorXd eta = augmented * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    ll -= y[static_cast<std::size_t>(i)] > 0.5 ? softplus(-eta(i)) : softplus(eta(i));
  }
  return ll;
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd a(x.rows(), x.cols() + 1);
  a.col(0).setOnes();
  a.rightCols(x.cols()) = x;
  return a;
}

nlohmann::json tree_to_json(const RegressionTree& tree) {
  auto nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes) {
    if (n.feature < 0) {
      nodes.push_back({{"value", n.value}});
    } else {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right}});
    }
  }
  return nodes;
}

}  // namespace

Design make_design(const Frame& frame, std::span<const std::string> columns) {
  Design d;
  d.names.assign(columns.begin(), columns.end());
  d.x.resize(static_cast<Eigen::Index>(frame.rows()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const auto values = complete_values(frame, columns[j]);
    for (std::size_t r = 0; r < values.size(); ++r) {
      d.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = values[r];
    }
  }
  return d;
}

std::string_view to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::Linear: return "linear";
    case LearnerKind::Logistic: return "logistic";
    case LearnerKind::Gbt: return "gbt";
  }
  return "linear";
}

LearnerKind parse_learner_kind(std::string_view text) {
  if (text == "linear") return LearnerKind::Linear;
  if (text == "logistic") return LearnerKind::Logistic;
  if (text == "gbt") return LearnerKind::Gbt;
  throw InvalidArgument("unknown learner kind '" + std::string(text) + "'");
}

void LearnerSpec::validate() const {
  if (max_iterations < 1) throw InvalidArgument("max_iterations must be >= 1");
  // A zero learning rate is accepted: it degenerates to the mean predictor.
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw InvalidArgument("learning_rate must be finite and >= 0");
  }
  if (max_depth < 1) throw InvalidArgument("max_depth must be >= 1");
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be > 0");
  if (!(ridge >= 0.0)) throw InvalidArgument("ridge must be >= 0");
}

nlohmann::json LearnerSpec::to_json() const {
  return {{"kind", std::string(to_string(kind))},
          {"max_iterations", max_iterations},
          {"learning_rate", learning_rate},
          {"max_depth", max_depth},
          {"tolerance", tolerance},
          {"ridge", ridge}};
}

LearnerSpec LearnerSpec::from_json(const nlohmann::json& doc) {
  LearnerSpec s;
  if (doc.contains("kind")) s.kind = parse_learner_kind(doc.at("kind").get<std::string>());
  s.max_iterations = doc.value("max_iterations", s.max_iterations);
  s.learning_rate = doc.value("learning_rate", s.learning_rate);
  s.max_depth = doc.value("max_depth", s.max_depth);
  s.tolerance = doc.value("tolerance", s.tolerance);
  s.ridge = doc.value("ridge", s.ridge);
  s.validate();
  return s;
}

Eigen::MatrixXd FittedModel::aligned(const Design& design) const {
  if (design.cols() != features_.size() || design.names.size() != design.cols()) {
    throw DimensionMismatch("model expects " + std::to_string(features_.size()) +
                            " features, design has " + std::to_string(design.cols()));
  }
  std::map<std::string_view, Eigen::Index> position;
  for (std::size_t j = 0; j < design.names.size(); ++j) {
    position.emplace(design.names[j], static_cast<Eigen::Index>(j));
  }
  Eigen::MatrixXd out(design.x.rows(), static_cast<Eigen::Index>(features_.size()));
  for (std::size_t j = 0; j < features_.size(); ++j) {
    const auto it = position.find(features_[j]);
    if (it == position.end()) {
      throw DimensionMismatch("design lacks training feature '" + features_[j] + "'");
    }
    out.col(static_cast<Eigen::Index>(j)) = design.x.col(it->second);
  }
  return out;
}

Eigen::VectorXd FittedModel::predict(const Design& design) const {
  const Eigen::MatrixXd x = aligned(design);
  const auto n = x.rows();
  Eigen::VectorXd out(n);
  switch (spec_.kind) {
    case LearnerKind::Linear:
      out = (x * coefficients_).array() + intercept_;
      break;
    case LearnerKind::Logistic: {
      const Eigen::VectorXd eta = (x * coefficients_).array() + intercept_;
      for (Eigen::Index i = 0; i < n; ++i) out(i) = sigmoid(eta(i));
      break;
    }
    case LearnerKind::Gbt:
      out.setConstant(base_score_);
      for (const auto& tree : trees_) {
        for (Eigen::Index i = 0; i < n; ++i) {
          out(i) += spec_.learning_rate * tree.predict([&](int f) { return x(i, f); });
        }
      }
      break;
  }
  return out;
}

double FittedModel::coefficient(std::string_view feature) const {
  for (std::size_t j = 0; j < features_.size(); ++j) {
    if (features_[j] == feature) return coefficients_(static_cast<Eigen::Index>(j));
  }
  throw UnknownColumn("model has no feature '" + std::string(feature) + "'");
}

nlohmann::json FittedModel::to_json() const {
  nlohmann::json doc{{"spec", spec_.to_json()},
                     {"features", features_},
                     {"iterations", iterations_},
                     {"converged", converged_}};
  if (spec_.kind == LearnerKind::Gbt) {
    auto trees = nlohmann::json::array();
    for (const auto& t : trees_) trees.push_back(tree_to_json(t));
    doc["base_score"] = base_score_;
    doc["trees"] = std::move(trees);
  } else {
    doc["intercept"] = intercept_;
    doc["coefficients"] = std::vector<double>(coefficients_.data(),
                                              coefficients_.data() + coefficients_.size());
  }
  return doc;
}

FittedModel fit_linear(const Design& x, std::span<const double> y,
                       std::optional<std::span<const double>> weights, const LearnerSpec& spec) {
  spec.validate();
  check_rows(x, y, weights);
  const auto n = static_cast<Eigen::Index>(x.rows());
  const auto p = static_cast<Eigen::Index>(x.cols());

  // Augmented least squares: [sqrt(w) [1 X]; sqrt(ridge) [0 I]] beta = [sqrt(w) y; 0].
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + p, p + 1);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sw = weights ? std::sqrt((*weights)[static_cast<std::size_t>(i)]) : 1.0;
    a(i, 0) = sw;
    a.block(i, 1, 1, p) = sw * x.x.row(i);
    b(i) = sw * y[static_cast<std::size_t>(i)];
  }
  const double root_ridge = std::sqrt(spec.ridge);
  for (Eigen::Index j = 0; j < p; ++j) a(n + j, j + 1) = root_ridge;

  const Eigen::VectorXd beta = a.colPivHouseholderQr().solve(b);

  FittedModel m;
  m.spec_ = spec;
  m.spec_.kind = LearnerKind::Linear;
  m.features_ = x.names;
  m.intercept_ = beta(0);
  m.coefficients_ = beta.tail(p);
  m.iterations_ = 1;
  return m;
}

FittedModel fit_logistic(const Design& x, std::span<const double> y, const LearnerSpec& spec) {
  spec.validate();
  check_rows(x, y, std::nullopt);
  std::size_t positives = 0;
  for (double v : y) {
    if (v != 0.0 && v != 1.0) throw InvalidArgument("logistic target must be 0/1");
    positives += v == 1.0;
  }
  if (positives == 0 || positives == y.size()) {
    throw SingleClassError("logistic target has a single class");
  }

  const Eigen::MatrixXd a = with_intercept(x.x);
  const auto k = a.cols();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd target(a.rows());
  for (Eigen::Index i = 0; i < target.size(); ++i) target(i) = y[static_cast<std::size_t>(i)];

  FittedModel m;
  m.spec_ = spec;
  m.spec_.kind = LearnerKind::Logistic;
  m.features_ = x.names;
  m.converged_ = false;

  double ll = log_likelihood(a, beta, y);
  for (int iter = 0; iter < spec.max_iterations; ++iter) {
    const Eigen::VectorXd eta = a * beta;
    Eigen::VectorXd prob(eta.size());
    Eigen::VectorXd w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      prob(i) = sigmoid(eta(i));
      w(i) = prob(i) * (1.0 - prob(i));
    }
    const Eigen::VectorXd gradient = a.transpose() * (target - prob);
    Eigen::MatrixXd hessian = a.transpose() * w.asDiagonal() * a;
    // Jitter keeps the Newton system solvable once separation drives w to 0;
    // it changes the step, not the stationary point.
    const double jitter = 1e-10 * std::max(1.0, hessian.diagonal().maxCoeff());
    hessian.diagonal().array() += jitter;
    const Eigen::VectorXd step = hessian.ldlt().solve(gradient);

    double scale = 1.0;
    Eigen::VectorXd candidate = beta + step;
    double candidate_ll = log_likelihood(a, candidate, y);
    for (int halving = 0; halving < 50 && !(candidate_ll >= ll); ++halving) {
      scale *= 0.5;
      candidate = beta + scale * step;
      candidate_ll = log_likelihood(a, candidate, y);
    }
    ++m.iterations_;
    if (!(candidate_ll >= ll)) {
      // No ascent direction left at working precision.
      m.converged_ = true;
      m.trace_.push_back(ll);
      break;
    }
    beta = candidate;
    ll = candidate_ll;
    m.trace_.push_back(ll);
    if ((scale * step).cwiseAbs().maxCoeff() < spec.tolerance) {
      m.converged_ = true;
      break;
    }
  }

  m.intercept_ = beta(0);
  m.coefficients_ = beta.tail(k - 1);
  return m;
}

FittedModel fit_gbt(const Design& x, std::span<const double> y,
                    std::optional<std::span<const double>> weights, const LearnerSpec& spec) {
  spec.validate();
  check_rows(x, y, weights);
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  std::vector<double> w(n, 1.0);
  if (weights) w.assign(weights->begin(), weights->end());

  double total_w = 0.0;
  double total_wy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total_w += w[i];
    total_wy += w[i] * y[i];
  }

  FittedModel m;
  m.spec_ = spec;
  m.spec_.kind = LearnerKind::Gbt;
  m.features_ = x.names;
  m.base_score_ = total_wy / total_w;

  // Feature-wise row order, computed once; ties keep row order.
  std::vector<std::vector<std::size_t>> order(p, std::vector<std::size_t>(n));
  for (std::size_t f = 0; f < p; ++f) {
    std::iota(order[f].begin(), order[f].end(), std::size_t{0});
    const auto col = x.x.col(static_cast<Eigen::Index>(f));
    std::stable_sort(order[f].begin(), order[f].end(),
                     [&](auto a, auto b) { return col(static_cast<Eigen::Index>(a)) <
                                                  col(static_cast<Eigen::Index>(b)); });
  }

  std::vector<double> pred(n, m.base_score_);
  std::vector<double> residual(n);
  std::vector<int> node_of(n);

  struct Stats {
    double sw = 0.0, swr = 0.0, swrr = 0.0;
    std::size_t count = 0;
  };
  struct Best {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
  };

  for (int round = 0; round < spec.max_iterations; ++round) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = y[i] - pred[i];

    RegressionTree tree;
    tree.nodes.emplace_back();
    std::vector<Stats> stats(1);
    for (std::size_t i = 0; i < n; ++i) {
      stats[0].sw += w[i];
      stats[0].swr += w[i] * residual[i];
      stats[0].swrr += w[i] * residual[i] * residual[i];
      ++stats[0].count;
    }
    std::fill(node_of.begin(), node_of.end(), 0);
    std::vector<int> frontier{0};

    for (int depth = 0; depth < spec.max_depth && !frontier.empty(); ++depth) {
      const auto n_nodes = tree.nodes.size();
      std::vector<char> active(n_nodes, 0);
      for (int nd : frontier) active[static_cast<std::size_t>(nd)] = 1;
      std::vector<Best> best(n_nodes);
      std::vector<double> floor_gain(n_nodes, 0.0);
      for (int nd : frontier) {
        const auto& s = stats[static_cast<std::size_t>(nd)];
        const double sse = std::max(0.0, s.swrr - s.swr * s.swr / s.sw);
        floor_gain[static_cast<std::size_t>(nd)] = 1e-12 * sse;
        best[static_cast<std::size_t>(nd)].gain = 0.0;
      }

      std::vector<Stats> left(n_nodes);
      std::vector<double> last(n_nodes);
      for (std::size_t f = 0; f < p; ++f) {
        for (int nd : frontier) left[static_cast<std::size_t>(nd)] = Stats{};
        const auto col = x.x.col(static_cast<Eigen::Index>(f));
        for (auto i : order[f]) {
          const auto nd = static_cast<std::size_t>(node_of[i]);
          if (!active[nd]) continue;
          const double xv = col(static_cast<Eigen::Index>(i));
          auto& l = left[nd];
          if (l.count > 0 && xv > last[nd]) {
            const auto& s = stats[nd];
            const double wl = l.sw;
            const double wr = s.sw - l.sw;
            if (wl > 0.0 && wr > 0.0) {
              const double sr = s.swr - l.swr;
              const double gain = l.swr * l.swr / wl + sr * sr / wr - s.swr * s.swr / s.sw;
              auto& b = best[nd];
              // Equal partitions reached through different features tie up to rounding;
              // the first candidate in (feature, threshold) order keeps them.
              if (gain > b.gain * (1.0 + kGainTieTolerance) && gain > floor_gain[nd]) {
                double threshold = 0.5 * (last[nd] + xv);
                if (!(threshold > last[nd])) threshold = xv;
                b = {gain, static_cast<int>(f), threshold};
              }
            }
          }
          l.sw += w[i];
          l.swr += w[i] * residual[i];
          ++l.count;
          last[nd] = xv;
        }
      }

      std::vector<int> next;
      for (int nd : frontier) {
        const auto& b = best[static_cast<std::size_t>(nd)];
        if (b.feature < 0) continue;
        const int left_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        auto& node = tree.nodes[static_cast<std::size_t>(nd)];
        node.feature = b.feature;
        node.threshold = b.threshold;
        node.left = left_id;
        node.right = left_id + 1;
        next.push_back(left_id);
        next.push_back(left_id + 1);
      }
      if (next.empty()) break;
      stats.resize(tree.nodes.size());
      for (int c : next) stats[static_cast<std::size_t>(c)] = Stats{};
      for (std::size_t i = 0; i < n; ++i) {
        const auto& node = tree.nodes[static_cast<std::size_t>(node_of[i])];
        if (node.feature < 0 || !active[static_cast<std::size_t>(node_of[i])]) continue;
        const double xv = x.x(static_cast<Eigen::Index>(i), node.feature);
        node_of[i] = xv < node.threshold ? node.left : node.right;
        auto& s = stats[static_cast<std::size_t>(node_of[i])];
        s.sw += w[i];
        s.swr += w[i] * residual[i];
        s.swrr += w[i] * residual[i] * residual[i];
        ++s.count;
      }
      frontier = std::move(next);
    }

    if (tree.nodes.size() == 1) break;  // nothing left to split on

    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      auto& node = tree.nodes[id];
      if (node.feature < 0) node.value = stats[id].swr / stats[id].sw;
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] += spec.learning_rate * tree.nodes[static_cast<std::size_t>(node_of[i])].value;
      const double e = y[i] - pred[i];
      sse += w[i] * e * e;
    }
    m.trace_.push_back(sse / total_w);
    m.trees_.push_back(std::move(tree));
    ++m.iterations_;
  }
  return m;
}

FittedModel fit_regressor(const LearnerSpec& spec, const Design& x, std::span<const double> y,
                          std::optional<std::span<const double>> weights) {
  switch (spec.kind) {
    case LearnerKind::Linear: return fit_linear(x, y, weights, spec);
    case LearnerKind::Gbt: return fit_gbt(x, y, weights, spec);
    case LearnerKind::Logistic:
      if (weights) throw InvalidArgument("logistic learner does not take weights");
      return fit_logistic(x, y, spec);
  }
  throw InvalidArgument("unknown learner kind");
}

}  // namespace causet
