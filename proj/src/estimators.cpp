#include "causet/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "causet/errors.hpp"

namespace causet {

namespace {

struct Arms {
  std::vector<double> t;
  std::vector<double> y;
  std::size_t treated = 0;
  std::size_t control = 0;
  double control_mean = 0.0;
};

Arms load_arms(const Frame& frame, const std::string& treatment, const std::string& outcome) {
  Arms a;
  a.t = binary_values(frame, treatment);
  a.y = complete_values(frame, outcome);
  double control_sum = 0.0;
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    if (a.t[i] == 1.0) {
      ++a.treated;
    } else {
      ++a.control;
      control_sum += a.y[i];
    }
  }
  if (a.treated == 0 || a.control == 0) {
    throw SingleClassError("treatment '" + treatment + "' has only one arm");
  }
  a.control_mean = control_sum / static_cast<double>(a.control);
  return a;
}

double clip(double v, double eps) { return std::clamp(v, eps, 1.0 - eps); }

}  // namespace

std::string_view to_string(Estimand estimand) {
  return estimand == Estimand::ATE ? "ATE" : "ATT";
}

PropensityModel PropensityModel::constant(double score, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw InvalidArgument("epsilon must lie in [0, 0.5)");
  if (!(score >= 0.0 && score <= 1.0)) throw InvalidArgument("propensity score must lie in [0, 1]");
  PropensityModel pm;
  pm.constant_ = score;
  pm.epsilon_ = epsilon;
  return pm;
}

PropensityModel PropensityModel::from_column(std::string column, double epsilon) {
  auto pm = constant(0.5, epsilon);
  pm.score_column_ = std::move(column);
  return pm;
}

std::vector<double> PropensityModel::scores(const Frame& frame) const {
  std::vector<double> out(frame.rows(), constant_);
  if (score_column_) {
    out = complete_values(frame, *score_column_);
    for (double v : out) {
      if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("propensity column '" + *score_column_ + "' leaves [0, 1]");
    }
  } else if (model_) {
    const auto raw = model_->predict(make_design(frame, covariates_));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = raw(static_cast<Eigen::Index>(i));
  }
  for (auto& s : out) s = clip(complemented_ ? 1.0 - s : s, epsilon_);
  return out;
}

PropensityModel PropensityModel::complement() const {
  PropensityModel pm = *this;
  pm.complemented_ = !complemented_;
  return pm;
}

nlohmann::json PropensityModel::to_json() const {
  nlohmann::json doc{{"epsilon", epsilon_}, {"covariates", covariates_},
                     {"complemented", complemented_}};
  if (model_) doc["model"] = model_->to_json();
  else if (score_column_) doc["column"] = *score_column_;
  else doc["constant"] = constant_;
  return doc;
}

PropensityModel fit_propensity(const Frame& frame, const std::string& treatment,
                               const std::vector<std::string>& adjustment, double epsilon,
                               const LearnerSpec& spec) {
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw InvalidArgument("epsilon must lie in [0, 0.5)");
  const auto t = binary_values(frame, treatment);
  PropensityModel pm;
  pm.epsilon_ = epsilon;
  pm.covariates_ = adjustment;
  pm.model_ = fit_logistic(make_design(frame, adjustment), t, spec);
  return pm;
}

std::optional<double> EffectEstimate::relative_effect() const {
  if (control_mean == 0.0 || !std::isfinite(control_mean)) return std::nullopt;
  return value / control_mean;
}

nlohmann::json EffectEstimate::to_json() const {
  nlohmann::json doc{{"method", method},
                     {"estimand", std::string(to_string(estimand))},
                     {"value", value},
                     {"n_treated", n_treated},
                     {"n_control", n_control},
                     {"adjustment_set", adjustment_set},
                     {"control_mean", control_mean}};
  const auto rel = relative_effect();
  doc["relative_effect"] = rel ? nlohmann::json(*rel) : nlohmann::json(nullptr);
  doc["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  if (standard_error) doc["standard_error"] = *standard_error;
  return doc;
}

EffectEstimate regression_adjustment(const Frame& frame, const std::string& treatment,
                                     const std::string& outcome,
                                     const std::vector<std::string>& adjustment) {
  const auto arms = load_arms(frame, treatment, outcome);
  std::vector<std::string> columns{treatment};
  columns.insert(columns.end(), adjustment.begin(), adjustment.end());
  const auto design = make_design(frame, columns);
  const auto model = fit_linear(design, arms.y);

  EffectEstimate est;
  est.method = "regression_adjustment";
  est.estimand = Estimand::ATE;
  est.value = model.coefficients()(0);
  est.n_treated = arms.treated;
  est.n_control = arms.control;
  est.adjustment_set = adjustment;
  est.control_mean = arms.control_mean;

  const auto n = static_cast<Eigen::Index>(design.rows());
  const auto k = static_cast<Eigen::Index>(design.cols()) + 1;
  if (n > k) {
    const Eigen::VectorXd residual =
        Eigen::Map<const Eigen::VectorXd>(arms.y.data(), n) - model.predict(design);
    const double sigma2 = residual.squaredNorm() / static_cast<double>(n - k);
    Eigen::MatrixXd a(n, k);
    a.col(0).setOnes();
    a.rightCols(k - 1) = design.x;
    const Eigen::MatrixXd gram = a.transpose() * a;
    const Eigen::MatrixXd inv = gram.ldlt().solve(Eigen::MatrixXd::Identity(k, k));
    if (inv(1, 1) >= 0.0 && std::isfinite(inv(1, 1))) {
      est.standard_error = std::sqrt(sigma2 * inv(1, 1));
    }
  }
  return est;
}

EffectEstimate psm_att(const Frame& frame, const std::string& treatment,
                       const std::string& outcome, const std::vector<std::string>& adjustment,
                       const PropensityModel& propensity) {
  const auto arms = load_arms(frame, treatment, outcome);
  const auto e = propensity.scores(frame);

  std::vector<std::size_t> controls;
  for (std::size_t i = 0; i < arms.t.size(); ++i) {
    if (arms.t[i] == 0.0) controls.push_back(i);
  }
  std::sort(controls.begin(), controls.end(), [&](auto a, auto b) {
    return e[a] < e[b] || (e[a] == e[b] && a < b);
  });

  // First control (lowest row) in the run of equal scores containing position k.
  auto run_start = [&](std::size_t k) {
    while (k > 0 && e[controls[k - 1]] == e[controls[k]]) --k;
    return controls[k];
  };

  double sum = 0.0;
  for (std::size_t i = 0; i < arms.t.size(); ++i) {
    if (arms.t[i] != 1.0) continue;
    const double s = e[i];
    const auto it = std::lower_bound(controls.begin(), controls.end(), s,
                                     [&](std::size_t c, double v) { return e[c] < v; });
    const auto k = static_cast<std::size_t>(it - controls.begin());
    std::size_t match;
    if (k == controls.size()) {
      match = run_start(k - 1);
    } else if (k == 0) {
      match = controls[0];
    } else {
      const auto right = controls[k];
      const auto left = run_start(k - 1);
      const double d_left = s - e[left];
      const double d_right = e[right] - s;
      if (d_left < d_right) match = left;
      else if (d_right < d_left) match = right;
      else match = std::min(left, right);
    }
    sum += arms.y[i] - arms.y[match];
  }

  EffectEstimate est;
  est.method = "psm";
  est.estimand = Estimand::ATT;
  est.value = sum / static_cast<double>(arms.treated);
  est.n_treated = arms.treated;
  est.n_control = arms.control;
  est.adjustment_set = adjustment;
  est.control_mean = arms.control_mean;
  return est;
}

EffectEstimate ipw_ate(const Frame& frame, const std::string& treatment,
                       const std::string& outcome, const PropensityModel& propensity) {
  const auto arms = load_arms(frame, treatment, outcome);
  const auto e = propensity.scores(frame);
  double treated = 0.0;
  double control = 0.0;
  for (std::size_t i = 0; i < arms.t.size(); ++i) {
    if (arms.t[i] == 1.0) treated += arms.y[i] / e[i];
    else control += arms.y[i] / (1.0 - e[i]);
  }
  const auto n = static_cast<double>(arms.t.size());

  EffectEstimate est;
  est.method = "ipw";
  est.estimand = Estimand::ATE;
  est.value = treated / n - control / n;
  est.n_treated = arms.treated;
  est.n_control = arms.control;
  est.adjustment_set = propensity.covariates();
  est.control_mean = arms.control_mean;
  return est;
}

std::vector<int> propensity_strata(const std::vector<double>& scores, int strata) {
  if (strata < 1) throw InvalidArgument("stratum count must be >= 1");
  const auto n = scores.size();
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> cuts;
  for (int j = 1; j < strata && n > 0; ++j) {
    const auto rank = (static_cast<std::size_t>(j) * n + static_cast<std::size_t>(strata) - 1) /
                      static_cast<std::size_t>(strata);
    cuts.push_back(sorted[std::max<std::size_t>(rank, 1) - 1]);
  }
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<int>(std::count_if(cuts.begin(), cuts.end(),
                                            [&](double c) { return scores[i] > c; }));
  }
  return out;
}

EffectEstimate stratified_ate(const Frame& frame, const std::string& treatment,
                              const std::string& outcome, const PropensityModel& propensity,
                              int strata) {
  const auto arms = load_arms(frame, treatment, outcome);
  const auto stratum = propensity_strata(propensity.scores(frame), strata);

  struct Cell {
    double treated_sum = 0.0, control_sum = 0.0;
    std::size_t treated = 0, control = 0;
  };
  std::vector<Cell> cells(static_cast<std::size_t>(strata));
  for (std::size_t i = 0; i < arms.t.size(); ++i) {
    auto& c = cells[static_cast<std::size_t>(stratum[i])];
    if (arms.t[i] == 1.0) {
      c.treated_sum += arms.y[i];
      ++c.treated;
    } else {
      c.control_sum += arms.y[i];
      ++c.control;
    }
  }
  std::size_t kept = 0;
  for (const auto& c : cells) {
    if (c.treated > 0 && c.control > 0) kept += c.treated + c.control;
  }
  if (kept == 0) throw NoValidStrataError("no propensity stratum contains both arms");
  double effect = 0.0;
  for (const auto& c : cells) {
    if (c.treated == 0 || c.control == 0) continue;
    const double diff = c.treated_sum / static_cast<double>(c.treated) -
                        c.control_sum / static_cast<double>(c.control);
    effect += static_cast<double>(c.treated + c.control) / static_cast<double>(kept) * diff;
  }

  EffectEstimate est;
  est.method = "stratification";
  est.estimand = Estimand::ATE;
  est.value = effect;
  est.n_treated = arms.treated;
  est.n_control = arms.control;
  est.adjustment_set = propensity.covariates();
  est.control_mean = arms.control_mean;
  return est;
}

}  // namespace causet
