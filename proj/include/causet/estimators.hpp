#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "causet/frame.hpp"
#include "causet/learners.hpp"

namespace causet {

enum class Estimand { ATE, ATT };

std::string_view to_string(Estimand estimand);

/// Logistic propensity model e(x) = P(t = 1 | z) with scores clipped to
/// [epsilon, 1 - epsilon].
class PropensityModel {
 public:
  /// A model that assigns every unit the same (clipped) score.
  static PropensityModel constant(double score, double epsilon = 0.05);
  /// Known scores read from a numeric column of the scored frame.
  static PropensityModel from_column(std::string column, double epsilon = 0.05);

  /// Scores for every row of `frame`, clipped.
  std::vector<double> scores(const Frame& frame) const;

  double epsilon() const noexcept { return epsilon_; }
  const std::vector<std::string>& covariates() const noexcept { return covariates_; }
  const std::optional<FittedModel>& model() const noexcept { return model_; }

  /// Same model with the arm labels exchanged: scores become 1 - e(x).
  PropensityModel complement() const;

  nlohmann::json to_json() const;

 private:
  friend PropensityModel fit_propensity(const Frame&, const std::string&,
                                        const std::vector<std::string>&, double,
                                        const LearnerSpec&);

  std::optional<FittedModel> model_;
  double constant_ = 0.5;
  double epsilon_ = 0.05;
  bool complemented_ = false;
  std::vector<std::string> covariates_;
  std::optional<std::string> score_column_;
};

/// Throws SingleClassError, KindError, InvalidArgument (epsilon outside [0, 0.5)).
PropensityModel fit_propensity(const Frame& frame, const std::string& treatment,
                               const std::vector<std::string>& adjustment,
                               double epsilon = 0.05,
                               const LearnerSpec& spec = LearnerSpec::logistic());

struct EffectEstimate {
  std::string method;
  Estimand estimand = Estimand::ATE;
  double value = 0.0;
  std::size_t n_treated = 0;
  std::size_t n_control = 0;
  std::vector<std::string> adjustment_set;
  std::optional<std::uint64_t> seed;
  /// mean(y | t = 0); the relative effect is value / control_mean.
  double control_mean = 0.0;
  /// Classical OLS standard error; only regression adjustment reports one.
  std::optional<double> standard_error;

  std::optional<double> relative_effect() const;
  nlohmann::json to_json() const;
};

/// OLS of y on (1, t, z); the effect is the coefficient of t.
EffectEstimate regression_adjustment(const Frame& frame, const std::string& treatment,
                                     const std::string& outcome,
                                     const std::vector<std::string>& adjustment);

/// 1-nearest-neighbour propensity matching with replacement (ATT). Ties go to
/// the lowest row index.
EffectEstimate psm_att(const Frame& frame, const std::string& treatment,
                       const std::string& outcome, const std::vector<std::string>& adjustment,
                       const PropensityModel& propensity);

/// Horvitz-Thompson inverse propensity weighting (ATE).
EffectEstimate ipw_ate(const Frame& frame, const std::string& treatment,
                       const std::string& outcome, const PropensityModel& propensity);

/// Propensity-quantile stratification (ATE). Strata missing an arm are dropped
/// and the remaining strata reweighted by size.
EffectEstimate stratified_ate(const Frame& frame, const std::string& treatment,
                              const std::string& outcome, const PropensityModel& propensity,
                              int strata = 5);

/// Stratum index (0..k-1) per unit for the given scores. Cut points are the
/// order statistics at ranks ceil(j n / k), so equal scores share a stratum.
std::vector<int> propensity_strata(const std::vector<double>& scores, int strata);

}  // namespace causet
