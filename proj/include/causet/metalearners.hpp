#pragma once

#include <optional>
#include <string>
#include <vector>

#include "causet/estimators.hpp"
#include "causet/frame.hpp"
#include "causet/learners.hpp"

namespace causet {

enum class MetaLearner { S, T, X, R };

std::string_view to_string(MetaLearner learner);
MetaLearner parse_metalearner(std::string_view text);

/// Fitted heterogeneous-effect model. `ite` holds per-unit effects on the
/// fitting frame and `ate` is their mean.
class CateModel {
 public:
  MetaLearner learner() const noexcept { return learner_; }
  const LearnerSpec& base() const noexcept { return base_; }
  const std::vector<double>& ite() const noexcept { return ite_; }
  double ate() const noexcept { return ate_; }
  const std::vector<std::string>& covariates() const noexcept { return covariates_; }

  /// Per-unit effects for any frame carrying the covariates (the treatment
  /// column is not needed).
  std::vector<double> predict(const Frame& frame) const;

  /// `row,ite` CSV of the fitting-frame effects.
  std::string ite_csv() const;

  /// Label such as "T-learner/gbt".
  std::string label() const;

 private:
  friend CateModel s_learner(const Frame&, const std::string&, const std::string&,
                             const std::vector<std::string>&, const LearnerSpec&);
  friend CateModel t_learner(const Frame&, const std::string&, const std::string&,
                             const std::vector<std::string>&, const LearnerSpec&);
  friend CateModel x_learner(const Frame&, const std::string&, const std::string&,
                             const std::vector<std::string>&, const LearnerSpec&,
                             const PropensityModel&);
  friend CateModel r_learner(const Frame&, const std::string&, const std::string&,
                             const std::vector<std::string>&, const LearnerSpec&,
                             const PropensityModel&);
  friend CateModel r_learner_from_nuisance(const Design&, const std::vector<double>&,
                                           const std::vector<double>&, const std::vector<double>&,
                                           const std::vector<double>&, const LearnerSpec&);

  std::vector<double> predict_design(const Design& design) const;
  void finish(std::vector<double> ite);

  MetaLearner learner_ = MetaLearner::S;
  LearnerSpec base_;
  std::vector<std::string> covariates_;
  std::string treatment_;
  std::vector<FittedModel> models_;
  std::optional<PropensityModel> propensity_;
  std::vector<double> ite_;
  double ate_ = 0.0;
};

/// One model mu(z, t); ite = mu(z, 1) - mu(z, 0).
CateModel s_learner(const Frame& frame, const std::string& treatment, const std::string& outcome,
                    const std::vector<std::string>& covariates, const LearnerSpec& base);

/// Separate arm models; ite = mu1(z) - mu0(z).
CateModel t_learner(const Frame& frame, const std::string& treatment, const std::string& outcome,
                    const std::vector<std::string>& covariates, const LearnerSpec& base);

/// Cross-imputed effects blended by the propensity:
/// ite = e(z) tau0(z) + (1 - e(z)) tau1(z).
CateModel x_learner(const Frame& frame, const std::string& treatment, const std::string& outcome,
                    const std::vector<std::string>& covariates, const LearnerSpec& base,
                    const PropensityModel& propensity);

/// Residual-on-residual learner: fits m(z) = E[y | z] with `base`, then
/// regresses (y - m) / (t - e) on z with weights (t - e)^2.
CateModel r_learner(const Frame& frame, const std::string& treatment, const std::string& outcome,
                    const std::vector<std::string>& covariates, const LearnerSpec& base,
                    const PropensityModel& propensity);

/// Final R-learner stage given nuisance estimates m(z) and e(z).
CateModel r_learner_from_nuisance(const Design& covariates, const std::vector<double>& t,
                                  const std::vector<double>& y,
                                  const std::vector<double>& outcome_mean,
                                  const std::vector<double>& propensity,
                                  const LearnerSpec& base);

/// Dispatch by learner; S and T ignore `propensity`.
CateModel fit_metalearner(MetaLearner learner, const Frame& frame, const std::string& treatment,
                          const std::string& outcome, const std::vector<std::string>& covariates,
                          const LearnerSpec& base, const PropensityModel& propensity);

}  // namespace causet
