#include "causet/metalearners.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "causet/errors.hpp"

namespace causet {

namespace {

struct ArmData {
  Design design;
  std::vector<double> t;
  std::vector<double> y;
  std::vector<std::size_t> treated;
  std::vector<std::size_t> control;
};

ArmData load(const Frame& frame, const std::string& treatment, const std::string& outcome,
             const std::vector<std::string>& covariates) {
  if (std::find(covariates.begin(), covariates.end(), treatment) != covariates.end()) {
    throw InvalidArgument("treatment '" + treatment + "' listed among the covariates");
  }
  ArmData d;
  d.t = binary_values(frame, treatment);
  d.y = complete_values(frame, outcome);
  d.design = make_design(frame, covariates);
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    (d.t[i] == 1.0 ? d.treated : d.control).push_back(i);
  }
  if (d.treated.empty() || d.control.empty()) {
    throw SingleClassError("treatment '" + treatment + "' has only one arm");
  }
  return d;
}

Design rows_of(const Design& d, const std::vector<std::size_t>& rows) {
  Design out;
  out.names = d.names;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), d.x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = d.x.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

std::vector<double> values_of(const std::vector<double>& v, const std::vector<std::size_t>& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(v[r]);
  return out;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Design with_treatment(const Design& covariates, const std::string& treatment, double value) {
  Design out;
  out.names = covariates.names;
  out.names.push_back(treatment);
  out.x.resize(covariates.x.rows(), covariates.x.cols() + 1);
  out.x.leftCols(covariates.x.cols()) = covariates.x;
  out.x.col(covariates.x.cols()).setConstant(value);
  return out;
}

}  // namespace

std::string_view to_string(MetaLearner learner) {
  switch (learner) {
    case MetaLearner::S: return "S";
    case MetaLearner::T: return "T";
    case MetaLearner::X: return "X";
    case MetaLearner::R: return "R";
  }
  return "S";
}

MetaLearner parse_metalearner(std::string_view text) {
  if (text == "S") return MetaLearner::S;
  if (text == "T") return MetaLearner::T;
  if (text == "X") return MetaLearner::X;
  if (text == "R") return MetaLearner::R;
  throw InvalidArgument("unknown meta-learner '" + std::string(text) + "'");
}

void CateModel::finish(std::vector<double> ite) {
  ite_ = std::move(ite);
  ate_ = ite_.empty() ? 0.0
                      : std::accumulate(ite_.begin(), ite_.end(), 0.0) /
                            static_cast<double>(ite_.size());
}

std::string CateModel::label() const {
  return std::string(to_string(learner_)) + "-learner/" + std::string(to_string(base_.kind));
}

std::vector<double> CateModel::predict_design(const Design& design) const {
  switch (learner_) {
    case MetaLearner::S: {
      const auto on = models_[0].predict(with_treatment(design, treatment_, 1.0));
      const auto off = models_[0].predict(with_treatment(design, treatment_, 0.0));
      return to_vector(on - off);
    }
    case MetaLearner::T:
      return to_vector(models_[1].predict(design) - models_[0].predict(design));
    case MetaLearner::R:
      return to_vector(models_[0].predict(design));
    case MetaLearner::X:
      break;
  }
  throw InvalidArgument("X-learner predictions need the propensity covariates");
}

std::vector<double> CateModel::predict(const Frame& frame) const {
  const auto design = make_design(frame, covariates_);
  if (learner_ != MetaLearner::X) return predict_design(design);
  const auto e = propensity_->scores(frame);
  const auto tau0 = models_[0].predict(design);
  const auto tau1 = models_[1].predict(design);
  std::vector<double> out(e.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    out[i] = e[i] * tau0(k) + (1.0 - e[i]) * tau1(k);
  }
  return out;
}

std::string CateModel::ite_csv() const {
  std::ostringstream out;
  out << "row,ite\n";
  for (std::size_t i = 0; i < ite_.size(); ++i) out << i << ',' << format_number(ite_[i]) << '\n';
  return out.str();
}

CateModel s_learner(const Frame& frame, const std::string& treatment, const std::string& outcome,
                    const std::vector<std::string>& covariates, const LearnerSpec& base) {
  const auto d = load(frame, treatment, outcome, covariates);
  Design full = with_treatment(d.design, treatment, 0.0);
  full.x.col(full.x.cols() - 1) = Eigen::Map<const Eigen::VectorXd>(d.t.data(),
                                                                     static_cast<Eigen::Index>(d.t.size()));
  CateModel m;
  m.learner_ = MetaLearner::S;
  m.base_ = base;
  m.covariates_ = covariates;
  m.treatment_ = treatment;
  m.models_.push_back(fit_regressor(base, full, d.y));
  m.finish(m.predict_design(d.design));
  return m;
}

CateModel t_learner(const Frame& frame, const std::string& treatment, const std::string& outcome,
                    const std::vector<std::string>& covariates, const LearnerSpec& base) {
  const auto d = load(frame, treatment, outcome, covariates);
  CateModel m;
  m.learner_ = MetaLearner::T;
  m.base_ = base;
  m.covariates_ = covariates;
  m.treatment_ = treatment;
  m.models_.push_back(fit_regressor(base, rows_of(d.design, d.control), values_of(d.y, d.control)));
  m.models_.push_back(fit_regressor(base, rows_of(d.design, d.treated), values_of(d.y, d.treated)));
  m.finish(m.predict_design(d.design));
  return m;
}

CateModel x_learner(const Frame& frame, const std::string& treatment, const std::string& outcome,
                    const std::vector<std::string>& covariates, const LearnerSpec& base,
                    const PropensityModel& propensity) {
  const auto d = load(frame, treatment, outcome, covariates);
  const auto treated_x = rows_of(d.design, d.treated);
  const auto control_x = rows_of(d.design, d.control);
  const auto treated_y = values_of(d.y, d.treated);
  const auto control_y = values_of(d.y, d.control);

  const auto mu0 = fit_regressor(base, control_x, control_y);
  const auto mu1 = fit_regressor(base, treated_x, treated_y);

  // Imputed individual effects in each arm.
  const auto mu0_on_treated = mu0.predict(treated_x);
  const auto mu1_on_control = mu1.predict(control_x);
  std::vector<double> d1(treated_y.size());
  std::vector<double> d0(control_y.size());
  for (std::size_t i = 0; i < d1.size(); ++i) d1[i] = treated_y[i] - mu0_on_treated(static_cast<Eigen::Index>(i));
  for (std::size_t i = 0; i < d0.size(); ++i) d0[i] = mu1_on_control(static_cast<Eigen::Index>(i)) - control_y[i];

  CateModel m;
  m.learner_ = MetaLearner::X;
  m.base_ = base;
  m.covariates_ = covariates;
  m.treatment_ = treatment;
  m.models_.push_back(fit_regressor(base, control_x, d0));
  m.models_.push_back(fit_regressor(base, treated_x, d1));
  m.propensity_ = propensity;
  m.finish(m.predict(frame));
  return m;
}

CateModel r_learner_from_nuisance(const Design& covariates, const std::vector<double>& t,
                                  const std::vector<double>& y,
                                  const std::vector<double>& outcome_mean,
                                  const std::vector<double>& propensity,
                                  const LearnerSpec& base) {
  const auto n = covariates.rows();
  if (t.size() != n || y.size() != n || outcome_mean.size() != n || propensity.size() != n) {
    throw DimensionMismatch("R-learner inputs differ in length");
  }
  std::vector<double> pseudo(n);
  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t_res = t[i] - propensity[i];
    if (t_res == 0.0) throw InvalidArgument("treatment residual is zero; clip the propensity");
    pseudo[i] = (y[i] - outcome_mean[i]) / t_res;
    weight[i] = t_res * t_res;
  }
  CateModel m;
  m.learner_ = MetaLearner::R;
  m.base_ = base;
  m.covariates_ = covariates.names;
  m.models_.push_back(fit_regressor(base, covariates, pseudo, std::span<const double>(weight)));
  m.finish(m.predict_design(covariates));
  return m;
}

CateModel r_learner(const Frame& frame, const std::string& treatment, const std::string& outcome,
                    const std::vector<std::string>& covariates, const LearnerSpec& base,
                    const PropensityModel& propensity) {
  const auto d = load(frame, treatment, outcome, covariates);
  const auto outcome_model = fit_regressor(base, d.design, d.y);
  auto m = r_learner_from_nuisance(d.design, d.t, d.y, to_vector(outcome_model.predict(d.design)),
                                   propensity.scores(frame), base);
  m.treatment_ = treatment;
  m.propensity_ = propensity;
  m.models_.push_back(outcome_model);
  return m;
}

CateModel fit_metalearner(MetaLearner learner, const Frame& frame, const std::string& treatment,
                          const std::string& outcome, const std::vector<std::string>& covariates,
                          const LearnerSpec& base, const PropensityModel& propensity) {
  switch (learner) {
    case MetaLearner::S: return s_learner(frame, treatment, outcome, covariates, base);
    case MetaLearner::T: return t_learner(frame, treatment, outcome, covariates, base);
    case MetaLearner::X: return x_learner(frame, treatment, outcome, covariates, base, propensity);
    case MetaLearner::R: return r_learner(frame, treatment, outcome, covariates, base, propensity);
  }
  throw InvalidArgument("unknown meta-learner");
}

}  // namespace causet
