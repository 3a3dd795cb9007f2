#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "causet/frame.hpp"

namespace causet {

/// Named covariate matrix: one column per feature, one row per unit.
struct Design {
  std::vector<std::string> names;
  Eigen::MatrixXd x;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(x.rows()); }
  std::size_t cols() const noexcept { return static_cast<std::size_t>(x.cols()); }
};

/// Design over the given numeric/binary columns. Throws UnknownColumn,
/// KindError, MissingDataError.
Design make_design(const Frame& frame, std::span<const std::string> columns);

enum class LearnerKind { Linear, Logistic, Gbt };

std::string_view to_string(LearnerKind kind);
LearnerKind parse_learner_kind(std::string_view text);

struct LearnerSpec {
  LearnerKind kind = LearnerKind::Linear;
  int max_iterations = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  double tolerance = 1e-6;
  double ridge = 1e-8;

  static LearnerSpec linear() { return {LearnerKind::Linear}; }
  static LearnerSpec logistic() { return {LearnerKind::Logistic}; }
  static LearnerSpec gbt() { return {LearnerKind::Gbt}; }

  /// Throws InvalidArgument.
  void validate() const;

  nlohmann::json to_json() const;
  static LearnerSpec from_json(const nlohmann::json& doc);

  friend bool operator==(const LearnerSpec&, const LearnerSpec&) = default;
};

/// Depth-limited binary regression tree; a row goes left when
/// x[feature] < threshold.
struct RegressionTree {
  struct Node {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  std::vector<Node> nodes;

  template <typename Row>
  double predict(const Row& row) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
      const auto& n = nodes[static_cast<std::size_t>(i)];
      i = row(n.feature) < n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
  }
};

class FittedModel {
 public:
  const LearnerSpec& spec() const noexcept { return spec_; }
  const std::vector<std::string>& features() const noexcept { return features_; }

  /// Predictions (probabilities for logistic models). Columns are matched by
  /// name; throws DimensionMismatch unless the design carries exactly the
  /// training features.
  Eigen::VectorXd predict(const Design& design) const;

  /// Linear and logistic models.
  double intercept() const noexcept { return intercept_; }
  const Eigen::VectorXd& coefficients() const noexcept { return coefficients_; }
  /// Throws UnknownColumn.
  double coefficient(std::string_view feature) const;

  /// Boosted trees: prediction = base_score + sum(learning_rate * tree(x)).
  double base_score() const noexcept { return base_score_; }
  const std::vector<RegressionTree>& trees() const noexcept { return trees_; }

  /// IRLS iterations or boosting rounds actually performed.
  int iterations() const noexcept { return iterations_; }
  bool converged() const noexcept { return converged_; }
  /// Per-iteration training objective: weighted MSE after each boosting
  /// round, or log-likelihood after each IRLS step.
  const std::vector<double>& training_trace() const noexcept { return trace_; }

  nlohmann::json to_json() const;

 private:
  friend FittedModel fit_linear(const Design&, std::span<const double>,
                                std::optional<std::span<const double>>, const LearnerSpec&);
  friend FittedModel fit_logistic(const Design&, std::span<const double>, const LearnerSpec&);
  friend FittedModel fit_gbt(const Design&, std::span<const double>,
                             std::optional<std::span<const double>>, const LearnerSpec&);

  Eigen::MatrixXd aligned(const Design& design) const;

  LearnerSpec spec_;
  std::vector<std::string> features_;
  double intercept_ = 0.0;
  Eigen::VectorXd coefficients_;
  double base_score_ = 0.0;
  std::vector<RegressionTree> trees_;
  int iterations_ = 0;
  bool converged_ = true;
  std::vector<double> trace_;
};

/// Weighted least squares with intercept; `spec.ridge` penalizes the slopes only.
FittedModel fit_linear(const Design& x, std::span<const double> y,
                       std::optional<std::span<const double>> weights = std::nullopt,
                       const LearnerSpec& spec = LearnerSpec::linear());

/// Logistic regression by iteratively reweighted least squares with step
/// halving. Hitting `max_iterations` is not an error (separable data).
/// Throws SingleClassError, DimensionMismatch, InvalidArgument (non-binary y).
FittedModel fit_logistic(const Design& x, std::span<const double> y,
                         const LearnerSpec& spec = LearnerSpec::logistic());

/// Least-squares gradient boosting with exact greedy regression trees.
FittedModel fit_gbt(const Design& x, std::span<const double> y,
                    std::optional<std::span<const double>> weights = std::nullopt,
                    const LearnerSpec& spec = LearnerSpec::gbt());

/// Dispatches on spec.kind. Logistic fits ignore weights.
FittedModel fit_regressor(const LearnerSpec& spec, const Design& x, std::span<const double> y,
                          std::optional<std::span<const double>> weights = std::nullopt);

}  // namespace causet
