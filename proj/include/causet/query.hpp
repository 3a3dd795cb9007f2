#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "causet/frame.hpp"
#include "causet/learners.hpp"
#include "causet/metalearners.hpp"
#include "causet/refutation.hpp"

namespace causet {

inline constexpr int kReportSchemaVersion = 1;

struct MetaLearnerChoice {
  MetaLearner learner = MetaLearner::T;
  LearnerKind base = LearnerKind::Gbt;

  std::string label() const;
  friend bool operator==(const MetaLearnerChoice&, const MetaLearnerChoice&) = default;
};

struct RefutationSettings {
  int repetitions = 100;
  double subset_fraction = 0.8;
  double confounder_strength_treatment = 0.1;
  double confounder_strength_outcome = 0.1;
  /// Method the refuters target; defaults to the first selected method.
  std::optional<std::string> target;
};

/// Declarative description of one causal query (JSON document, see README).
struct QuerySpec {
  std::string name;
  std::string context;
  std::string description;
  std::string data;   // CSV path, relative to the spec file
  std::string graph;  // graph path, relative to the spec file
  std::string treatment;
  std::string outcome;
  std::vector<std::string> estimators;  // regression_adjustment, psm, ipw, stratification
  std::vector<MetaLearnerChoice> metalearners;
  std::vector<Refuter> refuters;
  std::uint64_t seed = 0;
  std::vector<LabelRule> label_rules;
  double propensity_clip = 0.05;
  int strata = 5;
  std::size_t max_adjustment_size = 8;
  LearnerSpec linear = LearnerSpec::linear();
  LearnerSpec gbt = LearnerSpec::gbt();
  RefutationSettings refutation;

  /// Directory that relative paths resolve against (not serialized).
  std::string base_dir = ".";

  /// Throws InvalidArgument on unknown keys/values or an empty method set.
  static QuerySpec from_json(const nlohmann::json& doc, std::string base_dir = ".");
  /// Fully resolved document, defaults included.
  nlohmann::json to_json() const;
};

QuerySpec load_query_spec(const std::string& path);

/// Ordered method names a spec selects: estimators, then meta-learner labels.
std::vector<std::string> selected_methods(const QuerySpec& spec);

/// A report document plus sidecar files (name -> contents).
struct RunOutput {
  nlohmann::json report;
  std::map<std::string, std::string> sidecars;
};

/// load -> preprocess -> identify -> estimate -> (optionally) refute.
/// Errors carry the failing module's code with the query name in the message.
RunOutput run_query(const QuerySpec& spec, bool with_refutation = true);

struct ValidationOptions {
  std::size_t n = 10000;
  std::size_t p = 5;
  int repetitions = 10;
  double sigma = 1.0;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  double propensity_clip = 0.05;
  int kl_bins = 50;
  LearnerSpec linear = LearnerSpec::linear();
  LearnerSpec gbt = LearnerSpec::gbt();

  nlohmann::json to_json() const;
};

struct ValidationRow {
  int repetition = 0;
  MetaLearnerChoice combo;
  double train_mse = 0.0;
  double validation_mse = 0.0;
  double train_kld = 0.0;
  double validation_kld = 0.0;
  double train_auuc = 0.0;
  double validation_auuc = 0.0;
  double ate = 0.0;       // mean ITE on the training rows
  double true_ate = 0.0;  // mean tau_true on the training rows
  double ate_error = 0.0;
  double validation_ate = 0.0;
  double validation_true_ate = 0.0;
  double scatter_slope = 0.0;
  double scatter_intercept = 0.0;

  nlohmann::json to_json() const;
};

struct ValidationResult {
  ValidationOptions options;
  std::vector<ValidationRow> rows;
  RunOutput output;

  /// Rows of one repetition for one combination.
  const ValidationRow& row(int repetition, MetaLearnerChoice combo) const;
};

/// The eight learner/base combinations in report order.
std::vector<MetaLearnerChoice> validation_combos();

ValidationResult run_validation(const ValidationOptions& options);

/// One row per (query, method) across reports. Throws SchemaMismatch.
RunOutput compare_reports(const std::vector<nlohmann::json>& reports);

/// Aligned text rendering of a report document.
std::string render_table(const nlohmann::json& report);

/// Writes report.json (pretty, trailing newline) and every sidecar into `dir`.
void write_output(const RunOutput& output, const std::string& dir);

/// Canonical text of a report document (what write_output stores).
std::string dump_report(const nlohmann::json& report);

}  // namespace causet
