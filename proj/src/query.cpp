#include "causet/query.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "causet/errors.hpp"
#include "causet/estimators.hpp"
#include "causet/evaluation.hpp"
#include "causet/graph.hpp"
#include "causet/rng.hpp"
#include "causet/synth.hpp"

namespace causet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kEstimatorNames{"regression_adjustment", "psm", "ipw",
                                               "stratification"};

// Fixed stream ids so adding a refuter never shifts another one's draws.
std::uint64_t refuter_stream(Refuter r) {
  return 1000 + static_cast<std::uint64_t>(r);
}

void reject_unknown_keys(const json& doc, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.contains(key)) throw InvalidArgument("unknown key '" + key + "' in " + where);
  }
}

MetaLearnerChoice parse_choice(const json& item) {
  MetaLearnerChoice c;
  std::string learner, base;
  if (item.is_string()) {
    const auto text = item.get<std::string>();
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw InvalidArgument("meta-learner '" + text + "' must be LEARNER:BASE");
    learner = text.substr(0, colon);
    base = text.substr(colon + 1);
  } else {
    reject_unknown_keys(item, {"learner", "base"}, "metalearners entry");
    learner = item.at("learner").get<std::string>();
    base = item.at("base").get<std::string>();
  }
  c.learner = parse_metalearner(learner);
  c.base = parse_learner_kind(base);
  if (c.base == LearnerKind::Logistic) throw InvalidArgument("meta-learner base must be linear or gbt");
  return c;
}

std::string comparator_name(Comparator c) {
  return c == Comparator::AboveMean ? "above_mean" : "below_mean";
}

std::string fixed(double v, int digits = 4) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string json_number(const json& v, int digits = 4) {
  return v.is_number() ? fixed(v.get<double>(), digits) : std::string("-");
}

/// Left-aligned text table.
std::string align(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    if (width.size() < r.size()) width.resize(r.size(), 0);
    for (std::size_t j = 0; j < r.size(); ++j) width[j] = std::max(width[j], r[j].size());
  }
  std::string out;
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t j = 0; j < r.size(); ++j) {
      line += r[j];
      if (j + 1 < r.size()) line += std::string(width[j] - r[j].size() + 2, ' ');
    }
    out += line + '\n';
  }
  return out;
}

std::string file_stem(const MetaLearnerChoice& c) {
  return std::string(to_string(c.learner)) + "_" + std::string(to_string(c.base));
}

struct Prepared {
  Frame frame;
  json preprocessing;
  std::vector<std::string> warnings;
};

Prepared prepare_frame(const QuerySpec& spec, Frame frame) {
  Prepared p;
  json one_hot_cols = json::array();
  json imputed = json::array();
  for (const auto& name : frame.names()) {
    if (frame.column(name).kind == ColumnKind::Categorical && name != spec.treatment &&
        name != spec.outcome) {
      frame = one_hot(frame, name);
      one_hot_cols.push_back(name);
    }
  }
  for (const auto& name : frame.names()) {
    const auto& c = frame.column(name);
    if (c.kind == ColumnKind::Categorical || !c.has_missing()) continue;
    auto result = impute_mean(frame, name);
    if (result.all_missing) p.warnings.push_back("column '" + name + "' was entirely missing; filled with 0");
    frame = std::move(result.frame);
    imputed.push_back(name);
  }
  json labels = json::array();
  for (const auto& rule : spec.label_rules) {
    frame = derive_binary_label(frame, rule);
    labels.push_back(rule.target);
  }
  p.frame = std::move(frame);
  p.preprocessing = {{"one_hot", one_hot_cols}, {"imputed", imputed}, {"labels", labels}};
  return p;
}

CausalGraph with_query_roles(const CausalGraph& g, const QuerySpec& spec) {
  const auto t = g.treatment();
  const auto y = g.outcome();
  if (t && *t != spec.treatment) {
    throw RoleError("graph treatment '" + *t + "' differs from query treatment '" + spec.treatment + "'");
  }
  if (y && *y != spec.outcome) {
    throw RoleError("graph outcome '" + *y + "' differs from query outcome '" + spec.outcome + "'");
  }
  if (t && y) return g;
  auto nodes = g.nodes();
  g.index(spec.treatment);
  g.index(spec.outcome);
  for (auto& n : nodes) {
    if (n.name == spec.treatment) n.role = NodeRole::Treatment;
    if (n.name == spec.outcome) n.role = NodeRole::Outcome;
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& [f, to] : g.edges()) edges.emplace_back(g.name(f), g.name(to));
  return CausalGraph(std::move(nodes), std::move(edges));
}

std::vector<std::string> expand_to_columns(const Frame& frame, const NodeSet& nodes) {
  std::vector<std::string> cols;
  for (const auto& node : nodes) {
    if (frame.has(node)) {
      cols.push_back(node);
      continue;
    }
    bool found = false;
    for (const auto& name : frame.names()) {
      if (name.starts_with(node + "=")) {
        cols.push_back(name);
        found = true;
      }
    }
    if (!found) throw UnknownColumn("graph node '" + node + "' has no column in the data");
  }
  return cols;
}

/// Estimation procedure for a method name, re-runnable on perturbed frames.
Estimator make_estimator(const QuerySpec& spec, const std::string& method) {
  if (method == "regression_adjustment") {
    return [](const Frame& f, const EstimationTask& t) {
      return regression_adjustment(f, t.treatment, t.outcome, t.adjustment).value;
    };
  }
  if (method == "psm" || method == "ipw" || method == "stratification") {
    return [method, clip = spec.propensity_clip, strata = spec.strata](const Frame& f,
                                                                       const EstimationTask& t) {
      const auto pm = fit_propensity(f, t.treatment, t.adjustment, clip);
      if (method == "psm") return psm_att(f, t.treatment, t.outcome, t.adjustment, pm).value;
      if (method == "ipw") return ipw_ate(f, t.treatment, t.outcome, pm).value;
      return stratified_ate(f, t.treatment, t.outcome, pm, strata).value;
    };
  }
  for (const auto& c : spec.metalearners) {
    if (c.label() != method) continue;
    const auto base = c.base == LearnerKind::Gbt ? spec.gbt : spec.linear;
    return [c, base, clip = spec.propensity_clip](const Frame& f, const EstimationTask& t) {
      const bool needs_pm = c.learner == MetaLearner::X || c.learner == MetaLearner::R;
      const auto pm = needs_pm ? fit_propensity(f, t.treatment, t.adjustment, clip)
                               : PropensityModel::constant(0.5, clip);
      return fit_metalearner(c.learner, f, t.treatment, t.outcome, t.adjustment, base, pm).ate();
    };
  }
  throw InvalidArgument("refutation target '" + method + "' is not a selected method");
}

json aggregate_block(const std::vector<ValidationRow>& rows) {
  json out = json::array();
  for (const auto& combo : validation_combos()) {
    std::map<std::string, std::vector<double>> metrics;
    for (const auto& r : rows) {
      if (!(r.combo == combo)) continue;
      const auto doc = r.to_json();
      for (const auto& [key, value] : doc.items()) {
        if (value.is_number_float()) metrics[key].push_back(value.get<double>());
      }
    }
    json means, sds;
    for (const auto& [key, values] : metrics) {
      means[key] = mean(values);
      sds[key] = standard_deviation(values);
    }
    out.push_back({{"learner", std::string(to_string(combo.learner))},
                   {"base", std::string(to_string(combo.base))},
                   {"mean", means},
                   {"sd", sds}});
  }
  return out;
}

}  // namespace

std::string MetaLearnerChoice::label() const {
  return std::string(to_string(learner)) + "-learner/" + std::string(to_string(base));
}

QuerySpec QuerySpec::from_json(const json& doc, std::string base_dir) {
  reject_unknown_keys(doc,
                      {"name", "context", "description", "data", "graph", "treatment", "outcome",
                       "estimators", "metalearners", "refuters", "seed", "label_rules",
                       "propensity_clip", "strata", "max_adjustment_size", "learners", "refutation"},
                      "query spec");
  QuerySpec s;
  s.base_dir = std::move(base_dir);
  try {
    s.name = doc.value("name", std::string("query"));
    s.context = doc.value("context", std::string());
    s.description = doc.value("description", std::string());
    s.data = doc.at("data").get<std::string>();
    s.graph = doc.at("graph").get<std::string>();
    s.treatment = doc.at("treatment").get<std::string>();
    s.outcome = doc.at("outcome").get<std::string>();
    for (const auto& e : doc.value("estimators", json::array())) {
      const auto name = e.get<std::string>();
      if (std::find(kEstimatorNames.begin(), kEstimatorNames.end(), name) == kEstimatorNames.end()) {
        throw InvalidArgument("unknown estimator '" + name + "'");
      }
      s.estimators.push_back(name);
    }
    for (const auto& m : doc.value("metalearners", json::array())) s.metalearners.push_back(parse_choice(m));
    for (const auto& r : doc.value("refuters", json::array())) {
      s.refuters.push_back(parse_refuter(r.get<std::string>()));
    }
    s.seed = doc.value("seed", std::uint64_t{0});
    for (const auto& r : doc.value("label_rules", json::array())) {
      reject_unknown_keys(r, {"source", "target", "comparator"}, "label rule");
      LabelRule rule;
      rule.source = r.at("source").get<std::string>();
      rule.target = r.at("target").get<std::string>();
      const auto cmp = r.value("comparator", std::string("above_mean"));
      if (cmp == "above_mean") rule.comparator = Comparator::AboveMean;
      else if (cmp == "below_mean") rule.comparator = Comparator::BelowMean;
      else throw InvalidArgument("unknown comparator '" + cmp + "'");
      s.label_rules.push_back(rule);
    }
    s.propensity_clip = doc.value("propensity_clip", s.propensity_clip);
    s.strata = doc.value("strata", s.strata);
    s.max_adjustment_size = doc.value("max_adjustment_size", s.max_adjustment_size);
    if (doc.contains("learners")) {
      const auto& l = doc.at("learners");
      reject_unknown_keys(l, {"linear", "gbt"}, "learners");
      if (l.contains("linear")) {
        auto j = l.at("linear");
        j["kind"] = "linear";
        s.linear = LearnerSpec::from_json(j);
      }
      if (l.contains("gbt")) {
        auto j = l.at("gbt");
        j["kind"] = "gbt";
        s.gbt = LearnerSpec::from_json(j);
      }
    }
    if (doc.contains("refutation")) {
      const auto& r = doc.at("refutation");
      reject_unknown_keys(r, {"repetitions", "subset_fraction", "confounder_strength_treatment",
                              "confounder_strength_outcome", "target"},
                          "refutation");
      s.refutation.repetitions = r.value("repetitions", s.refutation.repetitions);
      s.refutation.subset_fraction = r.value("subset_fraction", s.refutation.subset_fraction);
      s.refutation.confounder_strength_treatment =
          r.value("confounder_strength_treatment", s.refutation.confounder_strength_treatment);
      s.refutation.confounder_strength_outcome =
          r.value("confounder_strength_outcome", s.refutation.confounder_strength_outcome);
      if (r.contains("target") && !r.at("target").is_null()) {
        s.refutation.target = r.at("target").get<std::string>();
      }
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed query spec: ") + e.what());
  }
  if (s.estimators.empty() && s.metalearners.empty()) {
    throw InvalidArgument("query spec selects no estimator or meta-learner");
  }
  if (s.strata < 1) throw InvalidArgument("strata must be >= 1");
  if (!(s.propensity_clip >= 0.0 && s.propensity_clip < 0.5)) {
    throw InvalidArgument("propensity_clip must lie in [0, 0.5)");
  }
  if (s.refutation.repetitions < 1) throw InvalidArgument("refutation repetitions must be >= 1");
  if (s.refutation.target) {
    const auto methods = selected_methods(s);
    if (std::find(methods.begin(), methods.end(), *s.refutation.target) == methods.end()) {
      throw InvalidArgument("refutation target '" + *s.refutation.target + "' is not selected");
    }
  }
  return s;
}

json QuerySpec::to_json() const {
  json metas = json::array();
  for (const auto& m : metalearners) {
    metas.push_back(std::string(to_string(m.learner)) + ":" + std::string(to_string(m.base)));
  }
  json refs = json::array();
  for (auto r : refuters) refs.push_back(std::string(to_string(r)));
  json rules = json::array();
  for (const auto& r : label_rules) {
    rules.push_back({{"source", r.source}, {"target", r.target}, {"comparator", comparator_name(r.comparator)}});
  }
  auto linear_doc = linear.to_json();
  auto gbt_doc = gbt.to_json();
  linear_doc.erase("kind");
  gbt_doc.erase("kind");
  return {{"name", name},
          {"context", context},
          {"description", description},
          {"data", data},
          {"graph", graph},
          {"treatment", treatment},
          {"outcome", outcome},
          {"estimators", estimators},
          {"metalearners", metas},
          {"refuters", refs},
          {"seed", seed},
          {"label_rules", rules},
          {"propensity_clip", propensity_clip},
          {"strata", strata},
          {"max_adjustment_size", max_adjustment_size},
          {"learners", {{"linear", linear_doc}, {"gbt", gbt_doc}}},
          {"refutation",
           {{"repetitions", refutation.repetitions},
            {"subset_fraction", refutation.subset_fraction},
            {"confounder_strength_treatment", refutation.confounder_strength_treatment},
            {"confounder_strength_outcome", refutation.confounder_strength_outcome},
            {"target", refutation.target ? json(*refutation.target) : json(nullptr)}}}};
}

QuerySpec load_query_spec(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open query spec '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("query spec '" + path + "' is not valid JSON: " + e.what());
  }
  const auto dir = fs::path(path).parent_path();
  return QuerySpec::from_json(doc, dir.empty() ? "." : dir.string());
}

std::vector<std::string> selected_methods(const QuerySpec& spec) {
  auto methods = spec.estimators;
  for (const auto& m : spec.metalearners) methods.push_back(m.label());
  return methods;
}

RunOutput run_query(const QuerySpec& spec, bool with_refutation) {
  try {
    const auto resolve = [&](const std::string& p) {
      const fs::path path(p);
      return path.is_absolute() ? path.string() : (fs::path(spec.base_dir) / path).string();
    };

    // Identification first: a non-identifiable query fails before any data work.
    const auto graph = with_query_roles(load_graph(resolve(spec.graph)), spec);
    const auto sets = backdoor_sets(graph, spec.treatment, spec.outcome,
                                    BackdoorOptions{spec.max_adjustment_size});
    const auto& adjustment_nodes = sets.front();

    auto prepared = prepare_frame(spec, load_csv(resolve(spec.data)));
    const Frame& frame = prepared.frame;
    frame.column(spec.treatment);
    frame.column(spec.outcome);
    const auto adjustment = expand_to_columns(frame, adjustment_nodes);

    RunOutput out;
    json effects = json::array();
    std::vector<std::vector<std::string>> effect_rows{{"method", "effect", "relative_effect"}};

    std::optional<PropensityModel> propensity;
    auto get_propensity = [&]() -> const PropensityModel& {
      if (!propensity) propensity = fit_propensity(frame, spec.treatment, adjustment, spec.propensity_clip);
      return *propensity;
    };

    auto record = [&](EffectEstimate est) {
      const auto rel = est.relative_effect();
      effect_rows.push_back({est.method, format_number(est.value), rel ? format_number(*rel) : ""});
      effects.push_back(est.to_json());
    };

    for (const auto& name : spec.estimators) {
      if (name == "regression_adjustment") {
        record(regression_adjustment(frame, spec.treatment, spec.outcome, adjustment));
      } else if (name == "psm") {
        record(psm_att(frame, spec.treatment, spec.outcome, adjustment, get_propensity()));
      } else if (name == "ipw") {
        record(ipw_ate(frame, spec.treatment, spec.outcome, get_propensity()));
      } else {
        record(stratified_ate(frame, spec.treatment, spec.outcome, get_propensity(), spec.strata));
      }
    }

    const auto t = binary_values(frame, spec.treatment);
    const auto y = complete_values(frame, spec.outcome);
    std::size_t treated = 0;
    double control_sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] == 1.0) ++treated;
      else control_sum += y[i];
    }
    for (const auto& c : spec.metalearners) {
      const auto& base = c.base == LearnerKind::Gbt ? spec.gbt : spec.linear;
      const bool needs_pm = c.learner == MetaLearner::X || c.learner == MetaLearner::R;
      const auto pm = needs_pm ? get_propensity() : PropensityModel::constant(0.5, spec.propensity_clip);
      const auto model = fit_metalearner(c.learner, frame, spec.treatment, spec.outcome, adjustment, base, pm);

      EffectEstimate est;
      est.method = c.label();
      est.estimand = Estimand::ATE;
      est.value = model.ate();
      est.n_treated = treated;
      est.n_control = t.size() - treated;
      est.adjustment_set = adjustment;
      est.control_mean = est.n_control ? control_sum / static_cast<double>(est.n_control) : 0.0;
      record(est);

      out.sidecars["ite_" + file_stem(c) + ".csv"] = model.ite_csv();
      out.sidecars["uplift_" + file_stem(c) + ".csv"] = uplift_curve(model.ite(), t, y).to_csv();
    }

    std::ostringstream effects_csv;
    for (const auto& r : effect_rows) effects_csv << r[0] << ',' << r[1] << ',' << r[2] << '\n';
    out.sidecars["effects.csv"] = effects_csv.str();

    json refutations = json::array();
    json target = nullptr;
    if (with_refutation && !spec.refuters.empty()) {
      const auto method = spec.refutation.target.value_or(selected_methods(spec).front());
      target = method;
      const auto estimator = make_estimator(spec, method);
      const EstimationTask task{spec.treatment, spec.outcome, adjustment};
      std::ostringstream csv;
      csv << "refuter,original_effect,mean_refuted,relative_change,p_value,passed\n";
      for (auto r : spec.refuters) {
        const RefutationOptions options{spec.refutation.repetitions,
                                        derive_seed(spec.seed, refuter_stream(r))};
        RefutationReport report;
        switch (r) {
          case Refuter::RandomCommonCause:
            report = refute_random_common_cause(estimator, frame, task, options);
            break;
          case Refuter::PlaceboTreatment:
            report = refute_placebo(estimator, frame, task, options);
            break;
          case Refuter::DataSubset:
            report = refute_subset(estimator, frame, task, spec.refutation.subset_fraction, options);
            break;
          case Refuter::UnobservedConfounder:
            report = refute_unobserved_confounder(estimator, frame, task,
                                                  spec.refutation.confounder_strength_treatment,
                                                  spec.refutation.confounder_strength_outcome, options);
            break;
        }
        csv << to_string(r) << ',' << format_number(report.original_effect) << ','
            << format_number(report.mean_refuted) << ',' << format_number(report.relative_change) << ','
            << (report.p_value ? format_number(*report.p_value) : "") << ','
            << (report.passed ? (*report.passed ? "true" : "false") : "") << '\n';
        refutations.push_back(report.to_json());
      }
      out.sidecars["refutations.csv"] = csv.str();
    }

    json all_sets = json::array();
    for (const auto& s : sets) all_sets.push_back(std::vector<std::string>(s.begin(), s.end()));
    json plot_data = json::array();
    for (const auto& [name, _] : out.sidecars) plot_data.push_back(name);

    out.report = {
        {"schema_version", kReportSchemaVersion},
        {"kind", "query_report"},
        {"tool", "causet"},
        {"query", spec.name},
        {"context", spec.context},
        {"spec", spec.to_json()},
        {"rows", frame.rows()},
        {"preprocessing", prepared.preprocessing},
        {"graph", serialize_graph(graph)},
        {"adjustment_sets", all_sets},
        {"adjustment_set", std::vector<std::string>(adjustment_nodes.begin(), adjustment_nodes.end())},
        {"adjustment_columns", adjustment},
        {"effects", effects},
        {"refutation_target", target},
        {"refutations", refutations},
        {"plot_data", plot_data},
        {"warnings", prepared.warnings},
        {"notes",
         {{"relative_effect", "effect divided by the mean outcome of untreated units"},
          {"auuc", "trapezoidal area under the absolute cumulative gain curve, divided by n"},
          {"p_value", "two-sided normal tail of the original effect under the refuted effects"}}}};
    return out;
  } catch (const Error& e) {
    e.rethrow("query '" + spec.name + "': " + e.what());
    throw;
  }
}

json ValidationOptions::to_json() const {
  return {{"n", n},
          {"p", p},
          {"repetitions", repetitions},
          {"sigma", sigma},
          {"seed", seed},
          {"train_fraction", train_fraction},
          {"propensity_clip", propensity_clip},
          {"kl_bins", kl_bins},
          {"linear", linear.to_json()},
          {"gbt", gbt.to_json()}};
}

json ValidationRow::to_json() const {
  return {{"repetition", repetition},
          {"learner", std::string(to_string(combo.learner))},
          {"base", std::string(to_string(combo.base))},
          {"train_mse", train_mse},
          {"validation_mse", validation_mse},
          {"train_kld", train_kld},
          {"validation_kld", validation_kld},
          {"train_auuc", train_auuc},
          {"validation_auuc", validation_auuc},
          {"ate", ate},
          {"true_ate", true_ate},
          {"ate_error", ate_error},
          {"validation_ate", validation_ate},
          {"validation_true_ate", validation_true_ate},
          {"scatter_slope", scatter_slope},
          {"scatter_intercept", scatter_intercept}};
}

const ValidationRow& ValidationResult::row(int repetition, MetaLearnerChoice combo) const {
  for (const auto& r : rows) {
    if (r.repetition == repetition && r.combo == combo) return r;
  }
  throw InvalidArgument("no validation row for that repetition/combination");
}

std::vector<MetaLearnerChoice> validation_combos() {
  std::vector<MetaLearnerChoice> combos;
  for (auto base : {LearnerKind::Linear, LearnerKind::Gbt}) {
    for (auto learner : {MetaLearner::S, MetaLearner::T, MetaLearner::X, MetaLearner::R}) {
      combos.push_back({learner, base});
    }
  }
  return combos;
}

ValidationResult run_validation(const ValidationOptions& options) {
  if (options.repetitions < 1) throw InvalidArgument("repetitions must be >= 1");
  ValidationResult result;
  result.options = options;
  auto& sidecars = result.output.sidecars;

  for (int rep = 0; rep < options.repetitions; ++rep) {
    const auto rep_seed = derive_seed(options.seed, static_cast<std::uint64_t>(rep));
    const auto set = generate(options.n, options.p, options.sigma, rep_seed);
    const auto covariates = set.covariate_names();
    const auto [train, validation] = split(set.to_frame(), options.train_fraction, derive_seed(rep_seed, 0));

    const auto tau_train = complete_values(train, "tau_true");
    const auto tau_val = complete_values(validation, "tau_true");
    const auto w_train = binary_values(train, "w");
    const auto w_val = binary_values(validation, "w");
    const auto y_train = complete_values(train, "y");
    const auto y_val = complete_values(validation, "y");
    const auto pm = fit_propensity(train, "w", covariates, options.propensity_clip);

    for (const auto& combo : validation_combos()) {
      const auto& base = combo.base == LearnerKind::Gbt ? options.gbt : options.linear;
      const auto model = fit_metalearner(combo.learner, train, "w", "y", covariates, base, pm);
      const auto& ite_train = model.ite();
      const auto ite_val = model.predict(validation);

      ValidationRow row;
      row.repetition = rep;
      row.combo = combo;
      row.train_mse = mse(ite_train, tau_train);
      row.validation_mse = mse(ite_val, tau_val);
      row.train_kld = kl_divergence(ite_train, tau_train, options.kl_bins);
      row.validation_kld = kl_divergence(ite_val, tau_val, options.kl_bins);
      row.train_auuc = uplift_curve(ite_train, w_train, y_train).auuc;
      const auto val_curve = uplift_curve(ite_val, w_val, y_val);
      row.validation_auuc = val_curve.auuc;
      row.ate = model.ate();
      row.true_ate = mean(tau_train);
      row.ate_error = std::abs(row.ate - row.true_ate);
      row.validation_ate = mean(ite_val);
      row.validation_true_ate = mean(tau_val);
      const auto scatter = prediction_scatter(ite_val, tau_val);
      row.scatter_slope = scatter.slope;
      row.scatter_intercept = scatter.intercept;
      result.rows.push_back(row);

      if (rep == 0) {
        sidecars["scatter_" + file_stem(combo) + ".csv"] = scatter.to_csv();
        sidecars["uplift_" + file_stem(combo) + ".csv"] = val_curve.to_csv();
      }
    }
  }

  std::ostringstream csv;
  csv << "repetition,learner,base,train_mse,validation_mse,train_kld,validation_kld,train_auuc,"
         "validation_auuc,ate,true_ate,ate_error,scatter_slope,scatter_intercept\n";
  json rows = json::array();
  for (const auto& r : result.rows) {
    csv << r.repetition << ',' << to_string(r.combo.learner) << ',' << to_string(r.combo.base) << ','
        << format_number(r.train_mse) << ',' << format_number(r.validation_mse) << ','
        << format_number(r.train_kld) << ',' << format_number(r.validation_kld) << ','
        << format_number(r.train_auuc) << ',' << format_number(r.validation_auuc) << ','
        << format_number(r.ate) << ',' << format_number(r.true_ate) << ','
        << format_number(r.ate_error) << ',' << format_number(r.scatter_slope) << ','
        << format_number(r.scatter_intercept) << '\n';
    rows.push_back(r.to_json());
  }
  sidecars["validation_rows.csv"] = csv.str();

  json plot_data = json::array();
  for (const auto& [name, _] : sidecars) plot_data.push_back(name);
  result.output.report = {
      {"schema_version", kReportSchemaVersion},
      {"kind", "validation_report"},
      {"tool", "causet"},
      {"options", options.to_json()},
      {"rows", rows},
      {"aggregate", aggregate_block(result.rows)},
      {"plot_data", plot_data},
      {"notes",
       {{"mse", "mean squared error of per-unit effects against tau_true"},
        {"kld", "KL(predicted effects || tau_true), histogram over the union range"},
        {"auuc", "trapezoidal area under the absolute cumulative gain curve, divided by n"},
        {"ate_error", "|mean training ITE - mean training tau_true|"}}}};
  return result;
}

RunOutput compare_reports(const std::vector<json>& reports) {
  if (reports.empty()) throw InvalidArgument("compare needs at least one report");
  RunOutput out;
  json rows = json::array();
  json warnings = json::array();
  std::vector<std::string> methods;
  json grid = json::array();
  std::ostringstream csv;
  csv << "query,context,method,estimand,effect,relative_effect,refutations\n";

  for (const auto& r : reports) {
    if (!r.is_object() || r.value("kind", std::string()) != "query_report") {
      throw SchemaMismatch("document is not a query report");
    }
    if (r.value("schema_version", -1) != kReportSchemaVersion) {
      throw SchemaMismatch("report schema_version " + r.value("schema_version", json(nullptr)).dump() +
                           " differs from supported version " + std::to_string(kReportSchemaVersion));
    }
    const auto query = r.value("query", std::string());
    const auto context = r.value("context", std::string());
    const auto& effects = r.at("effects");
    if (effects.empty()) {
      warnings.push_back("report '" + query + "' has no effects; omitted");
      continue;
    }
    std::string verdicts;
    for (const auto& ref : r.value("refutations", json::array())) {
      if (!verdicts.empty()) verdicts += "; ";
      const auto& passed = ref.at("passed");
      verdicts += ref.at("refuter").get<std::string>() + "=" +
                  (passed.is_boolean() ? (passed.get<bool>() ? "pass" : "fail") : "info");
    }
    const auto target = r.value("refutation_target", json(nullptr));
    json grid_row{{"query", query}, {"effects", json::object()}};
    for (const auto& e : effects) {
      const auto method = e.at("method").get<std::string>();
      const bool refuted = target.is_string() && target.get<std::string>() == method;
      rows.push_back({{"query", query},
                      {"context", context},
                      {"method", method},
                      {"estimand", e.at("estimand")},
                      {"effect", e.at("value")},
                      {"relative_effect", e.at("relative_effect")},
                      {"refutations", refuted ? verdicts : std::string()}});
      if (std::find(methods.begin(), methods.end(), method) == methods.end()) methods.push_back(method);
      grid_row["effects"][method] = e.at("value");
      const auto& rel = e.at("relative_effect");
      csv << query << ',' << context << ',' << method << ',' << e.at("estimand").get<std::string>() << ','
          << format_number(e.at("value").get<double>()) << ','
          << (rel.is_number() ? format_number(rel.get<double>()) : "") << ','
          << (refuted ? verdicts : "") << '\n';
    }
    grid.push_back(grid_row);
  }
  out.sidecars["comparison.csv"] = csv.str();
  out.report = {{"schema_version", kReportSchemaVersion},
                {"kind", "comparison"},
                {"tool", "causet"},
                {"rows", rows},
                {"grid", {{"methods", methods}, {"queries", grid}}},
                {"warnings", warnings},
                {"plot_data", json::array({"comparison.csv"})}};
  return out;
}

std::string render_table(const json& report) {
  std::ostringstream out;
  const auto kind = report.value("kind", std::string());
  if (kind == "query_report") {
    out << "query " << report.value("query", std::string()) << "  (n = " << report.value("rows", 0)
        << ", adjustment = {";
    bool first = true;
    for (const auto& a : report.at("adjustment_set")) {
      out << (first ? "" : ", ") << a.get<std::string>();
      first = false;
    }
    out << "})\n\n";
    std::vector<std::vector<std::string>> rows{{"method", "estimand", "effect", "relative", "n_treated", "n_control"}};
    for (const auto& e : report.at("effects")) {
      rows.push_back({e.at("method").get<std::string>(), e.at("estimand").get<std::string>(),
                      json_number(e.at("value")), json_number(e.at("relative_effect")),
                      std::to_string(e.at("n_treated").get<std::size_t>()),
                      std::to_string(e.at("n_control").get<std::size_t>())});
    }
    out << align(rows);
    const auto& refs = report.at("refutations");
    if (!refs.empty()) {
      out << "\nrefutations of " << report.at("refutation_target").get<std::string>() << "\n\n";
      std::vector<std::vector<std::string>> rr{{"refuter", "original", "mean_refuted", "rel_change", "p_value", "verdict"}};
      for (const auto& r : refs) {
        const auto& passed = r.at("passed");
        rr.push_back({r.at("refuter").get<std::string>(), json_number(r.at("original_effect")),
                      json_number(r.at("mean_refuted")), json_number(r.at("relative_change")),
                      json_number(r.at("p_value")),
                      passed.is_boolean() ? (passed.get<bool>() ? "pass" : "fail") : "info"});
      }
      out << align(rr);
    }
  } else if (kind == "validation_report") {
    std::vector<std::vector<std::string>> rows{{"learner", "base", "ate_error", "val_mse", "val_kld", "val_auuc", "slope"}};
    for (const auto& a : report.at("aggregate")) {
      const auto& m = a.at("mean");
      rows.push_back({a.at("learner").get<std::string>(), a.at("base").get<std::string>(),
                      json_number(m.at("ate_error")), json_number(m.at("validation_mse")),
                      json_number(m.at("validation_kld")), json_number(m.at("validation_auuc")),
                      json_number(m.at("scatter_slope"))});
    }
    out << "synthetic validation, means over " << report.at("options").at("repetitions").get<int>()
        << " repetitions\n\n"
        << align(rows);
  } else if (kind == "comparison") {
    std::vector<std::vector<std::string>> rows{{"query", "method", "estimand", "effect", "relative", "refutations"}};
    for (const auto& r : report.at("rows")) {
      rows.push_back({r.at("query").get<std::string>(), r.at("method").get<std::string>(),
                      r.at("estimand").get<std::string>(), json_number(r.at("effect")),
                      json_number(r.at("relative_effect")), r.at("refutations").get<std::string>()});
    }
    out << align(rows);
  } else {
    out << report.dump(2) << '\n';
  }
  return out.str();
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

void write_output(const RunOutput& output, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  auto write = [&](const std::string& name, const std::string& contents) {
    const auto path = (fs::path(dir) / name).string();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + path + "'");
    f << contents;
    if (!f) throw IoError("write failure on '" + path + "'");
  };
  write("report.json", dump_report(output.report));
  for (const auto& [name, contents] : output.sidecars) write(name, contents);
}

}  // namespace causet
