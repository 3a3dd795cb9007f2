// causet: command-line front end for query runs, synthetic validation and
// report comparison.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "causet/errors.hpp"
#include "causet/frame.hpp"
#include "causet/query.hpp"
#include "causet/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "table";
};

void add_common(CLI::App* cmd, Common& c, bool with_seed = true) {
  if (with_seed) cmd->add_option("--seed", c.seed, "RNG seed (falls back to the spec, then CAUSET_SEED, then 0)");
  cmd->add_option("--out", c.out, "directory for report.json and plot-data CSVs");
  cmd->add_option("--format", c.format, "stdout format")->check(CLI::IsMember({"table", "machine"}));
}

std::optional<std::uint64_t> env_seed() {
  const char* text = std::getenv("CAUSET_SEED");
  if (text == nullptr || *text == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != std::string(text).size()) throw std::invalid_argument("trailing text");
    return v;
  } catch (const std::exception&) {
    throw causet::InvalidArgument(std::string("CAUSET_SEED is not an unsigned integer: '") + text + "'");
  }
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  return env_seed().value_or(0);
}

causet::QuerySpec read_spec(const std::string& path, const std::optional<std::uint64_t>& flag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw causet::IoError("cannot open query spec '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw causet::ParseError("query spec '" + path + "' is not valid JSON: " + e.what());
  }
  if (flag) {
    doc["seed"] = *flag;
  } else if (!doc.contains("seed")) {
    doc["seed"] = env_seed().value_or(0);
  }
  const auto dir = fs::path(path).parent_path();
  return causet::QuerySpec::from_json(doc, dir.empty() ? "." : dir.string());
}

json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw causet::IoError("cannot open report '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw causet::ParseError("report '" + path + "' is not valid JSON: " + e.what());
  }
}

void emit(const causet::RunOutput& output, const Common& c) {
  if (const auto w = output.report.find("warnings"); w != output.report.end()) {
    for (const auto& text : *w) std::cerr << "warning: " << text.get<std::string>() << '\n';
  }
  if (!c.out.empty()) causet::write_output(output, c.out);
  if (c.format == "machine") {
    std::cout << causet::dump_report(output.report);
  } else {
    std::cout << causet::render_table(output.report);
  }
}

std::string synth_graph(std::size_t p) {
  std::string text = "# synthetic generator structure\n@treatment w\n@outcome y\n";
  for (std::size_t j = 0; j < p; ++j) text += "x" + std::to_string(j) + "\n";
  text += "x0 -> w\nx1 -> w\n";
  for (std::size_t j = 0; j < 5; ++j) text += "x" + std::to_string(j) + " -> y\n";
  text += "w -> y\n";
  return text;
}

json synth_query(std::uint64_t seed) {
  return {{"name", "synth"},
          {"context", "validation"},
          {"description", "all estimators and meta-learners on the synthetic generator"},
          {"data", "synth.csv"},
          {"graph", "synth.graph"},
          {"treatment", "w"},
          {"outcome", "y"},
          {"estimators", {"regression_adjustment", "psm", "ipw", "stratification"}},
          {"metalearners",
           {"S:linear", "T:linear", "X:linear", "R:linear", "S:gbt", "T:gbt", "X:gbt", "R:gbt"}},
          {"refuters", {"placebo_treatment", "random_common_cause", "data_subset", "unobserved_confounder"}},
          {"seed", seed}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw causet::IoError("cannot write '" + path.string() + "'");
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"causet: causal effect estimation toolkit"};
  app.require_subcommand(1);

  Common synth_opts;
  std::size_t synth_n = 10000, synth_p = 5;
  double synth_sigma = 1.0;
  auto* synth_cmd = app.add_subcommand("synth", "write synth.csv, synth.graph and synth_query.json");
  add_common(synth_cmd, synth_opts);
  synth_cmd->add_option("--n", synth_n, "rows")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--p", synth_p, "covariates (>= 5)");
  synth_cmd->add_option("--sigma", synth_sigma, "outcome noise standard deviation");

  Common estimate_opts;
  std::string estimate_spec;
  auto* estimate_cmd = app.add_subcommand("estimate", "identify and estimate a query");
  estimate_cmd->add_option("spec", estimate_spec, "query spec (JSON)")->required();
  add_common(estimate_cmd, estimate_opts);

  Common refute_opts;
  std::string refute_spec;
  auto* refute_cmd = app.add_subcommand("refute", "estimate a query and run its refuters");
  refute_cmd->add_option("spec", refute_spec, "query spec (JSON)")->required();
  add_common(refute_cmd, refute_opts);

  Common validate_opts;
  causet::ValidationOptions validation;
  auto* validate_cmd = app.add_subcommand("validate", "synthetic ground-truth validation of the meta-learners");
  add_common(validate_cmd, validate_opts);
  validate_cmd->add_option("--n", validation.n, "rows per repetition")->check(CLI::PositiveNumber);
  validate_cmd->add_option("--p", validation.p, "covariates (>= 5)");
  validate_cmd->add_option("--sigma", validation.sigma, "outcome noise standard deviation");
  validate_cmd->add_option("--repetitions", validation.repetitions, "repetitions");

  Common compare_opts;
  std::vector<std::string> compare_paths;
  auto* compare_cmd = app.add_subcommand("compare", "tabulate effects across query reports");
  compare_cmd->add_option("reports", compare_paths, "report.json files")->required();
  add_common(compare_cmd, compare_opts, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth_cmd) {
      const auto seed = resolve_seed(synth_opts.seed);
      const auto set = causet::generate(synth_n, synth_p, synth_sigma, seed);
      const fs::path dir = synth_opts.out.empty() ? fs::path(".") : fs::path(synth_opts.out);
      std::error_code ec;
      fs::create_directories(dir, ec);
      if (ec) throw causet::IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
      causet::write_csv(set.to_frame(), (dir / "synth.csv").string());
      write_text(dir / "synth.graph", synth_graph(synth_p));
      write_text(dir / "synth_query.json", synth_query(seed).dump(2) + "\n");
      const json summary{{"kind", "synth"},
                         {"rows", synth_n},
                         {"covariates", synth_p},
                         {"sigma", synth_sigma},
                         {"seed", seed},
                         {"files", {"synth.csv", "synth.graph", "synth_query.json"}}};
      if (synth_opts.format == "machine") {
        std::cout << summary.dump(2) << '\n';
      } else {
        std::cout << "wrote " << synth_n << " rows to " << (dir / "synth.csv").string() << " (seed " << seed << ")\n";
      }
    } else if (*estimate_cmd) {
      emit(causet::run_query(read_spec(estimate_spec, estimate_opts.seed), false), estimate_opts);
    } else if (*refute_cmd) {
      emit(causet::run_query(read_spec(refute_spec, refute_opts.seed), true), refute_opts);
    } else if (*validate_cmd) {
      validation.seed = resolve_seed(validate_opts.seed);
      emit(causet::run_validation(validation).output, validate_opts);
    } else if (*compare_cmd) {
      std::vector<json> reports;
      for (const auto& p : compare_paths) reports.push_back(read_json(p));
      const auto output = causet::compare_reports(reports);
      emit(output, compare_opts);
    }
  } catch (const causet::Error& e) {
    std::cerr << json{{"error", {{"code", e.code()}, {"message", e.what()}}}}.dump(2) << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", {{"code", "InternalError"}, {"message", e.what()}}}}.dump(2) << '\n';
    return 3;
  }
  return 0;
}
