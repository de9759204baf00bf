#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "interop/econ.hpp"
#include "interop/flows.hpp"
#include "interop/graph.hpp"
#include "interop/mixture.hpp"

namespace interop {

struct NamedRegression {
  std::string name;
  RegressionSpec spec;
};

struct DidConfig {
  Date event_date = Date::parse("2023-07-06");
  std::set<std::string> treated;
  std::string outcome = "ln_tvl";
  std::vector<std::string> controls;
};

struct RunManifest {
  std::string chains_path;
  std::string flows_path;
  std::string meta_path;
  std::string out_dir;
  std::optional<std::string> reference_path;
  HypergraphConfig hypergraph;
  std::vector<BridgeFilter> filters = {BridgeFilter::All};
  std::vector<NamedRegression> regressions;
  std::optional<DidConfig> did;
  std::vector<int> corr_windows = {30, 60, 90};
  std::vector<std::string> pearson_columns = {"asi", "aai", "tvl_ma7"};
  std::uint64_t seed = 0;
  int workers = 1;
  bool write_daily_edges = false;  // one edge-list CSV per day is large

  static RunManifest load(const std::string& path);
  void validate() const;
};

// Flat key -> value map of headline figures, fed into the report's
// reference comparisons.
using FigureMap = std::map<std::string, double>;

struct PipelineBundle {
  std::string out_dir;
  FigureMap figures;
  std::vector<std::string> stages_run;
  std::vector<std::string> stages_skipped;  // cached
  bool complete = false;
};

PipelineBundle run_pipeline(const RunManifest& manifest);

struct ComparisonRow {
  std::string key;
  double expected = 0.0;
  std::optional<double> actual;
  double tolerance = 0.0;
  bool pass = false;
};

struct Report {
  std::vector<ComparisonRow> comparisons;
  std::string markdown;
  bool all_pass = true;
};

// Markdown digest; comparisons come from the manifest's reference JSON
// ({"key": {"expected": v, "tol_abs": a}} or "tol_rel").
Report emit_report(const PipelineBundle& bundle, const RunManifest& manifest);

std::string sha256_file(const std::string& path);
std::string sha256_string(const std::string& data);

}  // namespace interop
