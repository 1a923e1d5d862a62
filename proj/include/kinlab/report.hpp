#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kinlab/config.hpp"

namespace kinlab {

// One named check: `pass` records whether `measured` met the stated
// tolerance under the check's own comparison (documented per experiment).
struct Verdict {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ExperimentReport {
  ExperimentId experiment = ExperimentId::e1_free_isometry;
  std::vector<std::string> columns;           // report.csv header
  std::vector<std::vector<double>> rows;      // numeric records
  std::vector<Verdict> verdicts;
  // Headline scalars (derived from rows); feed sweep trend files.
  std::vector<std::pair<std::string, double>> metrics;
  std::string config_hash;
  std::string code_version;

  bool all_pass() const;
};

// Writes report.csv, verdicts.csv and provenance.txt into `dir`
// (created if missing).  Output is byte-deterministic.
void write_report(const ExperimentReport& report, const std::string& dir);

// Trend row emitted by parameter sweeps: one metric value per swept value.
struct TrendRow {
  double sweep_value = 0.0;
  std::string metric;
  double value = 0.0;
};

struct SweepResult {
  std::string parameter;
  std::vector<double> values;
  std::vector<ExperimentReport> reports;  // one per swept value
  std::vector<TrendRow> trend;
  std::vector<Verdict> verdicts;          // sweep-level checks

  bool all_pass() const;
};

// Writes trend.csv, sweep_verdicts.csv and per-value report directories.
void write_sweep(const SweepResult& sweep, const std::string& dir);

}  // namespace kinlab
