#include "kinlab/report.hpp"

#include <filesystem>
#include <fstream>

#include "kinlab/csvio.hpp"
#include "kinlab/errors.hpp"

namespace kinlab {

bool ExperimentReport::all_pass() const {
  for (const auto& v : verdicts) {
    if (!v.pass) return false;
  }
  return true;
}

bool SweepResult::all_pass() const {
  for (const auto& v : verdicts) {
    if (!v.pass) return false;
  }
  for (const auto& r : reports) {
    if (!r.all_pass()) return false;
  }
  return true;
}

namespace {

void write_verdicts_csv(const std::vector<Verdict>& verdicts,
                        const std::string& path) {
  CsvWriter out(path, {"name", "measured", "tolerance", "pass"});
  for (const auto& v : verdicts) {
    out.row_text({v.name, format_double(v.measured), format_double(v.tolerance),
                  v.pass ? "true" : "false"});
  }
}

}  // namespace

void write_report(const ExperimentReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);

  {
    CsvWriter out(dir + "/report.csv", report.columns);
    for (const auto& r : report.rows) out.row(r);
  }
  write_verdicts_csv(report.verdicts, dir + "/verdicts.csv");
  {
    std::ofstream prov(dir + "/provenance.txt", std::ios::binary);
    if (!prov) throw ArgumentError("cannot open '" + dir + "/provenance.txt'");
    prov << "experiment=" << experiment_name(report.experiment) << "\n";
    prov << "config_hash=" << report.config_hash << "\n";
    prov << "code_version=" << report.code_version << "\n";
  }
}

void write_sweep(const SweepResult& sweep, const std::string& dir) {
  std::filesystem::create_directories(dir);

  {
    CsvWriter out(dir + "/trend.csv", {"sweep_param", "metric", "value"});
    for (const auto& row : sweep.trend) {
      out.row_text({format_double(row.sweep_value), row.metric,
                    format_double(row.value)});
    }
  }
  write_verdicts_csv(sweep.verdicts, dir + "/sweep_verdicts.csv");
  for (std::size_t i = 0; i < sweep.reports.size(); ++i) {
    write_report(sweep.reports[i],
                 dir + "/value_" + format_double(sweep.values[i]));
  }
}

}  // namespace kinlab
