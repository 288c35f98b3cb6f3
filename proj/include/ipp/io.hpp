#ifndef IPP_IO_HPP
#define IPP_IO_HPP

#include <iosfwd>
#include <string>

#include "ipp/multi.hpp"
#include "ipp/reward.hpp"

namespace ipp {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tabular sensing data: one row per location, one or more measurement
// columns (repeated scans of the same field).
struct Dataset {
  struct Row {
    LocationId id = 0;
    double x = 0.0;
    double y = 0.0;
    std::vector<double> values;
    bool operator==(const Row&) const = default;
  };
  std::vector<Row> rows;
  std::size_t value_columns = 0;
  bool operator==(const Dataset&) const = default;
};

// Header must be `id,x,y,value[,value2,...]`. Malformed rows and duplicate
// ids raise IoError naming the line.
Dataset ingest_csv(const std::string& path);
Dataset parse_csv(std::istream& in, const std::string& name);
void emit_csv(const Dataset& ds, const std::string& path);
void write_csv(const Dataset& ds, std::ostream& out);

SensingDomain to_domain(const Dataset& ds, double experiment_cost,
                        double travel_cost_per_meter = 1.0);

struct ModelBuild {
  std::shared_ptr<const GPModel> model;
  SEKernelParams params;
  double train_mean = 0.0;  // subtracted before fitting, added back on output
};

std::vector<SEKernelParams> default_fit_grid();

// Builds the planning model over the dataset locations from `value_col`
// (0-based among value columns), fitting hyperparameters on the grid unless
// explicit parameters are given.
ModelBuild build_model(const Dataset& ds, std::size_t value_col,
                       std::optional<SEKernelParams> params,
                       const std::vector<SEKernelParams>& grid =
                           default_fit_grid());

// Root-mean-square error of GP predictions at unobserved locations against a
// held-out measurement column, after observing the plan's locations in it.
double eval_rmse(const Dataset& ds, std::size_t heldout_col,
                 const IdSet& observed, const ModelBuild& mb);

struct ReportRobot {
  PlanQuery query;
  std::vector<LocationId> path;
  std::vector<std::pair<double, double>> coordinates;
  double travel_cost = 0.0;
  double sensing_cost = 0.0;
  double reward = 0.0;  // stage gain
  std::vector<IterDiagnostic> iterations;
};

struct PlanReport {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<ReportRobot> robots;
  double joint_reward = 0.0;
  std::size_t trace_nodes = 0;
  std::size_t trace_pruned = 0;
  double wall_time_seconds = 0.0;
};

void write_report(const PlanReport& report, std::ostream& out);
// Parses the machine-readable section written by write_report.
PlanReport parse_report(std::istream& in);

struct CurveRow {
  std::string algorithm;
  double budget = 0.0;
  std::string metric;
  double value = 0.0;
};

// One `algorithm,budget,metric,value` row per entry, with a header line.
void emit_curves(const std::vector<CurveRow>& rows, std::ostream& out);

std::string config_hash(const std::string& canonical_flags);

}  // namespace ipp

#endif
