#include "ipp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace ipp {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_double(const std::string& s, const std::string& name,
                    std::size_t line_no) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    throw IoError(name + ": line " + std::to_string(line_no) +
                  ": bad number '" + s + "'");
  return value;
}

long parse_int(const std::string& s, const std::string& name,
               std::size_t line_no) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  long value = 0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw IoError(name + ": line " + std::to_string(line_no) +
                  ": bad integer '" + s + "'");
  return value;
}

}  // namespace

Dataset parse_csv(std::istream& in, const std::string& name) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(name + ": empty file");
  auto header = split_line(line);
  if (header.size() < 4 || header[0] != "id" || header[1] != "x" ||
      header[2] != "y")
    throw IoError(name + ": header must be id,x,y,value[,value2,...]");

  Dataset ds;
  ds.value_columns = header.size() - 3;
  std::size_t line_no = 1;
  std::unordered_map<LocationId, bool> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != header.size())
      throw IoError(name + ": line " + std::to_string(line_no) +
                    ": expected " + std::to_string(header.size()) +
                    " fields, got " + std::to_string(fields.size()));
    Dataset::Row row;
    row.id = static_cast<LocationId>(parse_int(fields[0], name, line_no));
    if (!seen.emplace(row.id, true).second)
      throw IoError(name + ": line " + std::to_string(line_no) +
                    ": duplicate id " + std::to_string(row.id));
    row.x = parse_double(fields[1], name, line_no);
    row.y = parse_double(fields[2], name, line_no);
    for (std::size_t c = 3; c < fields.size(); ++c)
      row.values.push_back(parse_double(fields[c], name, line_no));
    ds.rows.push_back(std::move(row));
  }
  if (ds.rows.empty()) throw IoError(name + ": no data rows");
  return ds;
}

Dataset ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open");
  return parse_csv(in, path);
}

void write_csv(const Dataset& ds, std::ostream& out) {
  out << "id,x,y";
  for (std::size_t c = 0; c < ds.value_columns; ++c) {
    out << (c == 0 ? ",value" : ",value" + std::to_string(c + 1));
  }
  out << "\n";
  out << std::setprecision(17);
  for (const auto& row : ds.rows) {
    out << row.id << "," << row.x << "," << row.y;
    for (double v : row.values) out << "," << v;
    out << "\n";
  }
}

void emit_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  write_csv(ds, out);
}

SensingDomain to_domain(const Dataset& ds, double experiment_cost,
                        double travel_cost_per_meter) {
  std::vector<Location> locs;
  locs.reserve(ds.rows.size());
  for (const auto& row : ds.rows)
    locs.push_back({row.id, row.x, row.y, experiment_cost});
  return SensingDomain(std::move(locs), travel_cost_per_meter,
                       experiment_cost);
}

std::vector<SEKernelParams> default_fit_grid() {
  std::vector<SEKernelParams> grid;
  for (double sf2 : {0.25, 1.0, 4.0, 16.0}) {
    for (double ell : {2.0, 5.0, 10.0, 20.0, 40.0}) {
      for (double sn2 : {0.01, 0.1, 1.0}) {
        grid.push_back({sf2, ell, sn2 * sf2});
      }
    }
  }
  return grid;
}

ModelBuild build_model(const Dataset& ds, std::size_t value_col,
                       std::optional<SEKernelParams> params,
                       const std::vector<SEKernelParams>& grid) {
  if (value_col >= ds.value_columns)
    throw IoError("value column out of range");

  ModelBuild mb;
  double mean = 0.0;
  for (const auto& row : ds.rows) mean += row.values[value_col];
  mean /= static_cast<double>(ds.rows.size());
  mb.train_mean = mean;

  if (params) {
    mb.params = *params;
  } else {
    std::vector<FitSample> samples;
    samples.reserve(ds.rows.size());
    for (const auto& row : ds.rows)
      samples.push_back({row.x, row.y, row.values[value_col] - mean});
    gp_fit(samples, grid, &mb.params);
  }

  std::vector<LocationId> ids;
  std::vector<double> xs, ys;
  for (const auto& row : ds.rows) {
    ids.push_back(row.id);
    xs.push_back(row.x);
    ys.push_back(row.y);
  }
  mb.model = std::make_shared<GPModel>(
      GPModel::from_kernel(ids, xs, ys, mb.params));
  return mb;
}

double eval_rmse(const Dataset& ds, std::size_t heldout_col,
                 const IdSet& observed, const ModelBuild& mb) {
  if (heldout_col >= ds.value_columns)
    throw IoError("held-out column out of range");

  std::map<LocationId, double> truth;
  for (const auto& row : ds.rows) truth[row.id] = row.values[heldout_col];
  for (LocationId id : observed) {
    if (!truth.count(id))
      throw IoError("observed location " + std::to_string(id) +
                    " not in dataset");
  }

  std::map<LocationId, double> obs_values;
  for (LocationId id : observed) obs_values[id] = truth[id] - mb.train_mean;

  const auto posterior = gp_posterior(*mb.model, obs_values);
  double sum_sq = 0.0;
  std::size_t n = 0;
  for (const auto& [id, value] : truth) {
    if (observed.contains(id)) continue;
    auto it = posterior.find(id);
    const double predicted = mb.train_mean +
                             (it == posterior.end() ? 0.0 : it->second.mean);
    const double err = predicted - value;
    sum_sq += err * err;
    ++n;
  }
  return n == 0 ? 0.0 : std::sqrt(sum_sq / static_cast<double>(n));
}

namespace {

nlohmann::ordered_json robot_to_json(const ReportRobot& r) {
  nlohmann::ordered_json j;
  j["start"] = r.query.start;
  j["finish"] = r.query.finish;
  j["budget"] = r.query.budget;
  j["path"] = r.path;
  nlohmann::ordered_json coords = nlohmann::ordered_json::array();
  for (const auto& [x, y] : r.coordinates) coords.push_back({x, y});
  j["coordinates"] = coords;
  j["travel_cost"] = r.travel_cost;
  j["sensing_cost"] = r.sensing_cost;
  j["reward"] = r.reward;
  nlohmann::ordered_json iters = nlohmann::ordered_json::array();
  for (const auto& it : r.iterations) {
    iters.push_back({{"iter", it.iter},
                     {"travel_budget", it.travel_budget},
                     {"experimental_budget", it.experimental_budget},
                     {"feasible", it.feasible},
                     {"search_reward", it.search_reward},
                     {"expanded_cost", it.expanded_cost},
                     {"cells", it.cells_visited}});
  }
  j["iterations"] = iters;
  return j;
}

}  // namespace

void write_report(const PlanReport& report, std::ostream& out) {
  out << "# plan report (" << report.algorithm << ")\n";
  out << "seed: " << report.seed << "\n";
  out << "config: " << report.config_hash << "\n";
  out << std::setprecision(12);
  for (std::size_t i = 0; i < report.robots.size(); ++i) {
    const ReportRobot& r = report.robots[i];
    out << "robot " << i << ": start=" << r.query.start
        << " finish=" << r.query.finish << " budget=" << r.query.budget
        << "\n";
    out << "  path:";
    for (LocationId id : r.path) out << " " << id;
    out << "\n";
    out << "  cost: travel=" << r.travel_cost
        << " sensing=" << r.sensing_cost << "\n";
    out << "  reward: " << r.reward << "\n";
  }
  out << "joint reward: " << report.joint_reward << "\n";
  out << "search nodes: " << report.trace_nodes
      << " pruned: " << report.trace_pruned << "\n";
  out << "wall time: " << report.wall_time_seconds << " s\n";

  nlohmann::ordered_json j;
  j["algorithm"] = report.algorithm;
  j["seed"] = report.seed;
  j["config_hash"] = report.config_hash;
  nlohmann::ordered_json robots = nlohmann::ordered_json::array();
  for (const auto& r : report.robots) robots.push_back(robot_to_json(r));
  j["robots"] = robots;
  j["joint_reward"] = report.joint_reward;
  j["trace_nodes"] = report.trace_nodes;
  j["trace_pruned"] = report.trace_pruned;
  j["wall_time_seconds"] = report.wall_time_seconds;
  out << "### MACHINE\n" << j.dump(2) << "\n";
}

PlanReport parse_report(std::istream& in) {
  std::string line;
  bool found = false;
  std::string json_text;
  while (std::getline(in, line)) {
    if (found) {
      json_text += line;
      json_text += "\n";
    } else if (line == "### MACHINE") {
      found = true;
    }
  }
  if (!found) throw IoError("report: machine section missing");
  const auto j = nlohmann::json::parse(json_text);

  PlanReport report;
  report.algorithm = j.at("algorithm").get<std::string>();
  report.seed = j.at("seed").get<std::uint64_t>();
  report.config_hash = j.at("config_hash").get<std::string>();
  for (const auto& rj : j.at("robots")) {
    ReportRobot r;
    r.query.start = rj.at("start").get<LocationId>();
    r.query.finish = rj.at("finish").get<LocationId>();
    r.query.budget = rj.at("budget").get<double>();
    r.path = rj.at("path").get<std::vector<LocationId>>();
    for (const auto& c : rj.at("coordinates"))
      r.coordinates.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    r.travel_cost = rj.at("travel_cost").get<double>();
    r.sensing_cost = rj.at("sensing_cost").get<double>();
    r.reward = rj.at("reward").get<double>();
    report.robots.push_back(std::move(r));
  }
  report.joint_reward = j.at("joint_reward").get<double>();
  report.trace_nodes = j.at("trace_nodes").get<std::size_t>();
  report.trace_pruned = j.at("trace_pruned").get<std::size_t>();
  report.wall_time_seconds = j.at("wall_time_seconds").get<double>();
  return report;
}

void emit_curves(const std::vector<CurveRow>& rows, std::ostream& out) {
  out << "algorithm,budget,metric,value\n";
  out << std::setprecision(12);
  for (const auto& r : rows)
    out << r.algorithm << "," << r.budget << "," << r.metric << "," << r.value
        << "\n";
}

std::string config_hash(const std::string& canonical_flags) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical_flags) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace ipp
