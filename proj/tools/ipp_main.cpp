#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ipp/greedy.hpp"
#include "ipp/io.hpp"
#include "ipp/multi.hpp"
#include "ipp/rgreedy.hpp"
#include "ipp/synth.hpp"

namespace {

using namespace ipp;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct PlanFlags {
  std::string data;
  std::size_t value_col = 0;
  LocationId start = 0;
  LocationId finish = 0;
  double budget = 0.0;
  std::string algo = "esip";
  double cell_width = 0.0;
  std::size_t cells = 0;
  std::string split = "exp";
  bool bnb = true;
  double alpha = 1.0;
  std::size_t topk = 0;
  double time_limit = -1.0;
  std::uint64_t seed = 0;
  int threads = 1;
  int iter = 3;
  double resolution = 0.0;
  double experiment_cost = 1.0;
  double sf2 = 0.0;
  double lengthscale = 0.0;
  double noise = 0.0;
  std::size_t max_brute = 12;
  std::string trace_file;
  std::string out_file;
};

void add_plan_flags(CLI::App* cmd, PlanFlags& f) {
  cmd->add_option("--data", f.data, "input CSV (id,x,y,value[,value2,...])")
      ->required();
  cmd->add_option("--value-col", f.value_col,
                  "0-based measurement column used for the model");
  cmd->add_option("--start", f.start, "start location id")->required();
  cmd->add_option("--finish", f.finish, "finish location id")->required();
  cmd->add_option("--budget", f.budget, "path budget B")->required();
  cmd->add_option("--algo", f.algo,
                  "esip|rgreedy|greedy-bc|greedy-r|uniform|brute")
      ->check(CLI::IsMember(
          {"esip", "rgreedy", "greedy-bc", "greedy-r", "uniform", "brute"}));
  cmd->add_option("--cell-width", f.cell_width, "cell width L in meters");
  cmd->add_option("--cells", f.cells,
                  "target nonempty cell count (alternative to --cell-width)");
  cmd->add_option("--split", f.split, "linear|exp|exp1")
      ->check(CLI::IsMember({"linear", "exp", "exp1"}));
  cmd->add_flag("--bnb,!--no-bnb", f.bnb, "branch-and-bound pruning");
  cmd->add_option("--alpha", f.alpha, "lower-bound scaling (>= 1)");
  cmd->add_option("--topk", f.topk, "explore only the best K children (0=all)");
  cmd->add_option("--time-limit", f.time_limit, "search time limit, seconds");
  cmd->add_option("--seed", f.seed, "seed echoed into the report");
  cmd->add_option("--threads", f.threads,
                  "threads for gain evaluation (output unchanged)");
  cmd->add_option("--iter", f.iter, "recursion depth for --algo rgreedy");
  cmd->add_option("--resolution", f.resolution,
                  "budget quantization override");
  cmd->add_option("--experiment-cost", f.experiment_cost,
                  "sensing cost per observation (same units as travel)");
  cmd->add_option("--sf2", f.sf2, "kernel signal variance (skips fitting)");
  cmd->add_option("--lengthscale", f.lengthscale,
                  "kernel lengthscale in meters (skips fitting)");
  cmd->add_option("--noise", f.noise, "kernel noise variance (skips fitting)");
  cmd->add_option("--max-brute", f.max_brute,
                  "size guard for --algo brute");
  cmd->add_option("--trace", f.trace_file, "write search trace (JSON lines)");
  cmd->add_option("--out", f.out_file, "report file (default stdout)");
}

std::string canonical_flags(const PlanFlags& f, int robots,
                            const std::string& starts,
                            const std::string& finishes) {
  std::ostringstream os;
  os << "algo=" << f.algo << ";budget=" << f.budget << ";start=" << f.start
     << ";finish=" << f.finish << ";cells=" << f.cells
     << ";cell_width=" << f.cell_width << ";split=" << f.split
     << ";bnb=" << f.bnb << ";alpha=" << f.alpha << ";topk=" << f.topk
     << ";iter=" << f.iter << ";resolution=" << f.resolution
     << ";exp_cost=" << f.experiment_cost << ";value_col=" << f.value_col
     << ";robots=" << robots << ";starts=" << starts
     << ";finishes=" << finishes << ";seed=" << f.seed;
  return os.str();
}

struct Planner {
  Dataset dataset;
  SensingDomain domain;
  CellGrid grid;
  ModelBuild model;
  std::shared_ptr<const RewardFunction> reward;
  EsipOptions esip_opts;
  SearchTrace trace;
  PlanFlags flags;
};

std::unique_ptr<Planner> setup(const PlanFlags& f) {
  Dataset ds = ingest_csv(f.data);
  SensingDomain dom = to_domain(ds, f.experiment_cost);

  double width = f.cell_width;
  if (width <= 0.0) {
    width = f.cells > 0 ? cell_width_for_count(dom, f.cells)
                        : cell_width_for_count(dom, 20);
  }
  CellGrid grid = build_grid(dom, width);

  std::optional<SEKernelParams> params;
  if (f.sf2 > 0.0 && f.lengthscale > 0.0)
    params = SEKernelParams{f.sf2, f.lengthscale, f.noise};
  ModelBuild mb = build_model(ds, f.value_col, params);

  auto planner = std::make_unique<Planner>(Planner{
      std::move(ds), std::move(dom), std::move(grid), mb,
      std::make_shared<MutualInformationReward>(mb.model), EsipOptions{},
      SearchTrace{}, f});

  EsipOptions& opts = planner->esip_opts;
  opts.schedule.kind = f.split == "linear"
                           ? SplitKind::linear
                           : (f.split == "exp1" ? SplitKind::exp_one_sided
                                                : SplitKind::exp_two_sided);
  opts.bnb.enabled = f.bnb;
  opts.bnb.alpha = f.alpha;
  opts.bnb.top_k = f.topk;
  if (f.time_limit >= 0.0) opts.bnb.time_limit_seconds = f.time_limit;
  if (f.resolution > 0.0) opts.cost_quantum = f.resolution;
  opts.threads = f.threads;
  opts.trace = &planner->trace;
  return planner;
}

std::optional<PlanResult> run_single(Planner& p, const PlanQuery& query,
                                     const IdSet& committed) {
  const PlanFlags& f = p.flags;
  const auto committed_reward = residual(p.reward, committed);

  auto from_path = [&](const std::optional<Path>& path)
      -> std::optional<PlanResult> {
    if (!path) return std::nullopt;
    PlanResult res;
    res.path = *path;
    res.cost = path_cost(*path, p.domain);
    const IdSet visited = path->visited();
    res.reward = committed_reward->evaluable(visited)
                     ? committed_reward->eval(visited)
                     : 0.0;
    res.search_reward = res.reward;
    return res;
  };

  if (f.algo == "esip") {
    return esip_plan(p.domain, p.grid, p.reward, query, committed,
                     p.esip_opts);
  }
  if (f.algo == "rgreedy") {
    RecursiveGreedyOptions opts;
    if (f.resolution > 0.0) opts.resolution = f.resolution;
    opts.max_locations = std::max<std::size_t>(32, p.domain.size());
    return from_path(
        recursive_greedy(p.domain, *p.reward, query, f.iter, committed, opts));
  }
  if (f.algo == "greedy-bc")
    return from_path(greedy_benefit_cost(p.domain, *committed_reward, query));
  if (f.algo == "greedy-r")
    return from_path(greedy_reward(p.domain, *committed_reward, query));
  if (f.algo == "uniform")
    return from_path(
        uniform_density_baseline(p.domain, p.grid, p.reward, query, committed));
  if (f.algo == "brute") {
    BruteForceOptions opts;
    opts.max_locations = f.max_brute;
    return from_path(
        brute_force_path(p.domain, *committed_reward, query, opts));
  }
  throw std::runtime_error("unknown algorithm " + f.algo);
}

ReportRobot make_report_robot(const Planner& p, const PlanQuery& query,
                              const PlanResult& res, double stage_gain) {
  ReportRobot r;
  r.query = query;
  r.path = res.path.nodes;
  for (LocationId id : res.path.nodes) {
    const Location& loc = p.domain.location(id);
    r.coordinates.emplace_back(loc.x, loc.y);
  }
  double travel = 0.0;
  for (std::size_t i = 1; i < res.path.nodes.size(); ++i)
    travel += p.domain.travel_cost(res.path.nodes[i - 1], res.path.nodes[i]);
  r.travel_cost = travel;
  r.sensing_cost = path_cost(res.path, p.domain) - travel;
  r.reward = stage_gain;
  r.iterations = res.iterations;
  return r;
}

void finish_report(Planner& p, PlanReport& report, const std::string& canon,
                   double wall_seconds) {
  report.algorithm = p.flags.algo;
  report.seed = p.flags.seed;
  report.config_hash = config_hash(canon);
  report.trace_nodes = p.trace.records().size();
  report.trace_pruned = p.trace.pruned_count();
  report.wall_time_seconds = wall_seconds;

  if (!p.flags.trace_file.empty()) {
    std::ofstream out(p.flags.trace_file);
    if (!out) throw IoError(p.flags.trace_file + ": cannot open for writing");
    p.trace.write_jsonl(out);
  }
  if (p.flags.out_file.empty()) {
    write_report(report, std::cout);
  } else {
    std::ofstream out(p.flags.out_file);
    if (!out) throw IoError(p.flags.out_file + ": cannot open for writing");
    write_report(report, out);
  }
}

int cmd_plan(const PlanFlags& flags) {
  auto planner = setup(flags);
  const PlanQuery query{flags.start, flags.finish, flags.budget};
  const auto t0 = std::chrono::steady_clock::now();
  auto res = run_single(*planner, query, {});
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  if (!res) {
    std::cerr << "infeasible: no path within budget\n";
    return kExitInfeasible;
  }
  PlanReport report;
  report.robots.push_back(
      make_report_robot(*planner, query, *res, res->reward));
  report.joint_reward = res->reward;
  finish_report(*planner, report, canonical_flags(flags, 1, "", ""), wall);
  return kExitOk;
}

std::vector<LocationId> parse_id_list(const std::string& s) {
  std::vector<LocationId> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

int cmd_plan_multi(const PlanFlags& flags, int robots,
                   const std::string& starts_csv,
                   const std::string& finishes_csv,
                   const std::string& select_starts_csv) {
  auto planner = setup(flags);
  Planner& p = *planner;

  std::vector<LocationId> starts = parse_id_list(starts_csv);
  std::vector<LocationId> finishes = parse_id_list(finishes_csv);

  const auto t0 = std::chrono::steady_clock::now();
  if (!select_starts_csv.empty()) {
    const auto candidates = parse_id_list(select_starts_csv);
    starts = select_starts_greedy(
        *p.reward, candidates, robots,
        [&](LocationId start, const IdSet& committed) {
          return run_single(p, PlanQuery{start, start, flags.budget},
                            committed);
        });
    finishes = starts;
  }

  MultiRobotQuery query;
  for (int i = 0; i < robots; ++i) {
    PlanQuery q;
    q.start = i < static_cast<int>(starts.size()) ? starts[i] : flags.start;
    q.finish =
        i < static_cast<int>(finishes.size()) ? finishes[i] : flags.finish;
    q.budget = flags.budget;
    query.robots.push_back(q);
  }

  MultiRobotPlan plan = sequential_allocation(
      p.domain, *p.reward, query,
      [&](const PlanQuery& q, const IdSet& committed) {
        return run_single(p, q, committed);
      });
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  PlanReport report;
  for (std::size_t i = 0; i < plan.stages.size(); ++i) {
    report.robots.push_back(make_report_robot(p, query.robots[i],
                                              plan.stages[i].result,
                                              plan.stages[i].stage_gain));
  }
  report.joint_reward = plan.joint_reward;
  std::ostringstream starts_os, finishes_os;
  for (const auto& q : query.robots) {
    starts_os << q.start << " ";
    finishes_os << q.finish << " ";
  }
  finish_report(p, report,
                canonical_flags(flags, robots, starts_os.str(),
                                finishes_os.str()),
                wall);
  return kExitOk;
}

int cmd_gen_synth(const std::string& preset, SynthSpec spec,
                  const std::string& out_file) {
  if (preset == "lake") {
    spec = lake_preset(spec.seed);
  } else if (preset == "berkeley") {
    spec = berkeley_preset(spec.seed);
  } else if (preset == "precip") {
    spec = precip_preset(spec.seed);
  } else if (!preset.empty()) {
    throw std::runtime_error("unknown preset " + preset);
  }
  const Dataset ds = gen_synth(spec);
  if (out_file.empty()) {
    write_csv(ds, std::cout);
  } else {
    emit_csv(ds, out_file);
  }
  return kExitOk;
}

int cmd_eval_rmse(const PlanFlags& flags, const std::string& report_file,
                  std::size_t heldout_col) {
  auto planner = setup(flags);
  std::ifstream in(report_file);
  if (!in) throw IoError(report_file + ": cannot open");
  const PlanReport report = parse_report(in);

  std::vector<LocationId> observed;
  for (const auto& robot : report.robots)
    observed.insert(observed.end(), robot.path.begin(), robot.path.end());
  const double rmse = eval_rmse(planner->dataset, heldout_col,
                                IdSet(std::move(observed)), planner->model);
  std::cout << "rmse: " << rmse << "\n";
  return kExitOk;
}

int cmd_sweep(const PlanFlags& flags, const std::string& budgets_csv,
              const std::string& algos_csv, const std::string& out_file) {
  std::vector<double> budgets;
  {
    std::stringstream ss(budgets_csv);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) budgets.push_back(std::stod(item));
  }
  std::vector<std::string> algos;
  {
    std::stringstream ss(algos_csv);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) algos.push_back(item);
  }

  std::vector<CurveRow> rows;
  for (const std::string& algo : algos) {
    for (double budget : budgets) {
      PlanFlags f = flags;
      f.algo = algo;
      f.budget = budget;
      auto planner = setup(f);
      const PlanQuery query{f.start, f.finish, budget};
      const auto t0 = std::chrono::steady_clock::now();
      auto res = run_single(*planner, query, {});
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count();
      if (!res) continue;
      rows.push_back({algo, budget, "reward", res->reward});
      rows.push_back({algo, budget, "path_cost", res->cost});
      rows.push_back({algo, budget, "wall_time_s", wall});
    }
  }
  if (out_file.empty()) {
    emit_curves(rows, std::cout);
  } else {
    std::ofstream out(out_file);
    if (!out) throw IoError(out_file + ": cannot open for writing");
    emit_curves(rows, out);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"informative path planning over Gaussian-process models"};
  app.require_subcommand(1);

  PlanFlags plan_flags;
  auto* plan_cmd = app.add_subcommand("plan", "plan one robot path");
  add_plan_flags(plan_cmd, plan_flags);

  PlanFlags multi_flags;
  int robots = 1;
  std::string starts_csv, finishes_csv, select_starts_csv;
  auto* multi_cmd =
      app.add_subcommand("plan-multi", "plan paths for several robots");
  add_plan_flags(multi_cmd, multi_flags);
  multi_cmd->add_option("--robots", robots, "number of robots")->required();
  multi_cmd->add_option("--starts", starts_csv, "per-robot start ids, comma separated");
  multi_cmd->add_option("--finishes", finishes_csv,
                        "per-robot finish ids, comma separated");
  multi_cmd->add_option("--select-starts", select_starts_csv,
                        "candidate start ids; greedy assignment per robot");

  SynthSpec synth_spec;
  std::string synth_preset, synth_out;
  auto* synth_cmd = app.add_subcommand("gen-synth", "generate a synthetic dataset");
  synth_cmd->add_option("--seed", synth_spec.seed, "rng seed");
  synth_cmd->add_option("--n", synth_spec.locations, "number of locations");
  synth_cmd->add_option("--width", synth_spec.width, "field width, meters");
  synth_cmd->add_option("--height", synth_spec.height, "field height, meters");
  synth_cmd->add_option("--sf2", synth_spec.kernel.signal_variance,
                        "kernel signal variance");
  synth_cmd->add_option("--lengthscale", synth_spec.kernel.lengthscale,
                        "kernel lengthscale, meters");
  synth_cmd->add_option("--noise", synth_spec.kernel.noise_variance,
                        "kernel noise variance");
  synth_cmd->add_option("--scans", synth_spec.scans, "measurement columns");
  synth_cmd->add_option("--preset", synth_preset, "lake|berkeley|precip");
  synth_cmd->add_option("--out", synth_out, "output CSV (default stdout)");

  PlanFlags rmse_flags;
  std::string rmse_report;
  std::size_t rmse_col = 0;
  auto* rmse_cmd =
      app.add_subcommand("eval-rmse", "prediction error of a plan report");
  add_plan_flags(rmse_cmd, rmse_flags);
  rmse_cmd->add_option("--report", rmse_report, "plan report file")->required();
  rmse_cmd->add_option("--heldout-col", rmse_col,
                       "0-based held-out measurement column");

  PlanFlags sweep_flags;
  std::string sweep_budgets, sweep_algos = "esip", sweep_out;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "reward/time curves over budgets");
  add_plan_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--budgets", sweep_budgets, "comma-separated budgets")
      ->required();
  sweep_cmd->add_option("--algos", sweep_algos, "comma-separated algorithms");
  sweep_cmd->add_option("--curves-out", sweep_out,
                        "curves CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan_cmd->parsed()) return cmd_plan(plan_flags);
    if (multi_cmd->parsed())
      return cmd_plan_multi(multi_flags, robots, starts_csv, finishes_csv,
                            select_starts_csv);
    if (synth_cmd->parsed())
      return cmd_gen_synth(synth_preset, synth_spec, synth_out);
    if (rmse_cmd->parsed())
      return cmd_eval_rmse(rmse_flags, rmse_report, rmse_col);
    if (sweep_cmd->parsed())
      return cmd_sweep(sweep_flags, sweep_budgets, sweep_algos, sweep_out);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
