#include "cli.h"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vpk/cartpole.h"
#include "vpk/correctness_problems.h"
#include "vpk/decision_tree.h"
#include "vpk/oracle.h"
#include "vpk/reachability.h"
#include "vpk/registry.h"
#include "vpk/repair.h"
#include "vpk/robustness.h"
#include "vpk/rollout.h"
#include "vpk/smtlib.h"
#include "vpk/sos.h"
#include "vpk/stability.h"
#include "vpk/sweep.h"
#include "vpk/toypong.h"
#include "vpk/viper.h"

namespace vpk::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Options shared by every subcommand.
struct Globals {
  std::uint64_t seed = 0;
  std::string out = ".";
  std::string config_path;
  json config = json::object();
  CLI::Option* seed_opt = nullptr;
};

// Values given on the command line win over the config file.
template <typename T>
void Merge(const CLI::Option* opt, const json& config, const char* key, T& value) {
  if (opt->count() == 0 && config.contains(key)) value = config.at(key).get<T>();
}

json ParseInlineOrFile(const std::string& text, const std::string& what) {
  if (text.empty()) return json::object();
  std::string body = text;
  if (text.front() != '{' && text.front() != '[') {
    std::ifstream in(text);
    if (!in) throw UsageError(what + " file not found: " + text);
    std::stringstream ss;
    ss << in.rdbuf();
    body = ss.str();
  }
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw UsageError(what + " is not valid JSON: " + e.what());
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void WriteJson(const fs::path& path, const json& j) { WriteText(path, j.dump(2) + "\n"); }

std::vector<int> ParseIntList(const std::string& text, const std::string& what) {
  std::vector<int> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(what + ": not an integer: " + item);
    }
  }
  if (values.empty()) throw UsageError(what + " is empty");
  return values;
}

// One state per line; a first line that does not parse as numbers is a header.
std::vector<StateVector> ReadStatesCsv(const std::string& path, int dim) {
  std::ifstream in(path);
  if (!in) throw UsageError("states file not found: " + path);
  std::vector<StateVector> states;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (line_no == 1) continue;
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": not a number");
    }
    if (static_cast<int>(row.size()) != dim) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(dim) + " values");
    }
    states.push_back(Eigen::Map<const Eigen::VectorXd>(row.data(), dim));
  }
  return states;
}

struct EnvOptions {
  std::string env;
  std::string params;
  CLI::Option* env_opt = nullptr;
  CLI::Option* params_opt = nullptr;

  void Add(CLI::App* app) {
    env_opt = app->add_option("--env", env, "Environment id");
    params_opt = app->add_option("--env-params", params, "Environment parameters (JSON or file)");
  }

  // Fills env id and parameters from the config when not given as flags.
  json Resolve(const json& config) {
    Merge(env_opt, config, "env", env);
    if (env.empty()) throw UsageError("--env is required");
    json p = params_opt->count() ? ParseInlineOrFile(params, "--env-params")
                                 : config.value("env_params", json::object());
    return p;
  }
};

void PrintVerdict(std::ostream& out, const Verdict& v) {
  out << "verdict: " << OutcomeName(v.outcome);
  if (v.outcome == Outcome::kCounterexample) {
    out << " at step " << v.violation_step << " (" << v.reason << ")";
    if (v.replay_ok) out << ", replay " << (*v.replay_ok ? "ok" : "FAILED");
  }
  out << ", " << v.nodes << " nodes\n";
}

int VerdictExit(const Verdict& v) {
  switch (v.outcome) {
    case Outcome::kSafe:
      return kOk;
    case Outcome::kCounterexample:
      return kCounterexample;
    case Outcome::kBudgetExceeded:
      return kInconclusive;
  }
  return kFailure;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Decision-tree policy extraction and verification");
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "Base random seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--config", g.config_path, "JSON configuration file");

  // extract
  CLI::App* extract = app.add_subcommand("extract", "Extract a decision tree from an oracle");
  EnvOptions ex_env;
  ex_env.Add(extract);
  std::string ex_oracle, ex_algo = "viper", ex_leaf;
  std::string ex_oracle_opts;
  int ex_iters = 10, ex_rollouts = 10, ex_depth = -1, ex_eval = -1;
  auto* ex_oracle_opt = extract->add_option("--oracle", ex_oracle, "lqr, ilqr, expert or a file");
  extract->add_option("--oracle-options", ex_oracle_opts, "Oracle settings (JSON or file)");
  auto* ex_algo_opt =
      extract->add_option("--algo", ex_algo)->check(CLI::IsMember({"viper", "dagger"}));
  auto* ex_iters_opt = extract->add_option("--iters", ex_iters, "Iterations N");
  auto* ex_rollouts_opt = extract->add_option("--rollouts", ex_rollouts, "Rollouts M per iteration");
  extract->add_option("--max-depth", ex_depth, "Tree depth limit");
  extract->add_option("--eval-rollouts", ex_eval, "Rollouts per candidate evaluation");
  extract->add_option("--leaf", ex_leaf)->check(CLI::IsMember({"discrete", "linear"}));

  // eval
  CLI::App* eval = app.add_subcommand("eval", "Mean reward of a tree or an oracle");
  EnvOptions ev_env;
  ev_env.Add(eval);
  std::string ev_tree, ev_oracle;
  int ev_rollouts = 100;
  eval->add_option("--tree", ev_tree, "Tree JSON");
  eval->add_option("--oracle", ev_oracle, "Oracle spec instead of a tree");
  eval->add_option("--rollouts", ev_rollouts)->check(CLI::PositiveNumber);

  // verify
  CLI::App* verify = app.add_subcommand("verify", "Verify a tree");
  verify->require_subcommand(1);
  CLI::App* robust = verify->add_subcommand("robust", "Max-norm robustness radius per state");
  std::string ro_tree, ro_states;
  robust->add_option("--tree", ro_tree)->required();
  robust->add_option("--states", ro_states, "CSV of states")->required();

  CLI::App* correct = verify->add_subcommand("correct", "Bounded-horizon correctness");
  EnvOptions co_env;
  co_env.Add(correct);
  std::string co_tree, co_region = "full";
  int co_tmax = -1;
  double co_y0 = 0.2094;
  std::int64_t co_budget = ReachOptions{}.node_budget;
  correct->add_option("--tree", co_tree)->required();
  correct->add_option("--tmax", co_tmax, "Horizon in steps");
  correct->add_option("--region", co_region, "toypong start set")
      ->check(CLI::IsMember({"full", "centered"}));
  correct->add_option("--y0", co_y0, "cartpole angle bound");
  correct->add_option("--budget", co_budget, "Maximum feasibility checks");

  CLI::App* stab = verify->add_subcommand("stability", "Region of attraction of a linear-leaf tree");
  EnvOptions st_env;
  st_env.Add(stab);
  std::string st_tree;
  int st_degree = 5;
  MaxRhoOptions st_opts;
  stab->add_option("--tree", st_tree)->required();
  stab->add_option("--degree", st_degree, "Taylor degree of the dynamics")
      ->check(CLI::IsMember({1, 3, 5}));
  stab->add_option("--delta", st_opts.certify.delta, "Excluded ball radius");
  stab->add_option("--margin", st_opts.certify.margin_c, "Required decrease rate");
  stab->add_option("--step-budget", st_opts.step_budget, "Boxes per bisection step");
  bool st_sos = false;
  stab->add_flag("--emit-sos", st_sos, "Also write the level-maximization SOS program");

  // benchmark
  CLI::App* bench = app.add_subcommand("benchmark", "Tree size versus reward sweep");
  EnvOptions be_env;
  be_env.Add(bench);
  std::string be_oracle, be_depths = "4,5,6,7,8,9,10,11,12,13,14,15,16", be_seeds;
  int be_iters = 10, be_rollouts = 10, be_eval = 20;
  auto* be_oracle_opt = bench->add_option("--oracle", be_oracle);
  auto* be_depths_opt = bench->add_option("--depths", be_depths, "Comma-separated max depths");
  auto* be_seeds_opt = bench->add_option("--seeds", be_seeds, "Comma-separated seeds");
  auto* be_iters_opt = bench->add_option("--iters", be_iters);
  auto* be_rollouts_opt = bench->add_option("--rollouts", be_rollouts);
  auto* be_eval_opt = bench->add_option("--eval-rollouts", be_eval);

  // repair
  CLI::App* repair = app.add_subcommand("repair", "Patch a toy-Pong tree or its parameters");
  EnvOptions re_env;
  re_env.Add(repair);
  std::string re_tree, re_patch, re_region = "full";
  std::int64_t re_budget = ReachOptions{}.node_budget;
  bool re_auto = false;
  repair->add_option("--tree", re_tree)->required();
  repair->add_option("--patch", re_patch, "Patch JSON or file");
  repair->add_flag("--guard-from-counterexample", re_auto,
                   "Derive a root guard from the current counterexample");
  repair->add_option("--region", re_region)->check(CLI::IsMember({"full", "centered"}));
  repair->add_option("--budget", re_budget);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (!g.config_path.empty()) g.config = ParseInlineOrFile(g.config_path, "--config");
    Merge(g.seed_opt, g.config, "seed", g.seed);
    const fs::path out_dir = g.out;
    fs::create_directories(out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    auto seconds = [&] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    if (*extract) {
      const json params = ex_env.Resolve(g.config);
      Merge(ex_oracle_opt, g.config, "oracle", ex_oracle);
      Merge(ex_algo_opt, g.config, "algo", ex_algo);
      if (ex_oracle.empty()) throw UsageError("--oracle is required");
      auto env = MakeEnvironment(ex_env.env, params);
      const json oracle_opts = ex_oracle_opts.empty()
                                   ? g.config.value("oracle_options", json::object())
                                   : ParseInlineOrFile(ex_oracle_opts, "--oracle-options");
      auto oracle = MakeOracle(ex_oracle, *env, oracle_opts);
      ExtractionConfig cfg =
          ExtractionConfig::FromJson(g.config.value("extraction", json::object()));
      if (ex_iters_opt->count() || !g.config.contains("extraction")) cfg.iterations = ex_iters;
      if (ex_rollouts_opt->count() || !g.config.contains("extraction")) cfg.rollouts = ex_rollouts;
      if (ex_depth >= 0) cfg.tree.max_depth = ex_depth;
      if (ex_eval >= 0) cfg.eval_rollouts = ex_eval;
      if (ex_leaf == "linear") cfg.tree.leaf_kind = LeafKind::kLinear;
      if (ex_leaf == "discrete") cfg.tree.leaf_kind = LeafKind::kDiscrete;
      cfg.seed = g.seed;
      const ExtractionResult r =
          ex_algo == "viper" ? Viper(*env, *oracle, cfg) : Dagger(*env, *oracle, cfg);
      SaveTree(r.best, (out_dir / "tree.json").string());
      WriteText(out_dir / "report.csv", ReportCsv(r.report));
      const IterationReport& best = r.report.at(r.best_index);
      out << ex_algo << ": best tree from iteration " << best.iteration << ", "
          << best.tree_nodes << " nodes, mean reward " << best.mean_eval_reward << "\n";
      for (const std::string& w : r.warnings) err << "warning: " << w << "\n";
      out << "wrote " << (out_dir / "tree.json").string() << " and "
          << (out_dir / "report.csv").string() << " (" << seconds() << " s)\n";
      return kOk;
    }

    if (*eval) {
      const json params = ev_env.Resolve(g.config);
      auto env = MakeEnvironment(ev_env.env, params);
      if (ev_tree.empty() == ev_oracle.empty()) {
        throw UsageError("eval needs exactly one of --tree and --oracle");
      }
      Policy policy;
      if (!ev_tree.empty()) {
        policy = TreePolicy(std::make_shared<const DecisionTree>(LoadTree(ev_tree)));
      } else {
        policy = AsPolicy(MakeOracle(ev_oracle, *env, g.config.value("oracle_options", json{})));
      }
      const double mean = MeanReward(*env, policy, ev_rollouts, g.seed);
      WriteJson(out_dir / "eval.json",
                {{"env", ev_env.env}, {"rollouts", ev_rollouts}, {"seed", g.seed},
                 {"mean_reward", mean}});
      out << "mean reward " << mean << " over " << ev_rollouts << " rollouts\n";
      return kOk;
    }

    if (*robust) {
      const DecisionTree tree = LoadTree(ro_tree);
      const std::vector<StateVector> states = ReadStatesCsv(ro_states, tree.dim());
      const std::vector<RobustnessRow> rows = RobustnessBatch(tree, states);
      WriteText(out_dir / "robustness.csv", RobustnessCsv(rows, tree.dim(), false));
      double total_us = 0.0;
      for (const RobustnessRow& row : rows) total_us += row.microseconds;
      out << rows.size() << " queries, mean " << (rows.empty() ? 0.0 : total_us / rows.size())
          << " us per query\n";
      return kOk;
    }

    if (*correct) {
      const json params = co_env.Resolve(g.config);
      const DecisionTree tree = LoadTree(co_tree);
      ReachOptions options;
      options.node_budget = co_budget;
      Verdict v;
      std::string smt;
      if (co_env.env == "toypong") {
        const ToyPongParams p = ToyPongParams::FromJson(params);
        SafetySpec spec =
            ToyPongSpec(p, co_region == "centered" ? ToyPongRegion::kCentered : ToyPongRegion::kFull);
        if (co_tmax > 0) spec.t_max = co_tmax;
        const PiecewiseAffineSystem system = ToyPongClosedLoop(p, tree);
        v = ReachCheck(system, spec, options);
        if (v.outcome == Outcome::kCounterexample) {
          v.replay_ok = ReplayCounterexample(v.trace[0], ToyPongTreeStep(p, tree), spec);
        }
        smt = EncodeSmtLib(system, spec);
      } else if (co_env.env == "cartpole") {
        const CartPoleParams p = CartPoleParams::FromJson(params);
        const int t_max = co_tmax > 0 ? co_tmax : 10;
        v = CartPoleBoundedCheck(p, tree, co_y0, t_max, options);
        smt = EncodeSmtLib(CartPoleLinearClosedLoop(p, tree), CartPoleSafetySpec(p, co_y0, t_max));
      } else {
        throw UsageError("verify correct supports toypong and cartpole");
      }
      json report = v.ToJson();
      WriteText(out_dir / "problem.smt2", smt);
      if (const auto cmd = SolverCommandFromEnv()) {
        const SolverResult sr = RunSolver(smt, *cmd);
        const char* names[] = {"sat", "unsat", "unknown", "error"};
        report["solver"] = names[static_cast<int>(sr.status)];
        out << "external solver: " << names[static_cast<int>(sr.status)] << "\n";
      }
      WriteJson(out_dir / "verdict.json", report);
      PrintVerdict(out, v);
      return VerdictExit(v);
    }

    if (*stab) {
      const json params = st_env.Resolve(g.config);
      if (st_env.env != "cartpole") throw UsageError("verify stability supports cartpole");
      const CartPoleParams p = CartPoleParams::FromJson(params);
      const DecisionTree tree = LoadTree(st_tree);
      st_opts.seed = g.seed;
      const StabilityResult r = TreeRoa(tree, CartPoleTaylor(p, st_degree), st_opts);
      if (r.certificate) {
        json j = r.certificate->ToJson();
        WriteJson(out_dir / "certificate.json", j);
        if (st_sos) {
          const Eigen::VectorXd& coef = tree.nodes()[r.certificate->leaf_node].coef;
          WriteText(out_dir / "roa.sos",
                    EmitRoaSos(r.certificate->P, CloseLoop(CartPoleTaylor(p, st_degree), coef))
                        .ToText());
        }
        out << "certified rho " << r.certificate->rho << " (" << r.total_boxes << " boxes, "
            << seconds() << " s)\n";
        out << "contains the cube |s|_inf <= 0.01: "
            << (SublevelContainsCube(r.certificate->P, r.certificate->rho, 0.01) ? "yes" : "no")
            << "\n";
        return kOk;
      }
      if (r.refutation) {
        std::vector<double> point(r.refutation->data(),
                                  r.refutation->data() + r.refutation->size());
        WriteJson(out_dir / "refutation.json", {{"point", point}, {"message", r.message}});
        out << "refuted: " << r.message << "\n";
        return kCounterexample;
      }
      out << "no certificate: " << r.message << "\n";
      return kInconclusive;
    }

    if (*bench) {
      const json params = be_env.Resolve(g.config);
      Merge(be_oracle_opt, g.config, "oracle", be_oracle);
      Merge(be_depths_opt, g.config, "depths", be_depths);
      Merge(be_seeds_opt, g.config, "seeds", be_seeds);
      Merge(be_iters_opt, g.config, "iterations", be_iters);
      Merge(be_rollouts_opt, g.config, "rollouts", be_rollouts);
      Merge(be_eval_opt, g.config, "eval_rollouts", be_eval);
      if (be_oracle.empty()) throw UsageError("--oracle is required");
      auto env = MakeEnvironment(be_env.env, params);
      auto oracle = MakeOracle(be_oracle, *env, g.config.value("oracle_options", json::object()));
      SweepConfig sc;
      sc.extraction = ExtractionConfig::FromJson(g.config.value("extraction", json::object()));
      sc.extraction.iterations = be_iters;
      sc.extraction.rollouts = be_rollouts;
      sc.depths = ParseIntList(be_depths, "--depths");
      if (be_seeds.empty()) {
        sc.seeds = {g.seed};
      } else {
        for (int s : ParseIntList(be_seeds, "--seeds")) sc.seeds.push_back(s);
      }
      sc.eval_rollouts = be_eval;
      sc.eval_seed = DeriveSeed(g.seed, 1000);
      const std::vector<SweepPoint> points = RunSweep(*env, *oracle, sc);
      WriteText(out_dir / "sweep.csv", SweepCsv(points));
      const std::vector<ThresholdRow> rows = CompareAtThresholds(points);
      WriteText(out_dir / "thresholds.csv", ThresholdCsv(rows));
      out << points.size() << " runs, " << rows.size() << " shared reward thresholds ("
          << seconds() << " s)\n";
      return kOk;
    }

    if (*repair) {
      const json params = re_env.Resolve(g.config);
      if (re_env.env != "toypong") throw UsageError("repair supports toypong");
      const ToyPongParams p = ToyPongParams::FromJson(params);
      const DecisionTree tree = LoadTree(re_tree);
      const ToyPongRegion region =
          re_region == "centered" ? ToyPongRegion::kCentered : ToyPongRegion::kFull;
      ReachOptions options;
      options.node_budget = re_budget;
      Patch patch;
      if (re_auto == !re_patch.empty()) {
        throw UsageError("repair needs exactly one of --patch and --guard-from-counterexample");
      }
      if (re_auto) {
        const Verdict before = ReachCheck(ToyPongClosedLoop(p, tree), ToyPongSpec(p, region), options);
        if (before.outcome != Outcome::kCounterexample) {
          out << "no counterexample to repair (" << OutcomeName(before.outcome) << ")\n";
          return VerdictExit(before);
        }
        patch = RootGuardFromCounterexample(before);
      } else {
        try {
          patch = PatchFromJson(ParseInlineOrFile(re_patch, "--patch"));
        } catch (const std::invalid_argument& e) {
          throw UsageError(e.what());
        }
      }
      const RepairReport r = RepairToyPong(p, tree, region, patch, options);
      SaveTree(r.tree, (out_dir / "repaired_tree.json").string());
      WriteJson(out_dir / "repair.json", r.ToJson());
      out << "before: " << OutcomeName(r.before.outcome) << ", after: "
          << OutcomeName(r.after.outcome) << (r.verdict_changed ? " (changed)" : " (unchanged)")
          << "\n";
      return VerdictExit(r.after);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace vpk::cli
