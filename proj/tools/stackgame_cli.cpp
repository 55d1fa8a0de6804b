#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "stackgame/experiments.hpp"
#include "stackgame/game_io.hpp"
#include "stackgame/omp.hpp"
#include "stackgame/simulate.hpp"

namespace {

using namespace stackgame;

struct GameInput {
  std::string fixed;  // "high-risk" | "play-safe"
  std::string path;
  std::string constraint;  // optional override
};

void add_game_options(CLI::App* cmd, GameInput& input) {
  auto* fixed = cmd->add_option("--fixed", input.fixed, "built-in game: high-risk or play-safe")
                    ->check(CLI::IsMember({"high-risk", "play-safe"}));
  auto* file = cmd->add_option("--game", input.path, "game file (JSON)");
  fixed->excludes(file);
  cmd->add_option("--constraint", input.constraint, "override the cost constraint: c1 or c2")
      ->check(CLI::IsMember({"c1", "c2"}));
}

Game resolve_game(const GameInput& input) {
  std::optional<Game> game;
  if (!input.fixed.empty()) {
    game = fixed_game(input.fixed == "high-risk" ? FixedGameName::HighRisk
                                                 : FixedGameName::PlaySafe);
  } else if (!input.path.empty()) {
    game = load_game(input.path);
  } else {
    throw CLI::ValidationError("either --fixed or --game is required");
  }
  if (!input.constraint.empty()) game->constraint = constraint_from_name(input.constraint);
  return std::move(*game);
}

nlohmann::json solution_to_json(const OmpSolution& s) {
  nlohmann::json j;
  j["l"] = s.manipulation.leader_action + 1;
  j["f"] = s.manipulation.target + 1;
  j["cost"] = s.manipulation.cost;
  j["leader_utility"] = s.leader_utility;
  j["beneficial"] = s.beneficial;
  return j;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    try {
      out.push_back(std::stoi(text.substr(pos, comma - pos)));
    } catch (const std::exception&) {
      throw CLI::ValidationError(std::string("bad ") + what + " list: " + text);
    }
    pos = comma + 1;
  }
  if (out.empty()) throw CLI::ValidationError(std::string("empty ") + what + " list");
  return out;
}

std::vector<std::string> split_names(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    if (comma > pos) out.push_back(text.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repeated multi-objective Stackelberg games with payoff manipulation"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "draw a uniform random game and print it");
  std::size_t gen_dims = 2, gen_nl = 2, gen_nf = 2;
  std::string gen_constraint = "c1", gen_utility = "linear", gen_out;
  std::uint64_t gen_seed = 1;
  generate->add_option("--dims", gen_dims, "number of objectives (default 2)");
  generate->add_option("--leader-actions", gen_nl, "leader actions (default 2)");
  generate->add_option("--follower-actions", gen_nf, "follower actions (default 2)");
  generate->add_option("--constraint", gen_constraint, "c1 or c2")
      ->check(CLI::IsMember({"c1", "c2"}));
  generate->add_option("--utility", gen_utility, "linear or cobb-douglas")
      ->check(CLI::IsMember({"linear", "cobb-douglas"}));
  generate->add_option("--seed", gen_seed, "generator seed (default 1)");
  generate->add_option("--out", gen_out, "output file (default stdout)");

  // solve
  auto* solve = app.add_subcommand("solve", "print the optimal manipulation as JSON");
  GameInput solve_input;
  add_game_options(solve, solve_input);
  bool solve_brute = false;
  double solve_step = 0.01;
  solve->add_flag("--brute-force", solve_brute, "use the grid-search reference solver");
  solve->add_option("--step", solve_step, "grid step for --brute-force (default 0.01)");

  // run
  auto* run = app.add_subcommand("run", "play one episode and print the cumulative regret");
  GameInput run_input;
  add_game_options(run, run_input);
  std::string run_policy = "longeu+pfr", run_belief = "linear", run_out, run_csv, run_region;
  int run_T = 0;
  std::uint64_t run_seed = 1;
  std::size_t run_samples = 512;
  bool run_known_brs = false;
  run->add_option("--policy", run_policy,
                  "nomanip or <eu|longeu|longeuplus>+<pfr|rwmc|mwmc> (default longeu+pfr)");
  run->add_option("--T", run_T, "rounds to play (default: the game's horizon)");
  run->add_option("--seed", run_seed, "episode seed (default 1)");
  run->add_option("--samples", run_samples, "region samples per decision (default 512)");
  run->add_option("--belief", run_belief, "belief model: linear or cobb-douglas")
      ->check(CLI::IsMember({"linear", "cobb-douglas"}));
  run->add_flag("--known-brs", run_known_brs, "start with every best response known");
  run->add_option("--out", run_out, "write the trace as JSON lines");
  run->add_option("--csv", run_csv, "write the trace as CSV");
  run->add_option("--dump-region", run_region, "write the final belief region as JSON");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "replicated runs with a summary CSV");
  std::string exp_config, exp_generator = "uniform", exp_policies = "longeu+pfr",
              exp_horizons = "40", exp_constraint = "c2", exp_utility = "linear",
              exp_belief = "linear", exp_out, exp_traces, exp_game_file;
  std::size_t exp_dims = 2, exp_nl = 2, exp_nf = 2, exp_samples = 512;
  int exp_reps = 1, exp_workers = 1;
  std::uint64_t exp_seed = 1;
  bool exp_known_brs = false;
  experiment->add_option("--config", exp_config, "JSON config file (inline flags override)");
  experiment->add_option("--generator", exp_generator, "uniform, high-risk, play-safe or file");
  experiment->add_option("--game", exp_game_file, "game file for --generator file");
  experiment->add_option("--dims", exp_dims, "objectives for random games");
  experiment->add_option("--leader-actions", exp_nl, "leader actions for random games");
  experiment->add_option("--follower-actions", exp_nf, "follower actions for random games");
  experiment->add_option("--policies", exp_policies, "comma-separated policy list");
  experiment->add_option("--horizons", exp_horizons, "comma-separated horizon list");
  experiment->add_option("--constraint", exp_constraint, "c1 or c2")
      ->check(CLI::IsMember({"c1", "c2"}));
  experiment->add_option("--utility", exp_utility, "linear or cobb-douglas")
      ->check(CLI::IsMember({"linear", "cobb-douglas"}));
  experiment->add_option("--belief", exp_belief, "belief model for all policies")
      ->check(CLI::IsMember({"linear", "cobb-douglas"}));
  experiment->add_option("--reps", exp_reps, "replications per cell (default 1)");
  experiment->add_option("--seed", exp_seed, "base seed (default 1)");
  experiment->add_option("--samples", exp_samples, "region samples per decision");
  experiment->add_option("--workers", exp_workers, "parallel workers (output-independent)");
  experiment->add_flag("--known-brs", exp_known_brs, "start every episode with known BRs");
  experiment->add_option("--out", exp_out, "summary CSV path");
  experiment->add_option("--traces-dir", exp_traces, "directory for raw JSONL traces");

  // inspect
  auto* inspect = app.add_subcommand("inspect", "print a game with derived facts");
  GameInput inspect_input;
  add_game_options(inspect, inspect_input);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      Game game = generate_uniform_game(gen_dims, gen_nl, gen_nf,
                                        constraint_from_name(gen_constraint),
                                        utility_kind_from_name(gen_utility), gen_seed);
      if (gen_out.empty()) {
        std::cout << game_to_json(game).dump(2) << "\n";
      } else {
        save_game(game, gen_out);
      }
      return 0;
    }

    if (*solve) {
      Game game = resolve_game(solve_input);
      OmpSolution solution =
          solve_brute ? brute_force_omp(game, solve_step) : solve_omp(game);
      std::cout << solution_to_json(solution).dump() << "\n";
      return 0;
    }

    if (*run) {
      Game game = resolve_game(run_input);
      PolicySpec spec = PolicySpec::parse(run_policy);
      spec.belief_kind = utility_kind_from_name(run_belief);
      spec.validate();
      int T = run_T > 0 ? run_T : game.horizon;
      EpisodeOptions options;
      options.samples = run_samples;
      options.preseed_known_brs = run_known_brs;
      options.keep_region_detail = !run_region.empty();
      Trace trace = run_episode(game, spec, T, run_seed, options);
      if (!run_out.empty()) {
        std::ofstream out(run_out);
        if (!out) throw std::runtime_error("cannot write trace file: " + run_out);
        write_trace_jsonl(trace, out);
      }
      if (!run_csv.empty()) {
        std::ofstream out(run_csv);
        if (!out) throw std::runtime_error("cannot write csv file: " + run_csv);
        write_trace_csv(trace, out);
      }
      if (!run_region.empty()) {
        nlohmann::json region;
        nlohmann::json constraints = nlohmann::json::array();
        for (const auto& c : trace.final_region.constraints)
          constraints.push_back({{"normal", c.normal}, {"strict", c.strict}});
        region["constraints"] = constraints;
        if (trace.final_region.w1_lo)
          region["w1_interval"] = {*trace.final_region.w1_lo, *trace.final_region.w1_hi};
        region["centroid"] = trace.final_region.centroid;
        region["samples"] = trace.final_region.sample_cloud;
        std::ofstream out(run_region);
        if (!out) throw std::runtime_error("cannot write region file: " + run_region);
        out << region.dump(2) << "\n";
      }
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.12g", cumulative_regret(trace));
      std::cout << buf << "\n";
      return 0;
    }

    if (*experiment) {
      ExperimentConfig cfg;
      if (!exp_config.empty()) {
        std::ifstream in(exp_config);
        if (!in) throw std::runtime_error("cannot open config file: " + exp_config);
        nlohmann::json j;
        in >> j;
        cfg = experiment_config_from_json(j);
      } else {
        nlohmann::json j;
        j["generator"] = exp_generator;
        if (!exp_game_file.empty()) j["game_file"] = exp_game_file;
        j["dims"] = exp_dims;
        j["leader_actions"] = exp_nl;
        j["follower_actions"] = exp_nf;
        j["constraint"] = exp_constraint;
        j["utility"] = exp_utility;
        j["belief"] = exp_belief;
        nlohmann::json policies = nlohmann::json::array();
        for (const auto& name : split_names(exp_policies)) policies.push_back(name);
        j["policies"] = policies;
        j["horizons"] = parse_int_list(exp_horizons, "horizon");
        j["replications"] = exp_reps;
        j["seed"] = exp_seed;
        j["samples"] = exp_samples;
        j["known_brs"] = exp_known_brs;
        cfg = experiment_config_from_json(j);
      }
      // inline overrides that make sense on top of a config file
      if (experiment->count("--workers")) cfg.workers = exp_workers;
      if (experiment->count("--out")) cfg.out_path = exp_out;
      if (experiment->count("--traces-dir")) cfg.traces_dir = exp_traces;
      if (experiment->count("--seed")) cfg.base_seed = exp_seed;
      if (experiment->count("--reps")) cfg.replications = exp_reps;
      auto rows = run_experiment(cfg);
      for (const auto& r : rows) {
        char buf[192];
        std::snprintf(buf, sizeof(buf), "policy=%s T=%d mean_cr=%.6g se=%.6g reps=%d beneficial=%.4g",
                      r.policy.c_str(), r.horizon, r.mean_final_cr, r.se_final_cr,
                      r.replications, r.beneficial_fraction);
        std::cout << buf << "\n";
      }
      return 0;
    }

    if (*inspect) {
      Game game = resolve_game(inspect_input);
      nlohmann::json j;
      j["game"] = game_to_json(game);
      nlohmann::json brs = nlohmann::json::array();
      for (std::size_t l = 0; l < game.leader_actions(); ++l)
        brs.push_back(best_response(game, l) + 1);
      j["best_responses"] = brs;
      if (game.follower_model.kind == UtilityKind::Linear) {
        Game c1 = game;
        c1.constraint = ConstraintMode::C1;
        Game c2 = game;
        c2.constraint = ConstraintMode::C2;
        j["omp_c1"] = solution_to_json(solve_omp(c1));
        j["omp_c2"] = solution_to_json(solve_omp(c2));
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
