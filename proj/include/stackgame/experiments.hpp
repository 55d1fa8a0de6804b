#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "stackgame/game.hpp"
#include "stackgame/policies.hpp"

namespace stackgame {

enum class GeneratorKind { UniformRandom, HighRisk, PlaySafe, FromFile };
enum class FixedGameName { HighRisk, PlaySafe };

// The two(-objective) benchmark games: a high-risk/high-return row next to a
// low-risk/low-return row, and a game with a tempting non-informative
// play-safe offer.
Game fixed_game(FixedGameName name);

// i.i.d. uniform payoffs on [0,1] (shifted to [0.01,1.01] for Cobb-Douglas
// positivity) and independent uniform-simplex weights for both players
Game generate_uniform_game(std::size_t dims, std::size_t leader_actions,
                           std::size_t follower_actions, ConstraintMode constraint,
                           UtilityKind utility_kind, std::uint64_t seed);

struct ExperimentConfig {
  GeneratorKind generator = GeneratorKind::UniformRandom;
  std::string game_file;  // FromFile only
  std::size_t dims = 2;
  std::size_t leader_actions = 2;
  std::size_t follower_actions = 2;
  ConstraintMode constraint = ConstraintMode::C2;
  UtilityKind utility_kind = UtilityKind::Linear;
  std::vector<PolicySpec> policies;
  std::vector<int> horizons;
  int replications = 1;
  std::uint64_t base_seed = 1;
  std::size_t samples = 512;
  int workers = 1;
  bool preseed_known_brs = false;
  std::string out_path;     // summary CSV, empty = no file
  std::string traces_dir;   // raw JSONL traces, empty = skip
};

struct SummaryRow {
  std::string policy;
  int horizon = 0;
  double mean_final_cr = 0.0;
  double se_final_cr = 0.0;  // sample stdev / sqrt(replications)
  int replications = 0;
  double beneficial_fraction = 0.0;
};

// Runs `replications` episodes per (policy, horizon) cell. Random mode draws
// one fresh game per replication, shared by every policy and horizon of that
// replication, so policy comparisons are paired. Worker count never changes
// the output: replication slots are preallocated and merged in index order.
std::vector<SummaryRow> run_experiment(const ExperimentConfig& config);

void write_summary_csv(std::span<const SummaryRow> rows, std::ostream& out);

// Strict key-checked parse of the documented config schema.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

}  // namespace stackgame
