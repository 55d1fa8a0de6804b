#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stackgame/game.hpp"
#include "stackgame/policies.hpp"

namespace stackgame {

struct RoundRecord {
  int t = 0;  // 1-based round index
  Manipulation manipulation;
  std::size_t follower_action = 0;
  bool accepted = false;
  double leader_utility = 0.0;
  double instant_regret = 0.0;
  double cum_regret = 0.0;
};

struct RegionSummary {
  std::size_t dims = 0;
  std::size_t constraint_count = 0;
  std::optional<double> w1_lo;  // two-objective interval, when applicable
  std::optional<double> w1_hi;
  Vec centroid;
  // filled only when EpisodeOptions::keep_region_detail is set
  std::vector<HalfspaceConstraint> constraints;
  std::vector<Vec> sample_cloud;
};

struct Trace {
  std::string game_id;
  std::string policy;
  std::uint64_t seed = 0;
  int horizon = 0;
  std::size_t dims = 0;
  std::string constraint;
  double reference_utility = 0.0;
  bool reference_approximate = false;
  std::vector<RoundRecord> rounds;
  RegionSummary final_region;
};

struct EpisodeOptions {
  std::size_t samples = 512;
  bool preseed_known_brs = false;
  // grid for the Cobb-Douglas regret reference (no exact solver exists there)
  double reference_grid_step = 0.005;
  // keep the final region's constraints and a sample cloud in the trace
  bool keep_region_detail = false;
};

// Optimal leader utility used as the per-round regret reference: the exact
// manipulation optimum for linear games, a grid approximation (flagged) for
// Cobb-Douglas.
double reference_utility(const Game& game, double grid_step, bool& approximate);

// Plays T rounds: the policy picks an offer, the simulated follower
// responds, the belief region and incumbent update, regret accrues against
// the optimum. The episode generator is derived from (seed, game id, policy
// name), so replications are reproducible cell by cell.
Trace run_episode(const Game& game, const PolicySpec& spec, int T, std::uint64_t seed,
                  const EpisodeOptions& options = {});

double cumulative_regret(const Trace& trace);

// grants the policy every true best response plus the matching comparisons
// and incumbent (the paper-style "BRs known" start; always on for nomanip)
void preseed_known_brs(PolicyState& state, const Game& game);

// JSON-lines: one header object, one object per round, one closing summary.
void write_trace_jsonl(const Trace& trace, std::ostream& out);
// columns: seed,game_id,policy,t,l,f,cost_0..cost_{D-1},accepted,utility,regret,cum_regret
void write_trace_csv(const Trace& trace, std::ostream& out);

}  // namespace stackgame
