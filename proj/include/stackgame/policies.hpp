#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "stackgame/belief.hpp"
#include "stackgame/game.hpp"
#include "stackgame/rng.hpp"

namespace stackgame {

enum class Objective { EU, LongEU, LongEUPlus };
enum class AcceptanceModel { PFR, RWMC, MWMC };

struct PolicySpec {
  bool no_manipulation = false;
  Objective objective = Objective::LongEU;
  AcceptanceModel acceptance = AcceptanceModel::PFR;
  UtilityKind belief_kind = UtilityKind::Linear;

  // "nomanip" or "<eu|longeu|longeuplus>+<pfr|rwmc|mwmc>"
  static PolicySpec parse(const std::string& name);
  std::string name() const;
  // RWMC/MWMC rely on linear minimal costs, so they require a linear belief
  void validate() const;
};

// Mutable per-episode leader knowledge. The harness owns the update cycle;
// decision functions read it (MWMC additionally records its last weight).
struct PolicyState {
  PolicyState(std::size_t dims, std::size_t leader_actions,
              UtilityKind belief = UtilityKind::Linear)
      : region(dims), known_brs(leader_actions), belief_kind(belief) {}

  FeasibleRegion region;
  std::vector<Comparison> history;
  std::optional<Manipulation> incumbent;
  double incumbent_utility = 0.0;  // valid only when incumbent is set
  std::vector<std::optional<std::size_t>> known_brs;
  std::optional<Weight> last_weight;  // MWMC stuck detection
  bool last_explored = true;
  int round = 1;
  std::vector<Weight> samples;
  UtilityKind belief_kind;

  bool all_brs_known() const;
};

// redraw the cached sample cloud from the current region
void refresh_samples(PolicyState& state, std::size_t n, std::uint64_t seed);

// Expected no-manipulation utility of playing l: exact once BR(l) is known,
// otherwise the sample expectation over the region's best responses.
double fallback_utility(const PolicyState& state, const GameView& view, std::size_t l);

// Utility of the current best manipulation. Before any outcome is observed
// it substitutes the best predicted-BR utility across leader actions.
double incumbent_value(const PolicyState& state, const GameView& view);

// the myopic score: accepted utility vs the expected fallback
double eu_value(const PolicyState& state, const GameView& view, const Manipulation& m,
                double p_accept);

// Horizon-weighted score: success locks the new utility for the remaining
// rounds, failure costs one fallback round and leaves the incumbent.
double longeu_value(const PolicyState& state, const GameView& view, const Manipulation& m,
                    double p_accept, int t0, int T);

// infinite-horizon limit: expected improvement over the incumbent
double longeu_plus_value(const PolicyState& state, const GameView& view, const Manipulation& m,
                         double p_accept);

// Candidate offers for the probabilistic-feasible-region search: for every
// action pair a zero-cost option, the incumbent, and the per-sample tight
// costs (one objective axis each under c1, the greedy box fill under c2).
std::vector<Manipulation> pfr_candidates(const PolicyState& state, const GameView& view);

Manipulation decide_pfr(const PolicyState& state, const GameView& view, int t0, int T,
                        Objective objective);

// Fixes a weight (random draw, or region centroid for the middle-weight
// variant), prices every pair at that weight's minimal cost with acceptance
// probability one half, and explores only when the best such offer scores at
// least as well as replaying the incumbent. A centroid stuck at the previous
// round's weight after a non-manipulating round is replaced by a random
// region weight.
Manipulation decide_rwmc(PolicyState& state, const GameView& view, int t0, int T,
                         Objective objective, bool use_centroid, Rng& rng);

// best action given known best responses, zero cost
Manipulation no_manipulation_baseline(const PolicyState& state, const GameView& view);

Manipulation decide(PolicyState& state, const GameView& view, const PolicySpec& spec, int t0,
                    int T, Rng& rng);

// Two-objective single-axis cost geometry for one action pair: alpha is the
// payoff-difference slope of the acceptance threshold, cost_min the smallest
// cost the region might require, cost_max the largest cost still improving
// on the incumbent.
struct TwoDRowGeometry {
  double alpha = 0.0;
  std::array<double, 2> cost_min{0.0, 0.0};
  std::array<double, 2> cost_max{0.0, 0.0};
};

// Stationary point of the expected-improvement score restricted to one
// objective axis; throws std::domain_error when the bounds make the radicand
// negative.
double closed_form_2d_cost(const TwoDRowGeometry& geometry, std::size_t objective);

// geometry of pair (l, f) given the current interval, known BR and incumbent
TwoDRowGeometry make_row_geometry(const GameView& view, const FeasibleRegion::Interval& interval,
                                  std::size_t l, std::size_t f, std::size_t br,
                                  double incumbent_utility);

// minimal cost h_d(w) = w . gap / w_d spent on a single objective
double single_objective_cost(std::span<const double> w, std::span<const double> payoff_gap,
                             std::size_t objective);

}  // namespace stackgame
