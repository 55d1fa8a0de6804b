#pragma once

#include <optional>

#include "stackgame/game.hpp"

namespace stackgame {

struct OmpSolution {
  Manipulation manipulation;
  double leader_utility = 0.0;
  // a game is beneficial exactly when its optimal cost is nonzero
  bool beneficial = false;
};

// Cheapest (in leader utility) cost making the follower with linear weight w
// weakly prefer (l, f) over their best response at l. Returns the zero
// vector when f already is the best response, and nullopt when no feasible
// cost exists (possible under c2, or when every useful objective has zero
// follower weight).
//
// Under c1 the optimum lies on a single objective axis, so the D axis
// candidates are compared directly. Under c2 the tight incentive constraint
// with box bounds is a one-row linear program solved exactly by a greedy
// fill in ascending leader-per-follower weight ratio.
std::optional<Vec> minimal_cost_given_weight(const GameView& view, const Weight& w,
                                             std::size_t l, std::size_t f);

// Exact solver for the optimal manipulation given the true (linear) follower
// weight: enumerates every action pair's minimal cost plus the unmanipulated
// options. Ties broken toward lower leader action, lower target, then zero
// cost.
OmpSolution solve_omp(const Game& game);

// Independent grid-search reference. Walks the corner-structure cost space
// (single-objective axes under c1, additionally boxed edge combinations
// under c2) in steps of grid_step and checks the incentive constraint by
// direct utility evaluation, so it shares no algebra with solve_omp. Also
// handles Cobb-Douglas follower utilities (2-objective games) by searching
// the full cost grid.
OmpSolution brute_force_omp(const Game& game, double grid_step);

// Componentwise payoff gap max(0, X_F(l, BR(l)) - X_F(l, f)): an offer that
// dominates the best response in every objective, accepted under any weight.
Vec play_safe_cost(const Game& game, std::size_t l, std::size_t f);

}  // namespace stackgame
