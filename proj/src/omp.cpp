#include "stackgame/omp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace stackgame {

namespace {

constexpr double kTiny = 1e-12;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// guard against unbounded axis scans when a follower weight is ~0
constexpr std::size_t kMaxScanSteps = 2'000'000;

// leader utility of (payoff - cost), -inf when outside the utility's domain
double leader_value(const GameView& view, std::span<const double> payoff, const Vec& cost) {
  Vec net = sub(payoff, cost);
  if (view.leader_model->kind == UtilityKind::CobbDouglas) {
    for (double x : net) {
      if (!(x > 0.0)) return kNegInf;
    }
  }
  return view.leader_utility(net);
}

struct Candidate {
  Manipulation m;
  double value = kNegInf;
  bool valid = false;
};

// value desc, then lower l, lower f, zero cost preferred
bool improves(const Candidate& incumbent, const Manipulation& m, double value) {
  if (!incumbent.valid) return true;
  if (value != incumbent.value) return value > incumbent.value;
  if (m.leader_action != incumbent.m.leader_action)
    return m.leader_action < incumbent.m.leader_action;
  if (m.target != incumbent.m.target) return m.target < incumbent.m.target;
  return is_zero(m.cost) && !is_zero(incumbent.m.cost);
}

void consider(Candidate& best, const Manipulation& m, double value) {
  if (value == kNegInf) return;
  if (improves(best, m, value)) best = {m, value, true};
}

}  // namespace

std::optional<Vec> minimal_cost_given_weight(const GameView& view, const Weight& w,
                                             std::size_t l, std::size_t f) {
  const PayoffTensor& xf = *view.follower_payoffs;
  UtilityModel model{UtilityKind::Linear, w};
  std::size_t br = best_response_under(xf, model, l);
  double gap = dot(w.span(), xf.at(l, br)) - dot(w.span(), xf.at(l, f));
  std::size_t dims = view.dims();
  if (gap <= 0.0) return Vec(dims, 0.0);

  auto own = view.leader_payoffs->at(l, f);
  if (view.constraint == ConstraintMode::C1) {
    // the optimum is on one objective axis; pick the axis the leader values least
    std::optional<Vec> best;
    double best_value = kNegInf;
    for (std::size_t d = 0; d < dims; ++d) {
      if (w[d] <= 0.0) continue;
      Vec cost(dims, 0.0);
      cost[d] = gap / w[d];
      double value = leader_value(view, own, cost);
      if (!best || value > best_value) {
        best = std::move(cost);
        best_value = value;
      }
    }
    return best;
  }

  // c2: minimise the leader-weighted cost subject to w.c = gap, 0 <= c <= own.
  // Greedy fill in ascending leader/follower weight ratio is exact for this
  // box-constrained one-row program; the result lands on a box corner with
  // at most one partially funded objective.
  Vec upper(dims, 0.0);
  double capacity = 0.0;
  for (std::size_t d = 0; d < dims; ++d) {
    upper[d] = std::max(0.0, own[d]);
    capacity += w[d] * upper[d];
  }
  if (gap > capacity + kTiny) return std::nullopt;

  const Weight& lw = view.leader_model->weight;
  std::vector<std::size_t> order;
  for (std::size_t d = 0; d < dims; ++d) {
    if (w[d] > 0.0) order.push_back(d);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lw[a] * w[b] < lw[b] * w[a];
  });

  Vec cost(dims, 0.0);
  double remaining = gap;
  for (std::size_t d : order) {
    if (remaining <= kTiny) break;
    double take = std::min(upper[d], remaining / w[d]);
    cost[d] = take;
    remaining -= take * w[d];
  }
  if (remaining > 1e-9) return std::nullopt;
  return cost;
}

OmpSolution solve_omp(const Game& game) {
  if (game.follower_model.kind != UtilityKind::Linear)
    throw std::invalid_argument("solve_omp requires a linear follower utility");
  GameView view = leader_view(game);
  const Weight& w = game.follower_model.weight;
  std::size_t dims = game.dims();

  Candidate best;
  for (std::size_t l = 0; l < game.leader_actions(); ++l) {
    std::size_t br = best_response(game, l);
    Manipulation no_manip{l, br, Vec(dims, 0.0)};
    consider(best, no_manip, leader_value(view, view.leader_payoffs->at(l, br), no_manip.cost));
    for (std::size_t f = 0; f < game.follower_actions(); ++f) {
      auto cost = minimal_cost_given_weight(view, w, l, f);
      if (!cost) continue;
      Manipulation m{l, f, *cost};
      consider(best, m, leader_value(view, view.leader_payoffs->at(l, f), m.cost));
    }
  }
  return {best.m, best.value, !is_zero(best.m.cost)};
}

namespace {

// first accepted point walking the given cost direction in grid steps;
// utility is decreasing along the walk, so the first hit is the edge optimum
void scan_edge(const Game& game, const GameView& view, Candidate& best, std::size_t l,
               std::size_t f, double u_br, const Vec& base, std::size_t axis, double axis_cap,
               double step) {
  auto follower_payoff = game.follower_payoffs.at(l, f);
  auto leader_payoff = game.leader_payoffs.at(l, f);
  std::size_t max_k = static_cast<std::size_t>(axis_cap / step) + 2;
  if (max_k > kMaxScanSteps) max_k = kMaxScanSteps;
  Vec cost = base;
  for (std::size_t k = 0; k < max_k; ++k) {
    cost[axis] = std::min(static_cast<double>(k) * step, axis_cap);
    Vec manipulated = add(follower_payoff, cost);
    if (utility(game.follower_model, manipulated) >= u_br - kAcceptSlack) {
      consider(best, Manipulation{l, f, cost}, leader_value(view, leader_payoff, cost));
      return;
    }
    if (cost[axis] >= axis_cap) return;
  }
}

void brute_force_cobb_douglas(const Game& game, const GameView& view, Candidate& best,
                              double step) {
  if (game.dims() != 2)
    throw std::invalid_argument("Cobb-Douglas grid reference supports 2 objectives only");
  for (std::size_t l = 0; l < game.leader_actions(); ++l) {
    std::size_t br = best_response(game, l);
    double u_br = utility(game.follower_model, game.follower_payoffs.at(l, br));
    Manipulation no_manip{l, br, Vec(2, 0.0)};
    consider(best, no_manip,
             leader_value(view, game.leader_payoffs.at(l, br), no_manip.cost));
    for (std::size_t f = 0; f < game.follower_actions(); ++f) {
      if (f == br) continue;
      auto follower_payoff = game.follower_payoffs.at(l, f);
      auto leader_payoff = game.leader_payoffs.at(l, f);
      // per-axis cap: smallest single-axis grid cost that wins acceptance
      Vec cap(2, 0.0);
      for (std::size_t d = 0; d < 2; ++d) {
        cap[d] = -1.0;
        for (std::size_t k = 0; k <= 100000; ++k) {
          Vec cost(2, 0.0);
          cost[d] = static_cast<double>(k) * step;
          if (utility(game.follower_model, add(follower_payoff, cost)) >= u_br - kAcceptSlack) {
            cap[d] = cost[d];
            break;
          }
        }
        if (cap[d] < 0.0) cap[d] = 0.0;  // this axis alone can never persuade
        if (view.constraint == ConstraintMode::C2)
          cap[d] = std::min(cap[d], std::max(0.0, leader_payoff[d]));
      }
      std::size_t n0 = static_cast<std::size_t>(cap[0] / step) + 1;
      std::size_t n1 = static_cast<std::size_t>(cap[1] / step) + 1;
      for (std::size_t i = 0; i <= n0; ++i) {
        for (std::size_t j = 0; j <= n1; ++j) {
          Vec cost{std::min(static_cast<double>(i) * step, cap[0]),
                   std::min(static_cast<double>(j) * step, cap[1])};
          if (utility(game.follower_model, add(follower_payoff, cost)) < u_br - kAcceptSlack)
            continue;
          consider(best, Manipulation{l, f, cost}, leader_value(view, leader_payoff, cost));
          break;  // larger second-axis cost only lowers the leader value
        }
      }
    }
  }
}

}  // namespace

OmpSolution brute_force_omp(const Game& game, double grid_step) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid_step must be positive");
  GameView view = leader_view(game);
  Candidate best;

  if (game.follower_model.kind == UtilityKind::CobbDouglas) {
    brute_force_cobb_douglas(game, view, best, grid_step);
    return {best.m, best.value, !is_zero(best.m.cost)};
  }

  std::size_t dims = game.dims();
  for (std::size_t l = 0; l < game.leader_actions(); ++l) {
    std::size_t br = best_response(game, l);
    double u_br = utility(game.follower_model, game.follower_payoffs.at(l, br));
    Manipulation no_manip{l, br, Vec(dims, 0.0)};
    consider(best, no_manip,
             leader_value(view, game.leader_payoffs.at(l, br), no_manip.cost));
    for (std::size_t f = 0; f < game.follower_actions(); ++f) {
      if (f == br) continue;
      auto leader_payoff = game.leader_payoffs.at(l, f);
      if (game.constraint == ConstraintMode::C1) {
        double cap = static_cast<double>(kMaxScanSteps) * grid_step;
        for (std::size_t d = 0; d < dims; ++d)
          scan_edge(game, view, best, l, f, u_br, Vec(dims, 0.0), d, cap, grid_step);
      } else {
        // box edges: some objectives pinned at their bound, one axis scanned
        Vec upper(dims, 0.0);
        for (std::size_t d = 0; d < dims; ++d) upper[d] = std::max(0.0, leader_payoff[d]);
        for (std::size_t mask = 0; mask < (std::size_t{1} << dims); ++mask) {
          Vec base(dims, 0.0);
          for (std::size_t d = 0; d < dims; ++d) {
            if (mask & (std::size_t{1} << d)) base[d] = upper[d];
          }
          for (std::size_t axis = 0; axis < dims; ++axis) {
            if (mask & (std::size_t{1} << axis)) continue;
            scan_edge(game, view, best, l, f, u_br, base, axis, upper[axis], grid_step);
          }
        }
      }
    }
  }
  return {best.m, best.value, !is_zero(best.m.cost)};
}

Vec play_safe_cost(const Game& game, std::size_t l, std::size_t f) {
  std::size_t br = best_response(game, l);
  auto br_payoff = game.follower_payoffs.at(l, br);
  auto target_payoff = game.follower_payoffs.at(l, f);
  Vec cost(game.dims(), 0.0);
  for (std::size_t d = 0; d < cost.size(); ++d)
    cost[d] = std::max(0.0, br_payoff[d] - target_payoff[d]);
  return cost;
}

}  // namespace stackgame
