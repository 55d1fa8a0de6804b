#include "stackgame/game.hpp"

#include <cmath>

namespace stackgame {

Weight::Weight(Vec values) : v_(std::move(values)) {
  if (v_.empty()) throw std::invalid_argument("weight must have at least one component");
  double total = 0.0;
  for (double x : v_) {
    if (!(x >= 0.0)) throw std::invalid_argument("weight components must be nonnegative");
    total += x;
  }
  if (std::abs(total - 1.0) > kWeightSumTol)
    throw std::invalid_argument("weight components must sum to one");
}

Weight Weight::normalized(Vec values) {
  double total = 0.0;
  for (double x : values) {
    if (!(x >= 0.0)) throw std::invalid_argument("weight components must be nonnegative");
    total += x;
  }
  if (total <= 0.0) throw std::invalid_argument("weight must have positive mass");
  for (double& x : values) x /= total;
  return Weight(std::move(values));
}

double utility(const UtilityModel& model, std::span<const double> payoff) {
  if (payoff.size() != model.weight.dims())
    throw std::invalid_argument("payoff dimension does not match the weight");
  if (model.kind == UtilityKind::Linear) return dot(model.weight.span(), payoff);
  // Cobb-Douglas, evaluated in log space
  double log_u = 0.0;
  for (std::size_t d = 0; d < payoff.size(); ++d) {
    if (!(payoff[d] > 0.0))
      throw std::domain_error("Cobb-Douglas utility requires strictly positive payoffs");
    log_u += model.weight[d] * std::log(payoff[d]);
  }
  return std::exp(log_u);
}

PayoffTensor::PayoffTensor(std::size_t leader_actions, std::size_t follower_actions,
                           std::size_t dims)
    : n_leader_(leader_actions), n_follower_(follower_actions), dims_(dims),
      data_(leader_actions * follower_actions * dims, 0.0) {
  if (leader_actions == 0 || follower_actions == 0 || dims == 0)
    throw std::invalid_argument("payoff tensor dimensions must be positive");
}

PayoffTensor PayoffTensor::from_nested(const std::vector<std::vector<Vec>>& rows) {
  if (rows.empty() || rows[0].empty() || rows[0][0].empty())
    throw std::invalid_argument("payoff tensor must be non-empty");
  PayoffTensor t(rows.size(), rows[0].size(), rows[0][0].size());
  for (std::size_t l = 0; l < rows.size(); ++l) {
    if (rows[l].size() != t.n_follower_)
      throw std::invalid_argument("payoff tensor rows must have equal length");
    for (std::size_t f = 0; f < rows[l].size(); ++f) t.set(l, f, rows[l][f]);
  }
  return t;
}

void PayoffTensor::set(std::size_t l, std::size_t f, std::span<const double> payoff) {
  if (payoff.size() != dims_)
    throw std::invalid_argument("payoff entry has the wrong dimension");
  double* out = data_.data() + (l * n_follower_ + f) * dims_;
  for (std::size_t d = 0; d < dims_; ++d) out[d] = payoff[d];
}

Game::Game(PayoffTensor leader, PayoffTensor follower, UtilityModel leader_m,
           UtilityModel follower_m, ConstraintMode constraint_mode, int horizon_rounds,
           std::string game_id)
    : leader_payoffs(std::move(leader)), follower_payoffs(std::move(follower)),
      leader_model(std::move(leader_m)), follower_model(std::move(follower_m)),
      constraint(constraint_mode), horizon(horizon_rounds), id(std::move(game_id)) {
  if (leader_payoffs.leader_actions() != follower_payoffs.leader_actions() ||
      leader_payoffs.follower_actions() != follower_payoffs.follower_actions() ||
      leader_payoffs.dims() != follower_payoffs.dims())
    throw std::invalid_argument("payoff tensors must share shape and dimension");
  if (leader_model.weight.dims() != dims() || follower_model.weight.dims() != dims())
    throw std::invalid_argument("utility weights must match the payoff dimension");
  if (horizon < 1) throw std::invalid_argument("horizon must be at least one round");
}

GameView leader_view(const Game& game) {
  return {&game.leader_payoffs, &game.follower_payoffs, &game.leader_model, game.constraint};
}

std::size_t best_response_under(const PayoffTensor& follower_payoffs, const UtilityModel& model,
                                std::size_t l) {
  std::size_t best = 0;
  double best_u = utility(model, follower_payoffs.at(l, 0));
  for (std::size_t f = 1; f < follower_payoffs.follower_actions(); ++f) {
    double u = utility(model, follower_payoffs.at(l, f));
    if (u > best_u) {
      best_u = u;
      best = f;
    }
  }
  return best;
}

std::size_t best_response(const Game& game, std::size_t l) {
  if (l >= game.leader_actions()) throw std::out_of_range("leader action out of range");
  return best_response_under(game.follower_payoffs, game.follower_model, l);
}

std::size_t follower_respond(const Game& game, const Manipulation& m) {
  std::size_t br = best_response(game, m.leader_action);
  Vec manipulated = add(game.follower_payoffs.at(m.leader_action, m.target), m.cost);
  double u_offer = utility(game.follower_model, manipulated);
  double u_br = utility(game.follower_model, game.follower_payoffs.at(m.leader_action, br));
  return u_offer >= u_br - kAcceptSlack ? m.target : br;
}

void validate_manipulation(const GameView& view, const Manipulation& m) {
  if (m.leader_action >= view.leader_actions()) throw std::invalid_argument("leader action out of range");
  if (m.target >= view.follower_actions()) throw std::invalid_argument("target action out of range");
  if (m.cost.size() != view.dims()) throw std::invalid_argument("cost has the wrong dimension");
  auto own = view.leader_payoffs->at(m.leader_action, m.target);
  for (std::size_t d = 0; d < m.cost.size(); ++d) {
    if (m.cost[d] < 0.0) throw std::invalid_argument("cost components must be nonnegative");
    if (view.constraint == ConstraintMode::C2 && m.cost[d] > own[d] + 1e-9)
      throw std::invalid_argument("cost exceeds the leader payoff under constraint c2");
  }
}

}  // namespace stackgame
